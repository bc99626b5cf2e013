"""Acceptance checks run as one parallel sweep.

Each check returns a CheckResult; run_suite turns the set into an exit code:
0 when all pass, 1 when a verdict fails, 2 for configuration errors and 3 for
numerical breakdown.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from banded import WeightRule
from bundles import (
    derivative_identity_check,
    frame_from_right_inverse,
    gram_congruent,
    gram_data,
    operator_equivalence,
    rigidity_check,
    span_basis,
)
from canonical import ad_theta_equivalent, canonical_matrix, complex_rep_equivalence, curvature_grid, disc_grid
from catalog import (
    CNDU_BASE,
    TCI_EXPECTED,
    TCI_REGIONS,
    cndu_pair,
    cndu_section,
    random_conjugate_fixture,
    tci_operator,
)
from config import RunConfig
from errors import QcdError
from logger import LoggerFactory, get_default_factory
from qcore import Quaternion
from qlinalg import QMatrix, random_qmatrix, random_qvector, unit_quaternion
from shifts import bn_probe, geometric_eigvec, rsp, s_eigvec_closed_form, s_eigvec_recurrence
from spectra import pencil
from sweep_orchestrator import SweepOrchestrator

CNDU_VALUES = {"t": Quaternion(1.0, 0.0, 0.0, -2.0), "t_tilde": Quaternion(math.sqrt(2.0) / 2.0)}


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class SuiteReport:
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)
    exit_code: int = 0

    @property
    def passed(self) -> bool:
        return self.exit_code == 0

    def summary(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "exit_code": self.exit_code,
            "checks": {
                name: {"passed": c.passed, "details": c.details}
                for name, c in self.checks.items()
            },
            "errors": dict(self.errors),
        }


def check_representation(cfg: RunConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(1000):
        a, b = random_qmatrix(8, 8, rng), random_qmatrix(8, 8, rng)
        product = (a @ b).to_complex()
        worst = max(worst, float(np.max(np.abs(product - a.to_complex() @ b.to_complex()))))
        if not QMatrix.from_complex(a.to_complex()).allclose(a, 0.0):
            return CheckResult("representation", False, {"roundtrip": False})
    return CheckResult("representation", worst < 1e-12, {"max_error": worst})


def check_factorization(cfg: RunConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 1)
    worst = 0.0
    for _ in range(1000):
        t = random_qmatrix(16, 16, rng)
        x = random_qvector(16, rng)
        s = Quaternion(*rng.standard_normal(4))
        inner_step = t @ x - x.rmul(s.conj())
        factored = t @ inner_step - inner_step.rmul(s)
        direct = pencil(t, s) @ x
        worst = max(worst, (direct - factored).norm() / (x.norm() * max(1.0, t.norm2()) ** 2))
    return CheckResult("factorization", worst < 1e-12, {"max_relative_error": worst})


def check_tci(cfg: RunConfig, factory: LoggerFactory) -> CheckResult:
    op = tci_operator()
    details = {}
    passed = True
    for region, samples in TCI_REGIONS.items():
        report = bn_probe(op, samples, [32, 64, 128], cfg.tol("membership"), cfg.tol("decay"),
                          workers=1, logger_factory=factory)
        details[region] = report.n
        passed = passed and report.n == TCI_EXPECTED[region]
    return CheckResult("tci", passed, details)


def check_closed_form(cfg: RunConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 2)
    w = WeightRule.const(1.0)
    bound = 0.8 * rsp(w, 64).estimate
    worst = 0.0
    for _ in range(100):
        direction = rng.standard_normal(4)
        s = Quaternion(*(direction / np.linalg.norm(direction) * rng.uniform(0.05, bound)))
        x1, x2 = unit_quaternion(rng), unit_quaternion(rng)
        closed = s_eigvec_closed_form(w, s, x1, x2, 64)
        oracle = s_eigvec_recurrence(w, s, x1, x2, 64)
        worst = max(worst, (closed - oracle).norm() / max(1.0, oracle.norm()))
    s = Quaternion(0.1, 0.3, -0.2, 0.25)
    seeded = s_eigvec_closed_form(w, s, Quaternion(1.0), s, 64)
    geometric = geometric_eigvec(w, s, 64)
    seed_error = (seeded - geometric).norm()
    return CheckResult("closed_form", worst < 1e-10 and seed_error < 1e-12,
                       {"max_error": worst, "geometric_error": seed_error})


def check_rsp(cfg: RunConfig) -> CheckResult:
    ones = rsp(WeightRule.const(1.0), 1000).estimate
    ratio = rsp(WeightRule.ratio(), 10_000).estimate
    twos = rsp(WeightRule.const(2.0), 1000).estimate
    passed = abs(ones - 1.0) <= 1e-12 and abs(ratio - 1.0) <= 1e-2 and abs(twos - 2.0) <= 1e-12
    return CheckResult("rsp", passed, {"const_1": ones, "ratio": ratio, "const_2": twos})


def _cndu_matrices(n: int):
    t, t_tilde = cndu_pair()
    return t.truncate(n), t_tilde.truncate(n)


def check_derivatives(cfg: RunConfig, factory: LoggerFactory) -> CheckResult:
    details = {}
    for name, t in zip(("t", "t_tilde"), _cndu_matrices(cfg.n)):
        frame = frame_from_right_inverse(t, CNDU_BASE, cfg.k, cfg.tol("pinv_cutoff"), cfg.tol("gap"),
                                         cfg.tol("guard"), cfg.tol("guard_radius"), factory)
        details[name] = derivative_identity_check(t, frame).max_residual
    return CheckResult("derivative_identities", max(details.values()) < 1e-9, details)


def check_rigidity(cfg: RunConfig, factory: LoggerFactory) -> CheckResult:
    t, _ = _cndu_matrices(32)
    frame = frame_from_right_inverse(t, CNDU_BASE, 6, logger_factory=factory)
    q = span_basis(frame)
    worst = 0.0
    for index in range(20):
        u0, _ = random_conjugate_fixture(t, cfg.seed + 100 + index)
        result = rigidity_check(frame, frame.transported(u0), cfg.tol("congruence"), factory)
        if not result.congruent:
            return CheckResult("rigidity", False, {"fixture": index})
        worst = max(worst, float(np.linalg.norm((result.u.to_complex() - u0.to_complex()) @ q, 2)))
    table = gram_data(frame)
    flipped = not gram_congruent(table, table.perturbed(1, 0, 0, 0, 1e-4), cfg.tol("congruence")).congruent
    return CheckResult("rigidity", worst < 1e-8 and flipped, {"max_span_error": worst, "perturbation_flips": flipped})


def check_cndu_canonical(cfg: RunConfig, factory: LoggerFactory) -> CheckResult:
    t, t_tilde = _cndu_matrices(cfg.n)
    reps = {name: canonical_matrix(m, CNDU_BASE, cfg.k, tol=cfg.tol("scalar"), logger_factory=factory)
            for name, m in (("t", t), ("t_tilde", t_tilde))}
    errors = {name: abs(reps[name].entry(0, 1) - CNDU_VALUES[name]) for name in reps}
    ad = ad_theta_equivalent(reps["t"], reps["t_tilde"])
    equivalence = operator_equivalence(t, t_tilde, CNDU_BASE, cfg.k, cfg.tol("congruence"), cfg.tol("intertwine"),
                                       cfg.seed, factory)
    passed = max(errors.values()) < 1e-10 and not ad.equivalent and not equivalence.equivalent
    return CheckResult("cndu_canonical", passed, {
        "entry_errors": errors,
        "ad_theta_equivalent": ad.equivalent,
        "operator_equivalent": equivalence.equivalent,
    })


def check_cndu_curvature(cfg: RunConfig, factory: LoggerFactory) -> CheckResult:
    sections = {name: cndu_section(name, cfg.n) for name in ("t", "t_tilde")}
    points = disc_grid(1j, 0.5, 21, min_imag=0.5)
    rows = curvature_grid(sections, points, cfg.tol("curvature_step"), cfg.workers, factory)
    difference = max(abs(r.samples["t"].value - r.samples["t_tilde"].value) for r in rows)
    formula_difference = max(abs(r.samples["t"].formula_value - r.samples["t_tilde"].formula_value) for r in rows)
    gap = max(r.max_gap for r in rows)
    return CheckResult("cndu_curvature", max(difference, formula_difference) < 1e-8 and gap < 1e-6,
                       {"points": len(rows), "max_difference": difference, "max_formula_difference": formula_difference,
                        "max_estimator_gap": gap})


def check_complex_rep(cfg: RunConfig, factory: LoggerFactory) -> CheckResult:
    t, t_tilde = _cndu_matrices(32)
    worst = 0.0
    for index in range(10):
        _, conjugated = random_conjugate_fixture(t, cfg.seed + 200 + index)
        result = complex_rep_equivalence(t, conjugated, CNDU_BASE, 6, tol=cfg.tol("congruence"),
                                         intertwine_tol=cfg.tol("intertwine"), seed=cfg.seed, logger_factory=factory)
        if not (result.equivalent and result.forward):
            return CheckResult("complex_rep", False, {"fixture": index, "reason": result.reason})
        worst = max(worst, result.residual)
    pair = complex_rep_equivalence(t, t_tilde, CNDU_BASE, 6, seed=cfg.seed, logger_factory=factory)
    passed = worst < 1e-8 and not pair.equivalent and not pair.forward
    return CheckResult("complex_rep", passed, {"max_residual": worst, "cndu_equivalent": pair.equivalent})


def check_ad_identity(cfg: RunConfig) -> CheckResult:
    """e^{-i theta}(z1 + j z2)e^{i theta} = z1 + j z2 e^{2i theta}, through 2x2 complex matrices."""
    rng = np.random.default_rng(cfg.seed + 3)
    coeffs = rng.standard_normal((1000, 4))
    z1 = coeffs[:, 0] + 1j * coeffs[:, 1]
    z2 = coeffs[:, 2] - 1j * coeffs[:, 3]
    q = np.stack([np.stack([z1, -np.conj(z2)], -1), np.stack([z2, np.conj(z1)], -1)], -2)
    thetas = np.arange(360) * math.pi / 180.0
    left = np.zeros((360, 2, 2), dtype=complex)
    left[:, 0, 0], left[:, 1, 1] = np.exp(-1j * thetas), np.exp(1j * thetas)
    right = np.conj(left)
    product = np.einsum("tab,qbc,tcd->tqad", left, q, right)
    error = max(
        float(np.max(np.abs(product[:, :, 0, 0] - z1[None, :]))),
        float(np.max(np.abs(product[:, :, 1, 0] - z2[None, :] * np.exp(2j * thetas)[:, None]))),
    )
    sample = Quaternion(*coeffs[0]).ad(thetas[17])
    direct = Quaternion.from_complex_pair(z1[0], z2[0] * np.exp(2j * thetas[17]))
    error = max(error, abs(sample - direct))
    return CheckResult("ad_identity", error < 1e-13, {"max_error": error})


def _timed(check: Callable[[], CheckResult]) -> Callable[[], CheckResult]:
    def run() -> CheckResult:
        start = time.perf_counter()
        result = check()
        result.seconds = time.perf_counter() - start
        return result
    return run


def run_suite(cfg: RunConfig, logger_factory: Optional[LoggerFactory] = None) -> SuiteReport:
    factory = logger_factory or get_default_factory()
    logger = factory.create_logger("suite")
    tasks = {
        "representation": lambda: check_representation(cfg),
        "factorization": lambda: check_factorization(cfg),
        "tci": lambda: check_tci(cfg, factory),
        "closed_form": lambda: check_closed_form(cfg),
        "rsp": lambda: check_rsp(cfg),
        "derivative_identities": lambda: check_derivatives(cfg, factory),
        "rigidity": lambda: check_rigidity(cfg, factory),
        "cndu_canonical": lambda: check_cndu_canonical(cfg, factory),
        "cndu_curvature": lambda: check_cndu_curvature(cfg, factory),
        "complex_rep": lambda: check_complex_rep(cfg, factory),
        "ad_identity": lambda: check_ad_identity(cfg),
    }
    orchestrator = SweepOrchestrator(max_workers=cfg.workers, logger_factory=factory)
    results = orchestrator.run({name: _timed(task) for name, task in tasks.items()}, raise_errors=False)

    report = SuiteReport()
    statuses = orchestrator.statuses()
    errors = orchestrator.errors()
    for name in tasks:
        if statuses.has_errors(name):
            report.errors[name] = f"{type(errors[name]).__name__}: {errors[name]}"
            continue
        report.checks[name] = results[name]
        level = logger.log if results[name].passed else logger.error
        level(f"{name}: {'pass' if results[name].passed else 'FAIL'} ({results[name].seconds:.2f}s)")

    if errors:
        codes = {e.exit_code if isinstance(e, QcdError) else 3 for e in errors.values()}
        report.exit_code = max(codes)
    elif not all(check.passed for check in report.checks.values()):
        report.exit_code = 1
    return report
