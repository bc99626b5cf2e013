"""Rank-one invariants: canonical matrix, ad(e^{i theta}) equivalence, curvature
and equivalence of complex representations."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from bundles import (
    CONGRUENCE_TOL,
    INTERTWINE_TOL,
    JetFrame,
    Section,
    frame_from_right_inverse,
    gauge_tables,
    intertwining_residual,
    normalize_frame,
    operator_equivalence,
    rigidity_check,
    span_basis,
)
from errors import NoIntertwiner, RankMismatch, SizeMismatch, VanishingSection
from logger import LoggerFactory, get_default_factory
from qcore import Quaternion
from qlinalg import QMatrix, QVector, gram_schmidt_q, inner
from sweep_orchestrator import SweepOrchestrator

CURVATURE_STEP = 1e-3


@dataclass
class CanonicalRep:
    """N[i][j] = <T e_j, e_i> in the orthonormalized jet basis at the base point."""
    base: Quaternion
    entries: List[List[Quaternion]]
    diagonal_residual: float = 0.0
    lower_residual: float = 0.0

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> Quaternion:
        return self.entries[i][j]

    def to_qmatrix(self) -> QMatrix:
        return QMatrix.from_quaternions(self.entries)

    def ad(self, theta: float) -> "CanonicalRep":
        """e^{-i theta} N e^{i theta}, entrywise."""
        return CanonicalRep(
            self.base,
            [[value.ad(theta) for value in row] for row in self.entries],
            self.diagonal_residual,
            self.lower_residual,
        )


def canonical_matrix(
    t: QMatrix,
    omega0: Quaternion,
    k: int,
    frame: Optional[JetFrame] = None,
    tol: float = 1e-10,
    logger_factory: Optional[LoggerFactory] = None,
    **frame_options,
) -> CanonicalRep:
    """Canonical matrix of a rank-one operator at omega0.

    The jets g, g', ..., g^(k) are orthonormalized right-linearly and
    N[i][j] = <T e_j, e_i>. The diagonal must equal omega0 and the strictly
    lower part must vanish; both residuals are kept on the result.
    """
    logger = (logger_factory or get_default_factory()).create_logger("canonical")
    if frame is None:
        frame = frame_from_right_inverse(t, omega0, k, logger_factory=logger_factory, **frame_options)
    if frame.rank != 1:
        raise RankMismatch(f"canonical matrices exist for rank one only, frame has rank {frame.rank}")

    basis = gram_schmidt_q(frame.jets[0][: k + 1])
    images = [t @ e for e in basis]
    entries = [[inner(images[j], basis[i]) for j in range(len(basis))] for i in range(len(basis))]

    diagonal = max(abs(entries[i][i] - frame.base) for i in range(len(basis)))
    lower = max((abs(entries[i][j]) for i in range(len(basis)) for j in range(i)), default=0.0)
    if diagonal > tol * max(1.0, t.norm2()) or lower > math.sqrt(tol):
        logger.error(f"canonical matrix self-check: diagonal {diagonal:.3e}, lower {lower:.3e}")
    else:
        logger.debug(f"canonical matrix self-check: diagonal {diagonal:.3e}, lower {lower:.3e}")
    return CanonicalRep(frame.base, entries, diagonal, lower)


@dataclass
class AdThetaResult:
    equivalent: bool
    theta: Optional[float] = None
    reason: str = ""


def ad_theta_equivalent(first: CanonicalRep, second: CanonicalRep, tol: float = 1e-8) -> AdThetaResult:
    """Is second = e^{-i theta} first e^{i theta} for some theta?

    Per entry e^{-i theta} (z1 + j z2) e^{i theta} = z1 + j z2 e^{2i theta}, so the
    complex parts and the j-part moduli must agree and the ratios z2'/z2 must be a
    single unit complex number. theta is returned in [0, pi); theta + pi works too.
    """
    if first.size != second.size:
        raise SizeMismatch(f"canonical matrices of sizes {first.size} and {second.size}")
    if not first.base.isclose(second.base, 1e-12):
        raise SizeMismatch(f"canonical matrices at {first.base.to_text()} and {second.base.to_text()}")

    pairs = [
        (first.entry(i, j).split(), second.entry(i, j).split())
        for i in range(first.size)
        for j in range(first.size)
    ]
    for (z1, z2), (w1, w2) in pairs:
        scale = max(1.0, abs(z1), abs(z2))
        if abs(z1 - w1) > tol * scale:
            return AdThetaResult(False, reason=f"complex parts differ: {z1:.6g} vs {w1:.6g}")
        if abs(abs(z2) - abs(w2)) > tol * scale:
            return AdThetaResult(False, reason=f"j-part moduli differ: {abs(z2):.6g} vs {abs(w2):.6g}")

    votes = [(z2, w2) for (_, z2), (_, w2) in pairs if abs(z2) > tol]
    if not votes:
        return AdThetaResult(True, theta=0.0)
    phase = cmath.phase(sum(np.conj(z2) * w2 for z2, w2 in votes))
    rotation = cmath.exp(1j * phase)
    for z2, w2 in votes:
        if abs(z2 * rotation - w2) > tol * max(1.0, abs(z2)):
            return AdThetaResult(False, reason="j-parts do not rotate by one common phase")
    return AdThetaResult(True, theta=(phase / 2.0) % math.pi)


@dataclass
class CurvatureSample:
    omega: complex
    value: float
    estimator_gap: float
    formula_value: float


def _log_norm(section: Section, omega: complex) -> float:
    norm = section.norm_sq(omega)
    if not norm > 1e-280:
        raise VanishingSection(f"section vanishes at {omega}")
    return math.log(norm)


def _laplacian(section: Section, omega: complex, h: float) -> float:
    centre = _log_norm(section, omega)
    around = sum(_log_norm(section, omega + d) for d in (h, -h, 1j * h, -1j * h))
    return (around - 4.0 * centre) / (h * h)


def formula_curvature(section: Section, omega: complex) -> float:
    """(|<g', g>|^2 - ||g'||^2 ||g||^2) / ||g||^4 on complex representations."""
    g = section.value(omega).to_complex()
    dg = section.derivative(omega).to_complex()
    norm_sq = float(np.vdot(g, g).real)
    if not norm_sq > 1e-280:
        raise VanishingSection(f"section vanishes at {omega}")
    cross = abs(np.vdot(g, dg)) ** 2
    return float((cross - np.vdot(dg, dg).real * norm_sq) / norm_sq ** 2)


def quaternionic_formula_curvature(section: Section, omega: complex) -> float:
    """The same quotient with the quaternionic inner product in place of the complex one.

    It is not the curvature in general.
    """
    g = section.value(omega)
    dg = section.derivative(omega)
    norm_sq = g.norm_sq()
    if not norm_sq > 1e-280:
        raise VanishingSection(f"section vanishes at {omega}")
    return float((inner(dg, g).norm_sq() - dg.norm_sq() * norm_sq) / norm_sq ** 2)


def curvature(section: Section, omega: complex, h: float = CURVATURE_STEP) -> CurvatureSample:
    """-d^2 log||g||^2 / dw dw-bar at omega.

    The returned value is -1/4 of the five-point Laplacian with one Richardson
    step (h, h/2); estimator_gap is its distance to formula_curvature.
    """
    omega = complex(omega)
    coarse = _laplacian(section, omega, h)
    fine = _laplacian(section, omega, h / 2.0)
    value = -0.25 * (4.0 * fine - coarse) / 3.0
    formula = formula_curvature(section, omega)
    return CurvatureSample(omega, float(value), float(abs(value - formula)), formula)


@dataclass
class CurvatureRow:
    omega: complex
    samples: Dict[str, CurvatureSample] = field(default_factory=dict)

    def values(self) -> Dict[str, float]:
        return {name: sample.value for name, sample in self.samples.items()}

    @property
    def max_gap(self) -> float:
        return max(sample.estimator_gap for sample in self.samples.values())


def curvature_grid(
    sections: Mapping[str, Section],
    points: Sequence[complex],
    h: float = CURVATURE_STEP,
    workers: int = 4,
    logger_factory: Optional[LoggerFactory] = None,
) -> List[CurvatureRow]:
    """Curvature of every named section at every point, one task per point."""

    def row(omega: complex) -> CurvatureRow:
        return CurvatureRow(omega, {name: curvature(section, omega, h) for name, section in sections.items()})

    orchestrator = SweepOrchestrator(max_workers=workers, logger_factory=logger_factory)
    return orchestrator.map(row, list(points), prefix="curvature")


def disc_grid(centre: complex, radius: float, steps: int, min_imag: Optional[float] = None) -> List[complex]:
    """Points of a steps x steps square grid that fall in the closed disc (and above min_imag)."""
    axis = np.linspace(-radius, radius, steps)
    points = []
    for y in axis:
        for x in axis:
            omega = complex(centre) + complex(x, y)
            if abs(omega - centre) <= radius + 1e-12 and (min_imag is None or omega.imag > min_imag):
                points.append(omega)
    return points


@dataclass
class ComplexRepResult:
    equivalent: bool
    u: Optional[QMatrix] = None
    w: Optional[np.ndarray] = None
    residual: float = float("nan")
    theta0: Optional[float] = None
    forward: Optional[bool] = None
    reason: str = ""


def _unit_phase(s1: np.ndarray, s2: np.ndarray, tol: float) -> Optional[complex]:
    """The unit complex f with s1 = f s2 entrywise, or None; 1 when both vanish."""
    scale = max(1.0, float(np.max(np.abs(s1))), float(np.max(np.abs(s2))))
    if np.max(np.abs(np.abs(s1) - np.abs(s2))) > tol * scale:
        return None
    mask = np.abs(s2) > tol * scale
    if not np.any(mask):
        return 1.0 + 0j
    total = np.sum(np.conj(s2[mask]) * s1[mask])
    f = total / abs(total)
    if np.max(np.abs(s1 - f * s2)) > tol * scale:
        return None
    return complex(f)


def _intertwiner_phase(w: np.ndarray, frame: JetFrame, tol: float) -> Optional[complex]:
    """The unit g with W (x j)_C = g ((W x_C)_q j)_C for every jet x of frame, or None."""
    jets = frame.all_jets()
    images = [w @ v.to_complex() for v in jets]
    carried = np.column_stack([w @ v.j_partner() for v in jets])
    partners = np.column_stack([QVector.from_complex(image).j_partner() for image in images])
    return _unit_phase(carried, partners, tol)


def complex_rep_equivalence(
    t1: QMatrix,
    t2: QMatrix,
    omega0: Quaternion,
    k: int,
    intertwiner: Optional[np.ndarray] = None,
    tol: float = CONGRUENCE_TOL,
    intertwine_tol: float = INTERTWINE_TOL,
    seed: int = 0,
    logger_factory: Optional[LoggerFactory] = None,
) -> ComplexRepResult:
    """Unitary equivalence of T1_C and T2_C on the jet spans, for rank one.

    Constructive direction: the normalized frames Psi, Psi~ must have equal
    complex Gram tables and j-parts related by one unit factor e^{i theta0}. Then
    V: Psi -> Psi~ e^{i theta0/2}, Psi j -> Psi~ j e^{-i theta0/2} commutes with
    right multiplication by j, so V = U_C for a quaternionic U.

    With a supplied intertwiner W, theta0 comes from W itself: W (x j)_C =
    e^{-i theta0} ((W x)_q j)_C on every jet, and U is built from
    V = W e^{i theta0/2} on the jet span. W = U0_C gives theta0 = 0; W e^{i phi}
    gives theta0 = -2 phi (mod 2 pi). A W that does not intertwine raises
    NoIntertwiner.

    Forward direction: a quaternionic U from operator_equivalence gives W = U_C.
    The two verdicts must agree.
    """
    logger = (logger_factory or get_default_factory()).create_logger("canonical")
    f1 = frame_from_right_inverse(t1, omega0, k, logger_factory=logger_factory)
    f2 = frame_from_right_inverse(t2, omega0, k, logger_factory=logger_factory)
    if f1.rank != 1 or f2.rank != 1:
        raise RankMismatch(f"complex representation test needs rank one, got {f1.rank} and {f2.rank}")

    w = None
    if intertwiner is not None:
        w = np.asarray(intertwiner, dtype=complex)
        q = span_basis(f1)
        misfit = np.linalg.norm((w @ t1.to_complex() - t2.to_complex() @ w) @ q, 2) / max(1.0, t1.norm2())
        if misfit > intertwine_tol:
            raise NoIntertwiner(f"supplied map misses the intertwining relation by {misfit:.3e}")

    forward = operator_equivalence(t1, t2, omega0, k, tol, intertwine_tol, seed, logger_factory)

    psi1, psi2 = normalize_frame(f1), normalize_frame(f2)
    result = ComplexRepResult(False, forward=forward.equivalent)
    target = None

    if w is not None:
        # W carries j-partners with one unit factor e^{-i theta0}; V = W e^{i theta0/2} commutes with j
        g = _intertwiner_phase(w, psi1, tol)
        if g is None:
            result.reason = "supplied map does not carry j-partners by a unit factor"
        else:
            theta0 = -cmath.phase(g) % (2 * math.pi)
            half = cmath.exp(0.5j * theta0)
            target = JetFrame.from_complex_jets(
                psi1.base, [w @ psi1.jet_matrix(m) * half for m in range(psi1.order + 1)], psi2.spectral_gap
            )
    else:
        h1, s1 = gauge_tables(psi1)
        h2, s2 = gauge_tables(psi2)
        h1, h2, s1, s2 = (np.block(table) for table in (h1, h2, s1, s2))
        scale = max(1.0, float(np.max(np.abs(h1))))
        if np.max(np.abs(h1 - h2)) > tol * scale:
            result.reason = "complex Gram tables differ"
        else:
            f = _unit_phase(s1, s2, tol)
            if f is None:
                result.reason = "j-parts are not related by a unit factor"
            else:
                theta0 = cmath.phase(f) % (2 * math.pi)
                half = cmath.exp(0.5j * theta0)
                target = JetFrame.from_complex_jets(
                    psi2.base, [psi2.jet_matrix(m) * half for m in range(psi2.order + 1)], psi2.spectral_gap
                )

    if target is not None:
        rigid = rigidity_check(psi1, target, tol, logger_factory)
        if rigid.congruent:
            residual = intertwining_residual(rigid.u, t1, t2, psi1)
            result.theta0 = theta0
            result.residual = residual
            if residual <= intertwine_tol:
                result.equivalent = True
                result.u = rigid.u
                result.w = w if w is not None else rigid.u.to_complex()
            else:
                result.reason = f"intertwining residual {residual:.3e}"
        else:
            result.reason = "phase-corrected frames not congruent"

    if forward.equivalent and result.w is None:
        result.w = forward.u.to_complex()
    if forward.equivalent != result.equivalent:
        logger.error(f"quaternionic verdict {forward.equivalent} disagrees with complex verdict {result.equivalent}")
    else:
        logger.debug(f"complex representation verdict {result.equivalent}")
    return result


@dataclass
class OrderStability:
    """Equivalence verdicts at jet orders K and 2K."""
    orders: List[int]
    quaternionic: List[bool]
    ad_theta: List[Optional[bool]]

    @property
    def stable(self) -> bool:
        return len(set(self.quaternionic)) == 1 and len(set(self.ad_theta)) == 1


def order_stability(
    t1: QMatrix,
    t2: QMatrix,
    omega0: Quaternion,
    k: int,
    tol: float = CONGRUENCE_TOL,
    intertwine_tol: float = INTERTWINE_TOL,
    seed: int = 0,
    logger_factory: Optional[LoggerFactory] = None,
) -> OrderStability:
    """Repeat the equivalence decisions at K and 2K; ad_theta is None for rank above one."""
    logger = (logger_factory or get_default_factory()).create_logger("canonical")
    if k < 1:
        raise ValueError(f"jet order must be at least 1, got {k}")
    report = OrderStability(orders=[k, 2 * k], quaternionic=[], ad_theta=[])
    for order in report.orders:
        forward = operator_equivalence(t1, t2, omega0, order, tol, intertwine_tol, seed, logger_factory)
        report.quaternionic.append(forward.equivalent)
        f1 = frame_from_right_inverse(t1, omega0, order, logger_factory=logger_factory)
        f2 = frame_from_right_inverse(t2, omega0, order, logger_factory=logger_factory)
        if f1.rank == 1 and f2.rank == 1:
            first = canonical_matrix(t1, omega0, order, frame=f1, logger_factory=logger_factory)
            second = canonical_matrix(t2, omega0, order, frame=f2, logger_factory=logger_factory)
            report.ad_theta.append(ad_theta_equivalent(first, second).equivalent)
        else:
            report.ad_theta.append(None)
    if not report.stable:
        logger.error(
            f"verdicts change between orders {report.orders}: "
            f"quaternionic {report.quaternionic}, ad_theta {report.ad_theta}"
        )
    return report
