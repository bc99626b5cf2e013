"""Backward unilateral weighted shifts.

Weights are indexed from 1 and the truncated vector x = (x_1, ..., x_N) is
stored 0-based, so x_{n} lives at index n-1. Row n of the pencil reads

    |s|^2 x_n - 2Re(s) w_n x_{n+1} + w_n w_{n+1} x_{n+2} = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from banded import BandedOperator, WeightRule
from errors import RealS, ZeroWeight
from logger import LoggerFactory, get_default_factory
from qcore import ZERO, Quaternion, reduced_complex
from qlinalg import QMatrix, QVector
from spectra import DECAY_TOL, MEMBERSHIP_TOL, s_point_membership
from sweep_orchestrator import SweepOrchestrator


def shift_operator(weights: WeightRule, diag: Quaternion = ZERO, name: str = "shift") -> BandedOperator:
    return BandedOperator(diag=diag, weights=weights, name=name)


def positivize(w: WeightRule, n: int) -> Tuple[QMatrix, WeightRule]:
    """Diagonal unitary X with T X = X T~, T~ carrying the weights |w_n|.

    X e_0 = e_0 and X e_m = e_m (conj(w_m)/|w_m|) ... (conj(w_1)/|w_1|).
    """
    entries = [Quaternion(1.0)]
    for m in range(1, n):
        weight = w(m)
        modulus = abs(weight)
        if modulus == 0.0:
            raise ZeroWeight(f"weight w_{m} vanishes")
        unit = weight.conj() * (1.0 / modulus)
        entries.append(unit * entries[-1])
    return QMatrix.diag(entries), w.absolute()


def _check_positive(w: WeightRule, count: int) -> np.ndarray:
    values = []
    for m in range(1, count + 1):
        weight = w(m)
        if not weight.is_complex(0.0) or weight.a1 != 0.0 or weight.a0 <= 0.0:
            raise ZeroWeight(f"weight w_{m} = {weight.to_text()} is not a positive real")
        values.append(weight.a0)
    return np.array(values)


def s_eigvec_closed_form(w: WeightRule, s: Quaternion, x1: Quaternion, x2: Quaternion, n: int) -> QVector:
    """Closed-form solution of the pencil rows for positive weights.

    x_{m+1} = [U_m w_1 x_2 - |s|^2 U_{m-1} x_1] / (w_1 ... w_m),  U_m = Im(s^m)/Im(s),

    with s replaced by its reduced complex representative (U_m is real and
    depends only on Re(s) and |s|).
    """
    s = Quaternion.coerce(s)
    if s.imag_norm == 0.0:
        raise RealS(f"closed form needs a non-real s, got {s.to_text()}")
    x1, x2 = Quaternion.coerce(x1), Quaternion.coerce(x2)
    weights = _check_positive(w, max(n - 1, 1))
    sr = reduced_complex(s)
    modulus_sq = abs(sr) ** 2

    # U_0 .. U_{n-1}
    powers = np.cumprod(np.full(n, sr))
    u = np.concatenate([[0.0], powers.imag[: n - 1] / sr.imag])
    a = np.zeros(n)
    b = np.zeros(n)
    a[0], b[0] = 0.0, 1.0
    products = np.cumprod(weights)
    for m in range(1, n):
        a[m] = u[m] * weights[0] / products[m - 1]
        b[m] = -modulus_sq * u[m - 1] / products[m - 1]

    p1, p2 = x1.split(), x2.split()
    return QVector(a * p2[0] + b * p1[0], a * p2[1] + b * p1[1])


def s_eigvec_recurrence(w: WeightRule, s: Quaternion, x1: Quaternion, x2: Quaternion, n: int) -> QVector:
    """Row-by-row solution x_{m+2} = w_{m+1}^-1 w_m^-1 (2Re(s) w_m x_{m+1} - |s|^2 x_m)."""
    s = Quaternion.coerce(s)
    entries = [Quaternion.coerce(x1), Quaternion.coerce(x2)]
    for m in range(1, n - 1):
        wm, wm1 = w(m), w(m + 1)
        rhs = wm * entries[m] * (2.0 * s.real) - entries[m - 1] * s.norm_sq()
        entries.append(wm1.inverse() * (wm.inverse() * rhs))
    return QVector.from_quaternions(entries[:n])


def geometric_eigvec(w: WeightRule, s: Quaternion, n: int) -> QVector:
    """(1, s/w_1, s^2/(w_1 w_2), ...), a right eigenvector T x = x s for positive weights."""
    s = Quaternion.coerce(s)
    weights = _check_positive(w, max(n - 1, 1))
    entries = [Quaternion(1.0)]
    for m in range(1, n):
        entries.append(entries[-1] * s * (1.0 / weights[m - 1]))
    return QVector.from_quaternions(entries)


@dataclass
class RspReport:
    estimate: float
    sequence: List[float]


def rsp(w: WeightRule, n_max: int) -> RspReport:
    """Estimate liminf |w_1 ... w_n|^{1/n} by the infimum over the last half of n = 1..n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    moduli = w.moduli(n_max)
    if np.any(moduli == 0.0):
        return RspReport(estimate=0.0, sequence=[0.0] * n_max)
    # base 2 keeps powers of two exact
    log_products = np.cumsum(np.log2(moduli))
    sequence = np.exp2(log_products / np.arange(1, n_max + 1))
    tail = sequence[n_max // 2:] if n_max > 1 else sequence
    return RspReport(estimate=float(np.min(tail)), sequence=[float(v) for v in sequence])


@dataclass
class ProbeRow:
    sample: Quaternion
    n: int
    kernel_dim_H: int
    sigma_min: float
    surjectivity: Optional[float]


@dataclass
class ProbeReport:
    operator: str
    rows: List[ProbeRow] = field(default_factory=list)
    stable: Dict[str, bool] = field(default_factory=dict)
    n: Optional[int] = None


def bn_probe(
    op: BandedOperator,
    samples: Sequence[Quaternion],
    sizes: Sequence[int],
    tol: float = MEMBERSHIP_TOL,
    decay_tol: float = DECAY_TOL,
    workers: int = 4,
    logger_factory: Optional[LoggerFactory] = None,
) -> ProbeReport:
    """Kernel dimension of the pencil over samples x truncations.

    A sample is stable when its kernel dimension is the same over at least three
    truncations; the class index n is reported when every sample is stable with
    one common dimension.
    """
    factory = logger_factory or get_default_factory()
    logger = factory.create_logger("shifts")
    samples = [Quaternion.coerce(s) for s in samples]
    for s in samples:
        if s.imag_norm == 0.0:
            raise RealS(f"probe samples must be non-real, got {s.to_text()}")

    tasks = {}
    for index, s in enumerate(samples):
        for size in sizes:
            tasks[f"s{index}-n{size}"] = (
                lambda s=s, size=size: s_point_membership(op, s, tol, n=size, decay_tol=decay_tol, logger_factory=factory)
            )
    results = SweepOrchestrator(max_workers=workers, logger_factory=factory).run(tasks)

    report = ProbeReport(operator=op.name)
    dims = set()
    for index, s in enumerate(samples):
        sample_dims = []
        for size in sizes:
            result = results[f"s{index}-n{size}"]
            report.rows.append(ProbeRow(s, size, result.kernel_dim_H, result.sigma_min, result.surjectivity))
            sample_dims.append(result.kernel_dim_H)
        stable = len(sizes) >= 3 and len(set(sample_dims)) == 1
        report.stable[s.to_text()] = stable
        if len(set(sample_dims)) > 1:
            logger.log(f"{op.name}: kernel dimension at {s.to_text()} varies with truncation: {sample_dims}")
        elif not stable:
            logger.log(f"{op.name}: too few truncations at {s.to_text()} ({len(sizes)} < 3): {sample_dims}")
        dims.update(sample_dims)

    if samples and all(report.stable.values()) and len(dims) == 1:
        report.n = dims.pop()
    logger.log(f"{op.name}: probe over {len(samples)} samples gives n={report.n}")
    return report
