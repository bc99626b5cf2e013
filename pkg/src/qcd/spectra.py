"""S-spectrum tests for truncated quaternionic operators.

The pencil T^2 - 2Re(s)T + |s|^2 I depends on s only through Re(s) and |s|,
so every computation here works on the complex representation of the pencil
and reports quaternionic dimensions as halved complex ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from banded import BandedOperator
from errors import DimensionMismatch, RealS
from logger import LoggerFactory, get_default_factory
from qcore import Quaternion, reduce, reduced_complex, symmetry_witness
from qlinalg import QMatrix, QVector, inner

MEMBERSHIP_TOL = 1e-8
PAIRING_TOL = 1e-8
DECAY_TOL = 0.25

Operator = Union[QMatrix, BandedOperator]


@dataclass
class PencilResult:
    s: Quaternion
    sigma_min: float
    kernel_dim_H: int
    kernel_basis: List[QVector] = field(default_factory=list)
    sigma_max: float = 0.0
    surjectivity: Optional[float] = None
    method: str = "square"
    n: int = 0

    @property
    def member(self) -> bool:
        return self.kernel_dim_H >= 1


@dataclass
class SpectralRadiusReport:
    estimate: float
    sequence: List[float]

    @property
    def monotone(self) -> bool:
        diffs = np.diff(self.sequence)
        return bool(np.all(diffs <= 1e-12) or np.all(diffs >= -1e-12))


def _real_scaled(a: QMatrix, c: float) -> QMatrix:
    return QMatrix(a.z1 * c, a.z2 * c)


def pencil(t: QMatrix, s: Quaternion) -> QMatrix:
    """T^2 - 2Re(s) T + |s|^2 I."""
    rows, cols = t.shape
    if rows != cols:
        raise DimensionMismatch(f"pencil of non-square matrix {t.shape}")
    s = Quaternion.coerce(s)
    return t @ t - _real_scaled(t, 2.0 * s.real) + _real_scaled(QMatrix.identity(rows), s.norm_sq())


def quaternionize(columns: np.ndarray, dim_h: int, floor: float = 1e-4) -> List[QVector]:
    """Orthonormal quaternionic vectors spanning a (nearly) J-closed complex subspace.

    Greedy: at each round the candidate column with the largest residual after
    right-projection onto the accepted vectors is normalized and kept.
    """
    candidates = [QVector.from_complex(columns[:, c]) for c in range(columns.shape[1])]
    basis: List[QVector] = []
    while len(basis) < dim_h and candidates:
        residuals = []
        for x in candidates:
            r = x
            for e in basis:
                r = r - e.rmul(inner(r, e))
            residuals.append(r)
        norms = [r.norm() for r in residuals]
        best = int(np.argmax(norms))
        if norms[best] < floor:
            break
        basis.append(residuals[best].scale(1.0 / norms[best]))
        candidates.pop(best)
    return basis


def _count_to_dim(count: int, where: str, logger) -> int:
    if count % 2:
        logger.error(f"odd complex kernel count {count} {where}; J-symmetry broken at this tolerance")
    return count // 2


def s_point_membership(
    t: Operator,
    s: Quaternion,
    tol: float = MEMBERSHIP_TOL,
    n: Optional[int] = None,
    decay_tol: float = DECAY_TOL,
    logger_factory: Optional[LoggerFactory] = None,
) -> PencilResult:
    """Kernel data of the pencil at s.

    Dense matrices use the square SVD rule: singular values below
    tol * sigma_max count as kernel. Banded operators are truncated to n and
    their l2 kernel is counted by decay: the null space of the interior rows
    of the truncated pencil is split into decaying and growing directions by
    the singular values of its tail block.
    """
    logger = (logger_factory or get_default_factory()).create_logger("spectra")
    s = Quaternion.coerce(s)
    if isinstance(t, BandedOperator):
        if n is None:
            raise ValueError("a truncation size n is required for banded operators")
        return _decay_membership(t, s, n, tol, decay_tol, logger)

    p_c = pencil(t, s).to_complex()
    _, sv, vh = np.linalg.svd(p_c)
    sigma_max = float(sv[0]) if sv.size else 0.0
    count = int(np.sum(sv < tol * sigma_max)) if sigma_max > 0 else sv.size
    dim_h = _count_to_dim(count, f"at s={s.to_text()}", logger)
    kernel = vh[sv.size - count:].conj().T if count else np.zeros((p_c.shape[1], 0))
    basis = quaternionize(kernel, dim_h) if dim_h else []
    logger.debug(f"s={s.to_text()} sigma_min={sv[-1]:.3e} kernel_dim_H={dim_h}")
    return PencilResult(
        s=s,
        sigma_min=float(sv[-1]),
        kernel_dim_H=dim_h,
        kernel_basis=basis,
        sigma_max=sigma_max,
        method="square",
        n=t.shape[0],
    )


def _decay_membership(op: BandedOperator, s: Quaternion, n: int, tol: float, decay_tol: float, logger) -> PencilResult:
    bw = op.bandwidth
    keep = n - 2 * bw
    if keep < n // 2 + 1:
        raise DimensionMismatch(f"truncation {n} too small for pencil bandwidth {2 * bw}")

    p_c = pencil(op.truncate(n), s).to_complex()
    square_sv = np.linalg.svd(p_c, compute_uv=False)

    rows = np.concatenate([np.arange(keep), n + np.arange(keep)])
    interior = p_c[rows, :]
    _, sv, vh = np.linalg.svd(interior)
    rank = int(np.sum(sv > tol * sv[0]))
    null = vh[rank:].conj().T
    surjectivity = float(sv[rank - 1]) if rank else 0.0

    tail = np.concatenate([np.arange(n // 2, n), n + np.arange(n // 2, n)])
    _, tail_sv, tail_vh = np.linalg.svd(null[tail, :])
    padded = np.zeros(null.shape[1])
    padded[: tail_sv.size] = tail_sv
    decaying = padded < decay_tol
    count = int(np.sum(decaying))
    dim_h = _count_to_dim(count, f"at s={s.to_text()}, n={n}", logger)

    kernel = null @ tail_vh.conj().T[:, decaying]
    basis = quaternionize(kernel, dim_h) if dim_h else []
    logger.debug(
        f"{op.name} n={n} s={s.to_text()} null={null.shape[1]} decaying={count} "
        f"sigma_min={square_sv[-1]:.3e} surjectivity={surjectivity:.3e}"
    )
    return PencilResult(
        s=s,
        sigma_min=float(square_sv[-1]),
        kernel_dim_H=dim_h,
        kernel_basis=basis,
        sigma_max=float(square_sv[0]),
        surjectivity=surjectivity,
        method="decay",
        n=n,
    )


def right_eigen_classes(
    a: QMatrix,
    tol: float = PAIRING_TOL,
    logger_factory: Optional[LoggerFactory] = None,
) -> List[Quaternion]:
    """Canonical representatives Re + i|Im| of the right eigenvalue spheres of a.

    Eigenvalues of A_C come in pairs (lambda, conj(lambda)); each pair gives one
    sphere. Unpaired leftovers are logged and still reported.
    """
    logger = (logger_factory or get_default_factory()).create_logger("spectra")
    rows, cols = a.shape
    if rows != cols:
        raise DimensionMismatch(f"eigenvalues of non-square matrix {a.shape}")

    eig = np.linalg.eigvals(a.to_complex())
    used = np.zeros(eig.size, dtype=bool)
    reps: List[complex] = []
    for i in np.argsort(-eig.imag, kind="stable"):
        if used[i]:
            continue
        used[i] = True
        lam = eig[i]
        distance = np.where(used, np.inf, np.abs(eig - np.conj(lam)))
        j = int(np.argmin(distance))
        if distance[j] <= tol * max(1.0, abs(lam)):
            used[j] = True
        else:
            logger.error(f"unpaired eigenvalue {lam:.6g} of the complex representation")
        reps.append(complex(lam.real, abs(lam.imag)))

    classes: List[complex] = []
    for z in sorted(reps, key=lambda z: (z.real, z.imag)):
        if not any(abs(z - c) <= tol * max(1.0, abs(z)) for c in classes):
            classes.append(z)
    return [Quaternion.coerce(z) for z in classes]


def classes_match(first: Sequence[Quaternion], second: Sequence[Quaternion], tol: float = 1e-8) -> bool:
    """Set equality of two class lists up to tol."""
    if len(first) != len(second):
        return False
    return all(any(abs(p - q) <= tol * max(1.0, abs(p)) for q in second) for p in first) and all(
        any(abs(p - q) <= tol * max(1.0, abs(p)) for p in first) for q in second
    )


def similarity_invariance(a: QMatrix, q: QMatrix, tol: float = 1e-8) -> bool:
    """True when a and Q a Q^-1 have the same right eigenvalue classes."""
    q_inv = QMatrix.from_complex(np.linalg.inv(q.to_complex()), tol=1e-8)
    return classes_match(right_eigen_classes(a), right_eigen_classes(q @ a @ q_inv), tol)


def right_eigenvectors(t: QMatrix, omega: Quaternion, tol: float = MEMBERSHIP_TOL) -> List[QVector]:
    """A C_{I_omega}-basis of ker(T - I omega).

    For reduced omega this is the complex kernel of T_C - omega; other points of
    the sphere are reached by transporting with symmetry_witness.
    """
    omega = Quaternion.coerce(omega)
    w = reduced_complex(omega)
    m = t.to_complex() - w * np.eye(2 * t.shape[0])
    sv = np.linalg.svd(m, compute_uv=False)
    null = scipy.linalg.null_space(m, rcond=tol if sv[0] > 0 else 1.0)
    vectors = [QVector.from_complex(null[:, c]) for c in range(null.shape[1])]
    red = reduce(omega)
    if red.isclose(omega):
        return vectors
    q = symmetry_witness(red, omega)
    return [x.rmul(q) for x in vectors]


def transport_eigenvector(x: QVector, omega: Quaternion, q: Quaternion):
    """If T x = x omega then T (x q) = (x q)(q^-1 omega q)."""
    return x.rmul(q), q.inverse() * omega * q


@dataclass
class KernelSplit:
    u: QVector
    v: QVector
    q: Quaternion
    residual: float


def kernel_split(t: QMatrix, omega: Quaternion, x: QVector) -> KernelSplit:
    """Split x in ker(pencil) as x = (u - v q)(omega - conj(omega))^-1 with u, v in ker(T - I omega)."""
    omega = Quaternion.coerce(omega)
    if omega.imag_norm == 0.0:
        raise RealS(f"kernel split needs a non-real point, got {omega.to_text()}")
    tx = t @ x
    u = tx - x.rmul(omega.conj())
    w = symmetry_witness(omega.conj(), omega)
    v = (tx - x.rmul(omega)).rmul(w)
    q = w.inverse()
    rebuilt = (u - v.rmul(q)).rmul((omega - omega.conj()).inverse())
    return KernelSplit(u=u, v=v, q=q, residual=(rebuilt - x).norm())


def s_radius_estimate(t: Operator, n: int, m_max: int) -> SpectralRadiusReport:
    """||T_N^m||^{1/m} for m = 1..m_max; the estimate is the last term."""
    if m_max < 1:
        raise ValueError(f"m_max must be at least 1, got {m_max}")
    matrix = t.truncate(n) if isinstance(t, BandedOperator) else t
    t_c = matrix.to_complex()
    power = np.eye(t_c.shape[0], dtype=complex)
    sequence = []
    for m in range(1, m_max + 1):
        power = power @ t_c
        sequence.append(float(np.linalg.norm(power, 2)) ** (1.0 / m))
    return SpectralRadiusReport(estimate=sequence[-1], sequence=sequence)


@dataclass
class TruncationTrend:
    s: Quaternion
    sizes: List[int]
    sigma_mins: List[float]
    kernel_dims: List[int]

    @property
    def monotone(self) -> bool:
        return all(b <= a * (1 + 1e-9) for a, b in zip(self.sigma_mins, self.sigma_mins[1:]))

    @property
    def stable_dimension(self) -> bool:
        return len(set(self.kernel_dims)) == 1


def sigma_min_trend(
    op: BandedOperator,
    s: Quaternion,
    sizes: Sequence[int],
    tol: float = MEMBERSHIP_TOL,
    decay_tol: float = DECAY_TOL,
    logger_factory: Optional[LoggerFactory] = None,
) -> TruncationTrend:
    """sigma_min and kernel dimension of the pencil across growing truncations."""
    results = [s_point_membership(op, s, tol, n=n, decay_tol=decay_tol, logger_factory=logger_factory) for n in sizes]
    return TruncationTrend(
        s=Quaternion.coerce(s),
        sizes=list(sizes),
        sigma_mins=[r.sigma_min for r in results],
        kernel_dims=[r.kernel_dim_H for r in results],
    )
