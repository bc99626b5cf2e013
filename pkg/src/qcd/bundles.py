"""Right-holomorphic frames as truncated jets, Gram data and rigidity.

A frame of rank n at a reduced base point w0 is stored as jets[i][k], the k-th
derivative of the i-th section at w0. Complex coefficients act on the right
of quaternionic vectors, so a complex gauge g(w) acts on the stacked complex
representations as a right matrix multiplication.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from errors import EmptyKernel, IllConditioned, RankMismatch, RealS, SizeMismatch
from logger import LoggerFactory, get_default_factory
from qcore import Quaternion, reduce, reduced_complex
from qlinalg import QMatrix, QVector, complex_columns, quaternionic_rank
from spectra import pencil

PINV_CUTOFF = 1e-10
GAP_TOL = 1e-6
GUARD_TOL = 1e-2
GUARD_RADIUS = 0.25
CONGRUENCE_TOL = 1e-8
INTERTWINE_TOL = 1e-8

# y_C^T J x_C is the j-part of <x, y>
def _j_form(n: int) -> np.ndarray:
    return np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])


@dataclass
class JetFrame:
    base: Quaternion
    order: int
    jets: List[List[QVector]]
    spectral_gap: float = float("nan")

    @property
    def rank(self) -> int:
        return len(self.jets)

    @property
    def size(self) -> int:
        return len(self.jets[0][0])

    @property
    def base_complex(self) -> complex:
        return reduced_complex(self.base)

    def jet_matrix(self, k: int) -> np.ndarray:
        """2N x n complex matrix of the k-th jets."""
        return np.column_stack([self.jets[i][k].to_complex() for i in range(self.rank)])

    def stacked(self) -> np.ndarray:
        """2N x n(K+1) matrix, column m*n + i holding jet m of section i."""
        return np.column_stack([self.jet_matrix(m) for m in range(self.order + 1)])

    def all_jets(self) -> List[QVector]:
        return [self.jets[i][m] for m in range(self.order + 1) for i in range(self.rank)]

    def evaluate(self, omega: complex) -> List[QVector]:
        """Truncated Taylor sums sum_k jet_k (omega - w0)^k / k!."""
        delta = complex(omega) - self.base_complex
        return [
            _combine(section, [delta ** k / math.factorial(k) for k in range(self.order + 1)])
            for section in self.jets
        ]

    def derivative_at(self, omega: complex) -> List[QVector]:
        delta = complex(omega) - self.base_complex
        coeffs = [0.0] + [delta ** (k - 1) / math.factorial(k - 1) for k in range(1, self.order + 1)]
        return [_combine(section, coeffs) for section in self.jets]

    def regauge(self, f_coeffs: Sequence[complex]) -> "JetFrame":
        """Frame of gamma(w) f(w) with f(w) = sum_l f_coeffs[l] (w - w0)^l.

        Leibniz: (gamma f)^(m) = sum_l C(m, l) gamma^(m-l) f^(l).
        """
        derivs = [complex(c) * math.factorial(l) for l, c in enumerate(f_coeffs)]
        derivs += [0j] * (self.order + 1 - len(derivs))
        jets = []
        for section in self.jets:
            new = []
            for m in range(self.order + 1):
                coeffs = [0j] * (self.order + 1)
                for l in range(m + 1):
                    coeffs[m - l] += math.comb(m, l) * derivs[l]
                new.append(_combine(section, coeffs))
            jets.append(new)
        return JetFrame(self.base, self.order, jets, self.spectral_gap)

    def transported(self, u: QMatrix) -> "JetFrame":
        return JetFrame(self.base, self.order, [[u @ v for v in section] for section in self.jets], self.spectral_gap)

    @classmethod
    def from_complex_jets(cls, base: Quaternion, blocks: Sequence[np.ndarray], spectral_gap: float = float("nan")) -> "JetFrame":
        """Inverse of jet_matrix: blocks[m] is the 2N x n matrix of m-th jets."""
        n = blocks[0].shape[1]
        jets = [[QVector.from_complex(blocks[m][:, i]) for m in range(len(blocks))] for i in range(n)]
        return cls(base, len(blocks) - 1, jets, spectral_gap)


def _combine(vectors: Sequence[QVector], coeffs: Sequence[complex]) -> QVector:
    total = np.zeros(2 * len(vectors[0]), dtype=complex)
    for v, c in zip(vectors, coeffs):
        if c != 0:
            total = total + v.to_complex() * c
    return QVector.from_complex(total)


def _phase_normalized(columns: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive."""
    out = columns.copy()
    for c in range(out.shape[1]):
        pivot = out[int(np.argmax(np.abs(out[:, c]))), c]
        out[:, c] *= np.conj(pivot) / abs(pivot)
    return out


def frame_from_right_inverse(
    t: QMatrix,
    omega0: Quaternion,
    k: int,
    cutoff: float = PINV_CUTOFF,
    gap: float = GAP_TOL,
    guard: float = GUARD_TOL,
    radius: float = GUARD_RADIUS,
    logger_factory: Optional[LoggerFactory] = None,
) -> JetFrame:
    """Jets gamma_i^(k)(w0) = k! (X^k x_i)_H with X the minimum-norm right inverse of T_C - w0.

    The kernel basis x_i is the complex null space of T_C - w0, each vector
    phase-normalized. Raises EmptyKernel without kernel and IllConditioned when
    the retained spectrum or the truncation guard is too small.
    """
    logger = (logger_factory or get_default_factory()).create_logger("bundles")
    omega0 = Quaternion.coerce(omega0)
    if omega0.imag_norm == 0.0:
        raise RealS(f"frames need a non-real base point, got {omega0.to_text()}")
    base = reduce(omega0)
    if not base.isclose(omega0):
        logger.log(f"base point {omega0.to_text()} replaced by its reduced form {base.to_text()}")
    w0 = reduced_complex(base)

    m = t.to_complex() - w0 * np.eye(2 * t.shape[0])
    u, sv, vh = np.linalg.svd(m)
    sigma_max = float(sv[0])
    retained = int(np.sum(sv >= cutoff * sigma_max))
    nullity = sv.size - retained
    if nullity == 0:
        raise EmptyKernel(f"T_C - {w0} has no kernel (sigma_min={sv[-1]:.3e})")
    smallest = float(sv[retained - 1])
    if smallest < gap * sigma_max:
        raise IllConditioned(f"spectral gap {smallest / sigma_max:.3e} below {gap:.1e} at {w0}")

    kernel = _phase_normalized(vh[retained:].conj().T)
    x_inv = (vh[:retained].conj().T / sv[:retained]) @ u[:, :retained].conj().T

    blocks = [kernel]
    for order in range(1, k + 1):
        blocks.append(order * (x_inv @ blocks[-1]))

    for i in range(nullity):
        lead = np.linalg.norm(blocks[0][:, i])
        tail = np.linalg.norm(blocks[k][:, i]) * radius ** k / math.factorial(k)
        if tail > guard * lead:
            logger.error(f"truncation guard failed for section {i}: {tail:.3e} > {guard:.1e} * {lead:.3e}")
            raise IllConditioned(f"jet order {k} not trustworthy at radius {radius}")

    logger.debug(f"frame at {w0}: rank {nullity}, order {k}, gap {smallest / sigma_max:.3e}")
    return JetFrame.from_complex_jets(base, blocks, spectral_gap=smallest / sigma_max)


@dataclass
class DerivativeReport:
    first_order: List[float]
    pencil_order: List[float]
    power: List[float]

    @property
    def max_residual(self) -> float:
        return max(self.first_order + self.pencil_order + self.power, default=0.0)


def derivative_identity_check(t: QMatrix, frame: JetFrame, power_max: int = 3) -> DerivativeReport:
    """Relative residuals of

        T g^(k) - g^(k) w0 - k g^(k-1),
        P g^(k) - k(k-1) g^(k-2) - k g^(k-1)(w0 - conj(w0)),
        P^k g^(k) - k! g (w0 - conj(w0))^k,

    where P is the pencil at w0, taken over every section and k <= K.
    """
    w0 = frame.base_complex
    t_c = t.to_complex()
    p_c = pencil(t, frame.base).to_complex()
    two_im = w0 - np.conj(w0)
    first, second, power = [], [], []
    for section in frame.jets:
        g = [v.to_complex() for v in section]
        for k in range(frame.order + 1):
            scale = max(1.0, np.linalg.norm(g[k]))
            r1 = t_c @ g[k] - g[k] * w0 - (k * g[k - 1] if k else 0)
            first.append(float(np.linalg.norm(r1) / scale))
            r2 = p_c @ g[k]
            if k >= 1:
                r2 = r2 - k * g[k - 1] * two_im
            if k >= 2:
                r2 = r2 - k * (k - 1) * g[k - 2]
            second.append(float(np.linalg.norm(r2) / scale))
        for k in range(1, min(power_max, frame.order) + 1):
            lhs = np.linalg.matrix_power(p_c, k) @ g[k]
            rhs = math.factorial(k) * g[0] * two_im ** k
            power.append(float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs))))
    return DerivativeReport(first, second, power)


@dataclass
class JetBasisReport:
    k: int
    rank: int
    expected_rank: int
    kernel_residual: float

    @property
    def ok(self) -> bool:
        return self.rank == self.expected_rank and self.kernel_residual <= 1e-8


def jet_basis_check(t: QMatrix, frame: JetFrame, k: int, tol: float = 1e-8) -> JetBasisReport:
    """Do the jets of order < k have H-rank n k and lie in ker(P^k)?"""
    if k < 1 or k > frame.order + 1:
        raise ValueError(f"k must lie in 1..{frame.order + 1}, got {k}")
    vectors = [frame.jets[i][m] for m in range(k) for i in range(frame.rank)]
    rank = quaternionic_rank(vectors, tol)
    p_k = np.linalg.matrix_power(pencil(t, frame.base).to_complex(), k)
    scale = np.linalg.norm(p_k, 2)
    residual = max(np.linalg.norm(p_k @ v.to_complex()) / (scale * v.norm()) for v in vectors)
    return JetBasisReport(k=k, rank=rank, expected_rank=frame.rank * k, kernel_residual=float(residual))


def pencil_matrix_on_jets(t: QMatrix, frame: JetFrame, k: int) -> np.ndarray:
    """Complex k x k matrix C with P [g, ..., g^(k-1)] = [g, ..., g^(k-1)] C for a rank-one frame."""
    if frame.rank != 1:
        raise RankMismatch(f"pencil matrix on jets needs a rank-one frame, got rank {frame.rank}")
    basis = np.column_stack([frame.jets[0][m].to_complex() for m in range(k)])
    image = pencil(t, frame.base).to_complex() @ basis
    coeffs, *_ = np.linalg.lstsq(basis, image, rcond=None)
    return coeffs


def expected_pencil_matrix(omega0: complex, k: int) -> np.ndarray:
    """Superdiagonal m (w0 - conj(w0)), second superdiagonal m (m - 1)."""
    c = np.zeros((k, k), dtype=complex)
    for m in range(1, k):
        c[m - 1, m] = m * (omega0 - np.conj(omega0))
        if m >= 2:
            c[m - 2, m] = m * (m - 1)
    return c


@dataclass
class GramData:
    """Complex part H and j-part S of <g_i^(m), g_j^(k)>, indexed [m, k, i, j]."""
    complex_part: np.ndarray
    j_part: np.ndarray

    @property
    def order(self) -> int:
        return self.complex_part.shape[0] - 1

    @property
    def rank(self) -> int:
        return self.complex_part.shape[2]

    def entry(self, m: int, k: int, i: int, j: int) -> Quaternion:
        return Quaternion.from_complex_pair(self.complex_part[m, k, i, j], self.j_part[m, k, i, j])

    def scale(self) -> np.ndarray:
        """max(1, ||g_i^(m)|| ||g_j^(k)||) per entry, the Cauchy-Schwarz bound of |G[m][k][i][j]|."""
        norms = np.sqrt(np.abs(np.einsum("mmii->mi", self.complex_part.real)))
        return np.maximum(1.0, np.einsum("mi,kj->mkij", norms, norms))

    def symmetry_residual(self) -> float:
        """max |G[m][k][i][j] - conj(G[k][m][j][i])|."""
        h_t = np.conj(np.transpose(self.complex_part, (1, 0, 3, 2)))
        s_t = -np.transpose(self.j_part, (1, 0, 3, 2))
        return float(max(np.max(np.abs(self.complex_part - h_t)), np.max(np.abs(self.j_part - s_t))))

    def base_block_positive(self) -> bool:
        block = self.complex_part[0, 0]
        return bool(np.all(np.linalg.eigvalsh((block + block.conj().T) / 2) > 0))

    def perturbed(self, m: int, k: int, i: int, j: int, delta: complex) -> "GramData":
        h = self.complex_part.copy()
        h[m, k, i, j] += delta
        return GramData(h, self.j_part.copy())


def gram_data(frame: JetFrame) -> GramData:
    b = frame.stacked()
    n, order = frame.rank, frame.order
    z1 = b.conj().T @ b
    z2 = b.T @ _j_form(frame.size) @ b
    h = np.zeros((order + 1, order + 1, n, n), dtype=complex)
    s = np.zeros_like(h)
    for m in range(order + 1):
        for k in range(order + 1):
            for i in range(n):
                for j in range(n):
                    h[m, k, i, j] = z1[k * n + j, m * n + i]
                    s[m, k, i, j] = z2[k * n + j, m * n + i]
    return GramData(h, s)


@dataclass
class Congruence:
    congruent: bool
    base_deviation: float
    full_deviation: float
    full_table_agrees: bool = True


def gram_congruent(first: GramData, second: GramData, tol: float = CONGRUENCE_TOL) -> Congruence:
    """Decide from <g_i^(m), g_j> for m <= K; every (m, k) is compared as a separate cross-check.

    Deviations are measured entrywise against max(1, ||g_i^(m)|| ||g_j^(k)||).
    """
    if first.complex_part.shape != second.complex_part.shape:
        raise RankMismatch(f"Gram tables of shapes {first.complex_part.shape} and {second.complex_part.shape}")
    scale = np.maximum(first.scale(), second.scale())
    diff_h = np.abs(first.complex_part - second.complex_part) / scale
    diff_s = np.abs(first.j_part - second.j_part) / scale
    base = float(max(np.max(diff_h[:, 0]), np.max(diff_s[:, 0])))
    full = float(max(np.max(diff_h), np.max(diff_s)))
    return Congruence(congruent=base <= tol, base_deviation=base, full_deviation=full, full_table_agrees=full <= tol)


@dataclass
class RigidityResult:
    congruent: bool
    u: Optional[QMatrix]
    base_deviation: float
    full_deviation: float
    isometry_residual: float = float("nan")
    full_table_agrees: bool = True


def _check_compatible(first: JetFrame, second: JetFrame) -> None:
    if first.rank != second.rank:
        raise RankMismatch(f"frames of rank {first.rank} and {second.rank}")
    if first.order != second.order or not first.base.isclose(second.base) or first.size != second.size:
        raise SizeMismatch("frames differ in base point, order or truncation")


def rigidity_check(
    first: JetFrame,
    second: JetFrame,
    tol: float = CONGRUENCE_TOL,
    logger_factory: Optional[LoggerFactory] = None,
) -> RigidityResult:
    """Decide congruence of two frames from their Gram data.

    When congruent, U is the partial isometry g_i^(m) -> g~_i^(m) on the jet
    span (zero on its orthogonal complement).
    """
    logger = (logger_factory or get_default_factory()).create_logger("bundles")
    _check_compatible(first, second)
    verdict = gram_congruent(gram_data(first), gram_data(second), tol)
    if verdict.congruent and not verdict.full_table_agrees:
        logger.error(f"base Gram data agree but full table deviates by {verdict.full_deviation:.3e}")
    if not verdict.congruent:
        logger.debug(f"frames not congruent: deviation {verdict.base_deviation:.3e}")
        return RigidityResult(False, None, verdict.base_deviation, verdict.full_deviation,
                              full_table_agrees=verdict.full_table_agrees)

    b1 = complex_columns(first.all_jets())
    b2 = complex_columns(second.all_jets())
    u_c = b2 @ np.linalg.pinv(b1, rcond=PINV_CUTOFF)
    u = QMatrix.from_complex(u_c, tol=1e-6)
    residual = float(np.linalg.norm(u_c @ b1 - b2) / max(1.0, np.linalg.norm(b2)))
    return RigidityResult(True, u, verdict.base_deviation, verdict.full_deviation, residual, verdict.full_table_agrees)


def normalize_frame(frame: JetFrame) -> JetFrame:
    """Gauge-fix a frame: Psi_0^H Psi_0 = I and Psi_0^H Psi_m = 0 for m >= 1.

    Psi = Gamma g with g_0 = (G_00)^{-1/2} and
    g_m = -G_00^{-1} sum_{l>=1} C(m, l) Gamma_0^H Gamma_l g_{m-l};
    the result is unique up to a constant unitary on the right.
    """
    gammas = [frame.jet_matrix(m) for m in range(frame.order + 1)]
    g00 = gammas[0].conj().T @ gammas[0]
    evals, evecs = np.linalg.eigh(g00)
    if np.min(evals) <= 0:
        raise IllConditioned("frame sections are dependent at the base point")
    g = [evecs @ np.diag(evals ** -0.5) @ evecs.conj().T]
    g00_inv = np.linalg.inv(g00)
    for m in range(1, frame.order + 1):
        acc = sum(math.comb(m, l) * (gammas[0].conj().T @ gammas[l]) @ g[m - l] for l in range(1, m + 1))
        g.append(-g00_inv @ acc)
    psi = [sum(math.comb(m, l) * gammas[l] @ g[m - l] for l in range(m + 1)) for m in range(frame.order + 1)]
    return JetFrame.from_complex_jets(frame.base, psi, frame.spectral_gap)


def gauge_tables(frame: JetFrame) -> Tuple[List[List[np.ndarray]], List[List[np.ndarray]]]:
    """H[k][m] = Psi_k^H Psi_m and S[k][m] = Psi_k^T J Psi_m (n x n each)."""
    blocks = [frame.jet_matrix(m) for m in range(frame.order + 1)]
    jf = _j_form(frame.size)
    h = [[bk.conj().T @ bm for bm in blocks] for bk in blocks]
    s = [[bk.T @ jf @ bm for bm in blocks] for bk in blocks]
    return h, s


def solve_frame_unitary(
    first: JetFrame,
    second: JetFrame,
    tol: float = CONGRUENCE_TOL,
    seed: int = 0,
) -> Optional[np.ndarray]:
    """Unitary W with H2 = W^H H1 W and S2 = W^T S1 W on normalized frames, or None.

    The conditions H1 W = W H2 and S1 W = conj(W) S2 are real-linear in W; a
    generic element of their null space is replaced by its polar factor.
    """
    h1, s1 = gauge_tables(first)
    h2, s2 = gauge_tables(second)
    n = first.rank

    def residual(w: np.ndarray) -> np.ndarray:
        parts = []
        for k in range(first.order + 1):
            for m in range(first.order + 1):
                weight = 1.0 / max(1.0, np.max(np.abs(h1[k][m])), np.max(np.abs(s1[k][m])))
                parts.append(((h1[k][m] @ w - w @ h2[k][m]) * weight).ravel())
                parts.append(((s1[k][m] @ w - np.conj(w) @ s2[k][m]) * weight).ravel())
        flat = np.concatenate(parts)
        return np.concatenate([flat.real, flat.imag])

    columns = []
    for index in range(2 * n * n):
        unit = np.zeros(2 * n * n)
        unit[index] = 1.0
        w = (unit[: n * n] + 1j * unit[n * n:]).reshape(n, n)
        columns.append(residual(w))
    system = np.column_stack(columns)
    sv = np.linalg.svd(system, compute_uv=False)
    null = scipy.linalg.null_space(system, rcond=tol * 10)
    if null.shape[1] == 0 or sv[0] == 0:
        return None
    rng = np.random.default_rng(seed)
    combo = null @ rng.standard_normal(null.shape[1])
    w = (combo[: n * n] + 1j * combo[n * n:]).reshape(n, n)
    unitary, _ = scipy.linalg.polar(w)
    if np.max(np.abs(residual(unitary))) > 1e3 * tol:
        return None
    return unitary


@dataclass
class EquivalenceResult:
    equivalent: bool
    u: Optional[QMatrix] = None
    residual: float = float("nan")
    reason: str = ""
    details: dict = field(default_factory=dict)


def span_basis(frame: JetFrame) -> np.ndarray:
    """Orthonormal complex basis of the J-closed span of every jet."""
    q, r = np.linalg.qr(complex_columns(frame.all_jets()))
    keep = np.abs(np.diag(r)) > 1e-10 * max(1.0, np.max(np.abs(np.diag(r))))
    return q[:, keep]


def intertwining_residual(u: QMatrix, t1: QMatrix, t2: QMatrix, frame: JetFrame) -> float:
    """||(U T1 - T2 U) Q|| / max(1, ||T1||) with Q an orthonormal basis of the jet span of frame."""
    q = span_basis(frame)
    u_c = u.to_complex()
    diff = (u_c @ t1.to_complex() - t2.to_complex() @ u_c) @ q
    return float(np.linalg.norm(diff, 2) / max(1.0, t1.norm2()))


def operator_equivalence(
    t1: QMatrix,
    t2: QMatrix,
    omega0: Quaternion,
    k: int,
    tol: float = CONGRUENCE_TOL,
    intertwine_tol: float = INTERTWINE_TOL,
    seed: int = 0,
    logger_factory: Optional[LoggerFactory] = None,
    frames: Optional[Tuple[JetFrame, JetFrame]] = None,
    **frame_options,
) -> EquivalenceResult:
    """Quaternion unitary equivalence at w0 through frames, gauge fixing and rigidity.

    frames, when given, replaces the right-inverse frames of t1 and t2; any
    holomorphic gauge of them gives the same verdict.
    """
    logger = (logger_factory or get_default_factory()).create_logger("bundles")
    if frames is None:
        f1 = frame_from_right_inverse(t1, omega0, k, logger_factory=logger_factory, **frame_options)
        f2 = frame_from_right_inverse(t2, omega0, k, logger_factory=logger_factory, **frame_options)
    else:
        f1, f2 = frames
    if f1.rank != f2.rank:
        return EquivalenceResult(False, reason=f"kernel ranks differ ({f1.rank} vs {f2.rank})")

    psi1, psi2 = normalize_frame(f1), normalize_frame(f2)
    w = solve_frame_unitary(psi1, psi2, tol, seed)
    if w is None:
        logger.log("no frame unitary matches the normalized Gram data")
        return EquivalenceResult(False, reason="normalized Gram data differ")

    aligned = JetFrame.from_complex_jets(
        psi2.base, [psi2.jet_matrix(m) @ w.conj().T for m in range(psi2.order + 1)], psi2.spectral_gap
    )
    rigid = rigidity_check(psi1, aligned, tol, logger_factory)
    if not rigid.congruent:
        return EquivalenceResult(False, reason="frames not congruent", details={"deviation": rigid.base_deviation})

    residual = intertwining_residual(rigid.u, t1, t2, psi1)
    equivalent = residual <= intertwine_tol
    if not equivalent:
        logger.log(f"congruent frames but intertwining residual {residual:.3e}")
    return EquivalenceResult(
        equivalent,
        u=rigid.u if equivalent else None,
        residual=residual,
        reason="" if equivalent else "intertwining residual too large",
        details={"isometry_residual": rigid.isometry_residual},
    )


class Section(ABC):
    """A cross-section w -> gamma(w) near a point of the reduced domain."""

    @abstractmethod
    def value(self, omega: complex) -> QVector:
        ...

    @abstractmethod
    def derivative(self, omega: complex) -> QVector:
        ...

    def norm_sq(self, omega: complex) -> float:
        return self.value(omega).norm_sq()


class JetSection(Section):
    """Section i of a JetFrame, evaluated through its truncated Taylor series."""

    def __init__(self, frame: JetFrame, index: int = 0):
        self.frame = frame
        self.index = index

    def value(self, omega: complex) -> QVector:
        return self.frame.evaluate(omega)[self.index]

    def derivative(self, omega: complex) -> QVector:
        return self.frame.derivative_at(omega)[self.index]


class FunctionSection(Section):
    """Section given by callables; norm_fn supplies a closed-form norm when known."""

    def __init__(
        self,
        value_fn: Callable[[complex], QVector],
        derivative_fn: Callable[[complex], QVector],
        norm_fn: Optional[Callable[[complex], float]] = None,
    ):
        self._value = value_fn
        self._derivative = derivative_fn
        self._norm = norm_fn

    def value(self, omega: complex) -> QVector:
        return self._value(omega)

    def derivative(self, omega: complex) -> QVector:
        return self._derivative(omega)

    def norm_sq(self, omega: complex) -> float:
        if self._norm is not None:
            return float(self._norm(omega))
        return super().norm_sq(omega)


class ScaledSection(Section):
    """gamma(w) f(w) for a complex polynomial f(w) = sum_l coeffs[l] (w - center)^l."""

    def __init__(self, section: Section, coeffs: Sequence[complex], center: complex = 0j):
        self.section = section
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.center = complex(center)

    def f(self, omega: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1], omega - self.center))

    def f_prime(self, omega: complex) -> complex:
        return complex(np.polyval(np.polyder(self.coeffs[::-1]), omega - self.center)) if self.coeffs.size > 1 else 0j

    def value(self, omega: complex) -> QVector:
        return self.section.value(omega).scale(self.f(omega))

    def derivative(self, omega: complex) -> QVector:
        return self.section.derivative(omega).scale(self.f(omega)) + self.section.value(omega).scale(self.f_prime(omega))

    def norm_sq(self, omega: complex) -> float:
        return abs(self.f(omega)) ** 2 * self.section.norm_sq(omega)


def cauchy_riemann_residual(section: Section, omega: complex, h: float = 1e-5) -> float:
    """||d/d(conj w) gamma_C|| / max(1, ||gamma||) by central differences."""
    omega = complex(omega)
    dx = (section.value(omega + h).to_complex() - section.value(omega - h).to_complex()) / (2 * h)
    dy = (section.value(omega + 1j * h).to_complex() - section.value(omega - 1j * h).to_complex()) / (2 * h)
    dbar = 0.5 * (dx + 1j * dy)
    return float(np.linalg.norm(dbar) / max(1.0, section.value(omega).norm()))


def spanning_report(frame: JetFrame, count: int) -> List[float]:
    """||P e_i|| for the first count basis vectors, P the projection onto the jet span."""
    q = span_basis(frame)
    size = frame.size
    values = []
    for i in range(min(count, size)):
        e = np.zeros(2 * size, dtype=complex)
        e[i] = 1.0
        values.append(float(np.linalg.norm(q.conj().T @ e)))
    return values
