"""Dense quaternionic vectors and matrices.

Both types store the pair (A1, A2) of complex arrays with A = A1 + j A2. The
complex representation is

    A_C = [[A1, -conj(A2)],
           [A2,  conj(A1)]],      x_C = (x1; x2),

so that (AB)_C = A_C B_C and (Ax)_C = A_C x_C. Heavy numerical work (SVD,
pseudo-inverses, null spaces) is done on the complex representation.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from errors import DependentInput, DimensionMismatch, NotAQuaternionicRep
from qcore import Quaternion

Scalar = Union[Quaternion, int, float, complex]

INDEPENDENCE_TOL = 1e-8


def _pair(q: Scalar):
    return Quaternion.coerce(q).split()


class QVector:
    """Quaternionic column vector x = x1 + j x2 with right scalar action."""

    __slots__ = ("z1", "z2")

    def __init__(self, z1: np.ndarray, z2: Optional[np.ndarray] = None):
        z1 = np.asarray(z1, dtype=complex).reshape(-1)
        z2 = np.zeros_like(z1) if z2 is None else np.asarray(z2, dtype=complex).reshape(-1)
        if z1.shape != z2.shape:
            raise DimensionMismatch(f"vector halves differ in length: {z1.shape} vs {z2.shape}")
        self.z1 = z1
        self.z2 = z2

    @classmethod
    def zeros(cls, n: int) -> "QVector":
        return cls(np.zeros(n, dtype=complex))

    @classmethod
    def basis(cls, n: int, index: int) -> "QVector":
        z1 = np.zeros(n, dtype=complex)
        z1[index] = 1.0
        return cls(z1)

    @classmethod
    def from_quaternions(cls, entries: Sequence[Scalar]) -> "QVector":
        pairs = [_pair(q) for q in entries]
        return cls(np.array([p[0] for p in pairs], dtype=complex), np.array([p[1] for p in pairs], dtype=complex))

    @classmethod
    def from_complex(cls, v: np.ndarray) -> "QVector":
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size % 2:
            raise NotAQuaternionicRep(f"complex vector of odd length {v.size}")
        n = v.size // 2
        return cls(v[:n], v[n:])

    def __len__(self) -> int:
        return self.z1.size

    def __getitem__(self, index: int) -> Quaternion:
        return Quaternion.from_complex_pair(self.z1[index], self.z2[index])

    def to_quaternions(self) -> List[Quaternion]:
        return [self[n] for n in range(len(self))]

    def to_complex(self) -> np.ndarray:
        return np.concatenate([self.z1, self.z2])

    def j_partner(self) -> np.ndarray:
        """(x j)_C = (-conj(x2); conj(x1))."""
        return np.concatenate([-np.conj(self.z2), np.conj(self.z1)])

    def copy(self) -> "QVector":
        return QVector(self.z1.copy(), self.z2.copy())

    def _check(self, other: "QVector") -> None:
        if len(self) != len(other):
            raise DimensionMismatch(f"vector lengths differ: {len(self)} vs {len(other)}")

    def __add__(self, other: "QVector") -> "QVector":
        self._check(other)
        return QVector(self.z1 + other.z1, self.z2 + other.z2)

    def __sub__(self, other: "QVector") -> "QVector":
        self._check(other)
        return QVector(self.z1 - other.z1, self.z2 - other.z2)

    def __neg__(self) -> "QVector":
        return QVector(-self.z1, -self.z2)

    def rmul(self, q: Scalar) -> "QVector":
        """x q with q acting on the right."""
        q1, q2 = _pair(q)
        return QVector(self.z1 * q1 - np.conj(self.z2) * q2, self.z2 * q1 + np.conj(self.z1) * q2)

    def scale(self, c: complex) -> "QVector":
        """x c for a complex scalar c (same as rmul restricted to the complex slice)."""
        return QVector(self.z1 * c, self.z2 * c)

    def norm_sq(self) -> float:
        return float(np.vdot(self.z1, self.z1).real + np.vdot(self.z2, self.z2).real)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def resized(self, n: int) -> "QVector":
        """Truncate or zero-pad to length n."""
        z1 = np.zeros(n, dtype=complex)
        z2 = np.zeros(n, dtype=complex)
        m = min(n, len(self))
        z1[:m] = self.z1[:m]
        z2[:m] = self.z2[:m]
        return QVector(z1, z2)

    def allclose(self, other: "QVector", atol: float = 1e-10) -> bool:
        return len(self) == len(other) and (self - other).norm() <= atol

    def __repr__(self) -> str:
        return f"QVector(n={len(self)})"


class QMatrix:
    """Dense quaternionic N x M matrix A = A1 + j A2."""

    __slots__ = ("z1", "z2")

    def __init__(self, z1: np.ndarray, z2: Optional[np.ndarray] = None):
        z1 = np.atleast_2d(np.asarray(z1, dtype=complex))
        z2 = np.zeros_like(z1) if z2 is None else np.atleast_2d(np.asarray(z2, dtype=complex))
        if z1.shape != z2.shape:
            raise DimensionMismatch(f"matrix halves differ in shape: {z1.shape} vs {z2.shape}")
        self.z1 = z1
        self.z2 = z2

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "QMatrix":
        return cls(np.zeros((rows, rows if cols is None else cols), dtype=complex))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def diag(cls, entries: Sequence[Scalar]) -> "QMatrix":
        pairs = [_pair(q) for q in entries]
        return cls(np.diag([p[0] for p in pairs]).astype(complex), np.diag([p[1] for p in pairs]).astype(complex))

    @classmethod
    def from_quaternions(cls, grid: Sequence[Sequence[Scalar]]) -> "QMatrix":
        rows = len(grid)
        cols = len(grid[0]) if rows else 0
        z1 = np.zeros((rows, cols), dtype=complex)
        z2 = np.zeros((rows, cols), dtype=complex)
        for r, row in enumerate(grid):
            if len(row) != cols:
                raise DimensionMismatch(f"ragged quaternion grid at row {r}")
            for c, value in enumerate(row):
                z1[r, c], z2[r, c] = _pair(value)
        return cls(z1, z2)

    @classmethod
    def from_columns(cls, columns: Sequence[QVector]) -> "QMatrix":
        if not columns:
            raise DimensionMismatch("no columns given")
        return cls(np.column_stack([v.z1 for v in columns]), np.column_stack([v.z2 for v in columns]))

    @classmethod
    def from_complex(cls, m: np.ndarray, tol: float = 1e-10) -> "QMatrix":
        """Inverse of to_complex; the block pattern must hold within tol (relative)."""
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] % 2 or m.shape[1] % 2:
            raise NotAQuaternionicRep(f"complex matrix of shape {m.shape} has no 2x2 block structure")
        n, k = m.shape[0] // 2, m.shape[1] // 2
        a1, a2 = m[:n, :k], m[n:, :k]
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
        deviation = max(
            float(np.max(np.abs(m[:n, k:] + np.conj(a2)), initial=0.0)),
            float(np.max(np.abs(m[n:, k:] - np.conj(a1)), initial=0.0)),
        )
        if deviation > tol * scale:
            raise NotAQuaternionicRep(f"block pattern violated by {deviation:.3e}")
        return cls(a1.copy(), a2.copy())

    @property
    def shape(self):
        return self.z1.shape

    def __getitem__(self, index) -> Quaternion:
        r, c = index
        return Quaternion.from_complex_pair(self.z1[r, c], self.z2[r, c])

    def to_quaternions(self) -> List[List[Quaternion]]:
        rows, cols = self.shape
        return [[self[r, c] for c in range(cols)] for r in range(rows)]

    def to_complex(self) -> np.ndarray:
        return np.block([[self.z1, -np.conj(self.z2)], [self.z2, np.conj(self.z1)]])

    def column(self, c: int) -> QVector:
        return QVector(self.z1[:, c], self.z2[:, c])

    def columns(self) -> List[QVector]:
        return [self.column(c) for c in range(self.shape[1])]

    def copy(self) -> "QMatrix":
        return QMatrix(self.z1.copy(), self.z2.copy())

    def _check_same(self, other: "QMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"matrix shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(self.z1 + other.z1, self.z2 + other.z2)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(self.z1 - other.z1, self.z2 - other.z2)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.z1, -self.z2)

    def __matmul__(self, other: Union["QMatrix", QVector]):
        if self.shape[1] != (len(other) if isinstance(other, QVector) else other.shape[0]):
            raise DimensionMismatch(f"cannot multiply {self.shape} by {getattr(other, 'shape', len(other))}")
        b1, b2 = other.z1, other.z2
        z1 = self.z1 @ b1 - np.conj(self.z2) @ b2
        z2 = self.z2 @ b1 + np.conj(self.z1) @ b2
        return QVector(z1, z2) if isinstance(other, QVector) else QMatrix(z1, z2)

    def rmul(self, q: Scalar) -> "QMatrix":
        """A q (entrywise right multiplication)."""
        q1, q2 = _pair(q)
        return QMatrix(self.z1 * q1 - np.conj(self.z2) * q2, self.z2 * q1 + np.conj(self.z1) * q2)

    def lmul(self, q: Scalar) -> "QMatrix":
        """q A (entrywise left multiplication)."""
        q1, q2 = _pair(q)
        return QMatrix(q1 * self.z1 - np.conj(q2) * self.z2, q2 * self.z1 + np.conj(q1) * self.z2)

    def adjoint(self) -> "QMatrix":
        """A*, the quaternionic conjugate transpose; (A*)_C = (A_C)^H."""
        return QMatrix(self.z1.conj().T, -self.z2.T)

    def power(self, m: int) -> "QMatrix":
        rows, cols = self.shape
        if rows != cols:
            raise DimensionMismatch(f"power of non-square matrix {self.shape}")
        result = QMatrix.identity(rows)
        base = self
        while m:
            if m & 1:
                result = result @ base
            base = base @ base
            m >>= 1
        return result

    def norm2(self) -> float:
        """Operator norm: largest singular value of the complex representation."""
        if self.z1.size == 0:
            return 0.0
        return float(np.linalg.norm(self.to_complex(), 2))

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.z1) ** 2) + np.sum(np.abs(self.z2) ** 2)))

    def quaternionic_rank(self, tol: float = INDEPENDENCE_TOL) -> int:
        return complex_rank(self.to_complex(), tol) // 2

    def is_unitary(self, tol: float = 1e-12) -> bool:
        rows, cols = self.shape
        if rows != cols:
            return False
        eye = np.eye(2 * rows)
        mc = self.to_complex()
        return bool(np.max(np.abs(mc.conj().T @ mc - eye)) <= tol and np.max(np.abs(mc @ mc.conj().T - eye)) <= tol)

    def allclose(self, other: "QMatrix", atol: float = 1e-10) -> bool:
        return self.shape == other.shape and (self - other).frobenius() <= atol

    def __repr__(self) -> str:
        return f"QMatrix(shape={self.shape})"


def inner(x: QVector, y: QVector) -> Quaternion:
    """<x, y> = sum_n conj(y_n) x_n, right linear in x.

    Expanded over the slice: (conj(y1) x1 + conj(y2) x2) + j (y1 x2 - y2 x1).
    """
    if len(x) != len(y):
        raise DimensionMismatch(f"inner product of vectors with lengths {len(x)} and {len(y)}")
    z1 = np.vdot(y.z1, x.z1) + np.vdot(y.z2, x.z2)
    z2 = np.sum(y.z1 * x.z2 - y.z2 * x.z1)
    return Quaternion.from_complex_pair(z1, z2)


def to_complex(a: Union[QMatrix, QVector]) -> np.ndarray:
    return a.to_complex()


def from_complex(m: np.ndarray, tol: float = 1e-10) -> QMatrix:
    return QMatrix.from_complex(m, tol)


def complex_columns(vectors: Iterable[QVector]) -> np.ndarray:
    """2N x 2m complex matrix [x_C ... | (x j)_C ...] spanning the right H-span of vectors."""
    vectors = list(vectors)
    plain = [v.to_complex() for v in vectors]
    partners = [v.j_partner() for v in vectors]
    return np.column_stack(plain + partners)


def complex_rank(m: np.ndarray, tol: float = INDEPENDENCE_TOL) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def quaternionic_rank(vectors: Sequence[QVector], tol: float = INDEPENDENCE_TOL) -> int:
    """Right H-rank of a family of vectors (complex rank of the J-closed span, halved)."""
    if not vectors:
        return 0
    return complex_rank(complex_columns(vectors), tol) // 2


def gram_schmidt_q(vectors: Sequence[QVector], tol: float = INDEPENDENCE_TOL) -> List[QVector]:
    """Right-linear Gram-Schmidt: e_i ~ v_i - sum_{k<i} e_k <v_i, e_k>.

    Coefficients act on the right and the sum starts at e_0. A second
    projection pass keeps the output orthonormal to working precision.
    """
    vectors = list(vectors)
    if not vectors:
        return []
    if quaternionic_rank(vectors, tol) < len(vectors):
        raise DependentInput(f"{len(vectors)} vectors are right-linearly dependent over H")

    basis: List[QVector] = []
    for i, v in enumerate(vectors):
        residual = v
        for _ in range(2):
            for e in basis:
                residual = residual - e.rmul(inner(residual, e))
        norm = residual.norm()
        if norm < tol * max(v.norm(), 1e-300):
            raise DependentInput(f"residual of vector {i} vanishes ({norm:.3e})")
        basis.append(residual.scale(1.0 / norm))
    return basis


def gram_matrix(vectors: Sequence[QVector]) -> QMatrix:
    """G[i][j] = <v_j, v_i> (the matrix of the identity in the given family)."""
    n = len(vectors)
    grid = [[inner(vectors[j], vectors[i]) for j in range(n)] for i in range(n)]
    return QMatrix.from_quaternions(grid)


def householder_random_unitary(n: int, seed: int) -> QMatrix:
    """Random quaternionic unitary: a product of n quaternionic reflections
    I - 2 v v* followed by a diagonal of random unit quaternions."""
    if n < 1:
        raise ValueError(f"unitary size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    u_c = np.eye(2 * n, dtype=complex)
    for _ in range(n):
        coeffs = rng.standard_normal((n, 4))
        v = QVector.from_quaternions([Quaternion(*row) for row in coeffs])
        v = v.scale(1.0 / v.norm())
        pair = np.column_stack([v.to_complex(), v.j_partner()])
        u_c = (np.eye(2 * n) - 2.0 * pair @ pair.conj().T) @ u_c
    phases = rng.standard_normal((n, 4))
    units = [Quaternion(*(row / np.linalg.norm(row))) for row in phases]
    u = QMatrix.diag(units) @ QMatrix.from_complex(u_c, tol=1e-9)
    return u


def unit_quaternion(rng: np.random.Generator) -> Quaternion:
    row = rng.standard_normal(4)
    return Quaternion(*(row / np.linalg.norm(row)))


def random_qmatrix(rows: int, cols: int, rng: np.random.Generator) -> QMatrix:
    return QMatrix(
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)),
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)),
    )


def random_qvector(n: int, rng: np.random.Generator) -> QVector:
    return QVector(rng.standard_normal(n) + 1j * rng.standard_normal(n), rng.standard_normal(n) + 1j * rng.standard_normal(n))
