"""Quaternion scalars.

A quaternion a = a0 + a1 i + a2 j + a3 k is stored by its four real
coefficients. Over the complex slice C = R + Ri it decomposes exactly as

    a = z1 + j z2,   z1 = a0 + a1 i,   z2 = a2 - a3 i,

which is the convention the complex representation in qlinalg is built on
(c j = j conj(c) for complex c).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union

import numpy as np

from errors import NotSymmetric

DEFAULT_TOL = 1e-10

Number = Union[int, float, complex]


@dataclass(frozen=True)
class Quaternion:
    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    # construction

    @classmethod
    def coerce(cls, value: Union["Quaternion", Number]) -> "Quaternion":
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag, 0.0, 0.0)
        return cls(float(value), 0.0, 0.0, 0.0)

    @classmethod
    def from_complex_pair(cls, z1: complex, z2: complex = 0j) -> "Quaternion":
        """The quaternion z1 + j z2."""
        z1, z2 = complex(z1), complex(z2)
        return cls(z1.real, z1.imag, z2.real, -z2.imag)

    @classmethod
    def from_list(cls, values: Iterable[float]) -> "Quaternion":
        values = [float(v) for v in values]
        if len(values) != 4:
            raise ValueError(f"a quaternion needs 4 coefficients, got {len(values)}")
        return cls(*values)

    # views

    @property
    def real(self) -> float:
        return self.a0

    @property
    def imag_vector(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    @property
    def imag_norm(self) -> float:
        return math.sqrt(self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3)

    def split(self) -> Tuple[complex, complex]:
        """(z1, z2) with self = z1 + j z2."""
        return complex(self.a0, self.a1), complex(self.a2, -self.a3)

    def to_list(self) -> List[float]:
        return [self.a0, self.a1, self.a2, self.a3]

    def to_complex(self, tol: float = DEFAULT_TOL) -> complex:
        """The complex number a0 + a1 i; the j and k parts must vanish."""
        if abs(self.a2) > tol or abs(self.a3) > tol:
            raise ValueError(f"{self.to_text()} is not in the complex slice")
        return complex(self.a0, self.a1)

    def is_complex(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.a2) <= tol and abs(self.a3) <= tol

    # arithmetic

    def __add__(self, other: Union["Quaternion", Number]) -> "Quaternion":
        b = Quaternion.coerce(other)
        return Quaternion(self.a0 + b.a0, self.a1 + b.a1, self.a2 + b.a2, self.a3 + b.a3)

    __radd__ = __add__

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def __sub__(self, other: Union["Quaternion", Number]) -> "Quaternion":
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other: Union["Quaternion", Number]) -> "Quaternion":
        return Quaternion.coerce(other) - self

    def __mul__(self, other: Union["Quaternion", Number]) -> "Quaternion":
        return mul(self, Quaternion.coerce(other))

    def __rmul__(self, other: Number) -> "Quaternion":
        return mul(Quaternion.coerce(other), self)

    def __truediv__(self, other: Union["Quaternion", Number]) -> "Quaternion":
        """Right division self * other^-1."""
        return self * Quaternion.coerce(other).inverse()

    def conj(self) -> "Quaternion":
        return Quaternion(self.a0, -self.a1, -self.a2, -self.a3)

    def norm_sq(self) -> float:
        return self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3

    def __abs__(self) -> float:
        return math.sqrt(self.norm_sq())

    def inverse(self) -> "Quaternion":
        n2 = self.norm_sq()
        if n2 == 0.0:
            raise ZeroDivisionError("quaternion inverse of zero")
        c = self.conj()
        return Quaternion(c.a0 / n2, c.a1 / n2, c.a2 / n2, c.a3 / n2)

    def __pow__(self, exponent: int) -> "Quaternion":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def ad(self, theta: float) -> "Quaternion":
        """e^{-i theta} * self * e^{i theta}."""
        return exp_i(-theta) * self * exp_i(theta)

    def isclose(self, other: Union["Quaternion", Number], tol: float = DEFAULT_TOL) -> bool:
        return abs(self - Quaternion.coerce(other)) <= tol

    # text form

    def to_text(self) -> str:
        parts = [repr(self.a0)]
        for value, unit in ((self.a1, "i"), (self.a2, "j"), (self.a3, "k")):
            sign = "-" if value < 0 or (value == 0 and math.copysign(1.0, value) < 0) else "+"
            parts.append(f"{sign} {repr(abs(value))} {unit}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product (ij = -ji = k)."""
    return Quaternion(
        a.a0 * b.a0 - a.a1 * b.a1 - a.a2 * b.a2 - a.a3 * b.a3,
        a.a0 * b.a1 + a.a1 * b.a0 + a.a2 * b.a3 - a.a3 * b.a2,
        a.a0 * b.a2 - a.a1 * b.a3 + a.a2 * b.a0 + a.a3 * b.a1,
        a.a0 * b.a3 + a.a1 * b.a2 - a.a2 * b.a1 + a.a3 * b.a0,
    )


ZERO = Quaternion()
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def exp_i(theta: float) -> Quaternion:
    """The unit complex number e^{i theta} as a quaternion."""
    return Quaternion(math.cos(theta), math.sin(theta))


def axially_symmetric(p: Quaternion, q: Quaternion, tol: float = DEFAULT_TOL) -> bool:
    """True iff Re(p) = Re(q) and |p| = |q| within tol."""
    return abs(p.real - q.real) <= tol and abs(abs(p) - abs(q)) <= tol


def symmetry_witness(p: Quaternion, q: Quaternion, tol: float = DEFAULT_TOL) -> Quaternion:
    """A unit quaternion w with conj(w) p w = q.

    The imaginary axis of p is rotated onto that of q along the shortest arc.
    For antiparallel axes the rotation is a half turn about the projection of j
    onto the plane orthogonal to Im(p) (k when Im(p) is parallel to j).
    """
    if not axially_symmetric(p, q, tol):
        raise NotSymmetric(f"{p.to_text()} and {q.to_text()} are not axially symmetric")

    p_norm = p.imag_norm
    if p_norm <= tol:
        return ONE

    u = p.imag_vector / p_norm
    v = q.imag_vector / q.imag_norm
    dot = float(np.dot(u, v))

    if 1.0 + dot <= 1e-12:
        axis = np.array([0.0, 1.0, 0.0])
        axis = axis - np.dot(axis, u) * u
        if np.linalg.norm(axis) <= 1e-8:
            axis = np.array([0.0, 0.0, 1.0]) - u[2] * u
        axis = axis / np.linalg.norm(axis)
        witness = Quaternion(0.0, *axis)
    else:
        cross = np.cross(u, v)
        rotor = np.array([1.0 + dot, *cross])
        rotor = rotor / np.linalg.norm(rotor)
        # rotor rotates u to v as x -> r x conj(r); the witness is conj(r)
        witness = Quaternion(*rotor).conj()

    residual = abs(witness.conj() * p * witness - q)
    if residual > max(tol, 1e-9) * max(1.0, abs(q)):
        raise NotSymmetric(f"witness residual {residual:.3e} for {p.to_text()} -> {q.to_text()}")
    return witness


def reduce(omega: Quaternion) -> Quaternion:
    """Re(omega) + i |Im(omega)|, the representative in the closed upper half plane."""
    return Quaternion(omega.real, omega.imag_norm)


def reduced_complex(omega: Quaternion) -> complex:
    """reduce(omega) as a Python complex."""
    return complex(omega.real, omega.imag_norm)


def left_matrix(a: Quaternion) -> np.ndarray:
    """4x4 real matrix L(a) with L(a) @ b.coeffs = (a*b).coeffs."""
    return np.array([
        [a.a0, -a.a1, -a.a2, -a.a3],
        [a.a1, a.a0, -a.a3, a.a2],
        [a.a2, a.a3, a.a0, -a.a1],
        [a.a3, -a.a2, a.a1, a.a0],
    ])


_TERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?\s*\*?\s*([ijk]?)")


def parse(text: str) -> Quaternion:
    """Parse "a0 + a1 i + a2 j + a3 k" (terms in any order) or "a0,a1,a2,a3"."""
    text = text.strip()
    if "," in text:
        return Quaternion.from_list(part for part in text.split(","))
    if not text:
        raise ValueError("empty quaternion text")

    coeffs = {"": 0.0, "i": 0.0, "j": 0.0, "k": 0.0}
    pos = 0
    compact = text.replace(" ", "")
    while pos < len(compact):
        match = _TERM.match(compact, pos)
        if match is None or match.end() == pos:
            raise ValueError(f"cannot parse quaternion text '{text}'")
        sign, number, unit = match.groups()
        if number is None and not unit:
            raise ValueError(f"cannot parse quaternion text '{text}'")
        value = float(number) if number is not None else 1.0
        coeffs[unit] += -value if sign == "-" else value
        pos = match.end()
    return Quaternion(coeffs[""], coeffs["i"], coeffs["j"], coeffs["k"])
