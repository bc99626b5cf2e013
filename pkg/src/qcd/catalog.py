"""Worked-example operators, their closed-form sections and random fixtures."""

from __future__ import annotations

import math
from typing import Dict, List, Tuple

import numpy as np

from banded import BandedOperator, WeightRule
from bundles import FunctionSection, JetFrame
from errors import ConfigError
from qcore import I, Quaternion
from qlinalg import QMatrix, QVector, householder_random_unitary

# T + i/2 with the backward shift: n = 1 on the first region, n = 2 on the second
TCI_REGIONS: Dict[str, List[Quaternion]] = {
    "omega1": [Quaternion(0.0, 0.9), Quaternion(0.2, 0.7)],
    "omega2": [Quaternion(0.0, 0.4), Quaternion(0.1, 0.3)],
}
TCI_EXPECTED = {"omega1": 1, "omega2": 2}

CNDU_BASE = I
CNDU_NAMES = ("t", "t_tilde")


def tci_operator() -> BandedOperator:
    """Backward shift plus i/2 on the diagonal."""
    return BandedOperator(diag=Quaternion(0.0, 0.5), weights=WeightRule.const(1.0), name="tci")


def cndu_pair() -> Tuple[BandedOperator, BandedOperator]:
    """Two operators with equal curvature that are not quaternion unitarily equivalent.

    Both are i on the diagonal with unit superdiagonal except the top-left corner.
    """
    t = BandedOperator(
        diag=I,
        weights=WeightRule.const(1.0),
        patch={(0, 1): Quaternion(1.0, 0.0, 0.0, -2.0), (0, 2): Quaternion(1.0, 0.0, 1.0)},
        name="t",
    )
    t_tilde = BandedOperator(
        diag=I,
        weights=WeightRule.const(1.0),
        patch={
            (0, 1): Quaternion(0.5, 0.0, -0.5),
            (0, 2): Quaternion(1.0),
            (1, 1): Quaternion(0.0, 0.0, 0.0, -1.0),
            (1, 2): Quaternion(1.0, 0.0, 1.0),
        },
        name="t_tilde",
    )
    return t, t_tilde


def _check_name(which: str) -> None:
    if which not in CNDU_NAMES:
        raise ConfigError(f"unknown example operator '{which}', expected one of {CNDU_NAMES}")


def cndu_norm_sq(omega: complex) -> float:
    """|1+u|^2 + 2|u|^2 + |u|^4 / (1 - |u|^2) with u = omega - i, the closed form of both sections."""
    u = complex(omega) - 1j
    r = abs(u) ** 2
    if r >= 1.0:
        raise ValueError(f"{omega} lies outside the disc |omega - i| < 1")
    return abs(1 + u) ** 2 + 2 * r + r * r / (1 - r)


def cndu_section(which: str, n: int) -> FunctionSection:
    """Truncated closed-form section of T ('t') or T~ ('t_tilde').

    The first complex half is (1+u, u, u^2, ...); the j-part is u in entry 0 for
    T and in entry 1 for T~.
    """
    _check_name(which)
    slot = 0 if which == "t" else 1

    def value(omega: complex) -> QVector:
        u = complex(omega) - 1j
        z1 = u ** np.arange(n, dtype=float)
        z1[0] = 1 + u
        z2 = np.zeros(n, dtype=complex)
        z2[slot] = u
        return QVector(z1.astype(complex), z2)

    def derivative(omega: complex) -> QVector:
        u = complex(omega) - 1j
        powers = np.arange(n)
        z1 = np.zeros(n, dtype=complex)
        z1[1:] = powers[1:] * u ** (powers[1:] - 1)
        z1[0] = 1.0
        z2 = np.zeros(n, dtype=complex)
        z2[slot] = 1.0
        return QVector(z1, z2)

    def norm_sq(omega: complex) -> float:
        # the first half continues as u^k past the truncation
        r = abs(complex(omega) - 1j) ** 2
        if r >= 1.0:
            raise ValueError(f"{omega} lies outside the disc |omega - i| < 1")
        return value(omega).norm_sq() + r ** n / (1 - r)

    return FunctionSection(value, derivative, norm_sq)


def cndu_jets(which: str, n: int, k: int) -> JetFrame:
    """Exact jets of cndu_section at the base point i."""
    _check_name(which)
    if n <= k:
        raise ConfigError(f"truncation {n} cannot hold jets up to order {k}")
    slot = 0 if which == "t" else 1
    blocks = []
    for m in range(k + 1):
        v = np.zeros(2 * n, dtype=complex)
        if m == 0:
            v[0] = 1.0
        elif m == 1:
            v[0] = v[1] = 1.0
            v[n + slot] = 1.0
        else:
            v[m] = math.factorial(m)
        blocks.append(v.reshape(-1, 1))
    return JetFrame.from_complex_jets(CNDU_BASE, blocks)


def szego_section(n: int) -> FunctionSection:
    """(1, w, w^2, ..., w^{n-1}) with the exact truncated norm (1 - |w|^{2n}) / (1 - |w|^2)."""

    def value(omega: complex) -> QVector:
        return QVector(complex(omega) ** np.arange(n, dtype=float))

    def derivative(omega: complex) -> QVector:
        powers = np.arange(n)
        z1 = np.zeros(n, dtype=complex)
        z1[1:] = powers[1:] * complex(omega) ** (powers[1:] - 1)
        return QVector(z1)

    def norm_sq(omega: complex) -> float:
        r = abs(omega) ** 2
        if r == 1.0:
            return float(n)
        return (1 - r ** n) / (1 - r)

    return FunctionSection(value, derivative, norm_sq)


def random_conjugate_fixture(t: QMatrix, seed: int) -> Tuple[QMatrix, QMatrix]:
    """(U0, U0 T U0*) for a Householder-built random quaternionic unitary U0."""
    u0 = householder_random_unitary(t.shape[0], seed)
    return u0, u0 @ t @ u0.adjoint()
