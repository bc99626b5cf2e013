#!/usr/bin/env python3
"""Tests for quaternionic vectors, matrices and the complex representation."""

import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from errors import DependentInput, DimensionMismatch, NotAQuaternionicRep
from qcore import I, J, K, Quaternion
from qlinalg import (
    QMatrix,
    QVector,
    complex_columns,
    gram_matrix,
    gram_schmidt_q,
    householder_random_unitary,
    inner,
    quaternionic_rank,
    random_qmatrix,
    random_qvector,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


class TestComplexRepresentation(unittest.TestCase):
    @seed(11)
    @settings(max_examples=50)
    @given(seeds)
    def test_product_homomorphism(self, s):
        rng = np.random.default_rng(s)
        a, b = random_qmatrix(8, 8, rng), random_qmatrix(8, 8, rng)
        self.assertLess(np.max(np.abs((a @ b).to_complex() - a.to_complex() @ b.to_complex())), 1e-12)

    def test_round_trip_is_exact(self):
        a = random_qmatrix(5, 3, np.random.default_rng(0))
        back = QMatrix.from_complex(a.to_complex())
        self.assertTrue(np.array_equal(back.z1, a.z1))
        self.assertTrue(np.array_equal(back.z2, a.z2))

    def test_from_complex_rejects_generic_matrix(self):
        rng = np.random.default_rng(1)
        with self.assertRaises(NotAQuaternionicRep):
            QMatrix.from_complex(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        with self.assertRaises(NotAQuaternionicRep):
            QMatrix.from_complex(np.eye(3))

    def test_entries_match_quaternion_products(self):
        grid = [[Quaternion(1, 2, 0, 1), J], [K, Quaternion(0.5, 0, -1, 2)]]
        a = QMatrix.from_quaternions(grid)
        x = QVector.from_quaternions([I, Quaternion(1, 1, 1, 1)])
        y = a @ x
        for r in range(2):
            expected = grid[r][0] * x[0] + grid[r][1] * x[1]
            self.assertTrue(y[r].isclose(expected, 1e-12))

    def test_vector_right_action(self):
        x = QVector.from_quaternions([Quaternion(1, 2, 3, 4), J])
        q = Quaternion(0.5, -1, 0.25, 2)
        xq = x.rmul(q)
        for n in range(2):
            self.assertTrue(xq[n].isclose(x[n] * q, 1e-12))

    def test_j_partner(self):
        x = random_qvector(4, np.random.default_rng(2))
        self.assertTrue(np.allclose(x.j_partner(), x.rmul(J).to_complex()))

    def test_adjoint(self):
        a = random_qmatrix(3, 4, np.random.default_rng(3))
        self.assertTrue(np.allclose(a.adjoint().to_complex(), a.to_complex().conj().T))
        self.assertTrue(a.adjoint()[1, 2].isclose(a[2, 1].conj(), 1e-15))

    def test_left_and_right_scalars(self):
        a = random_qmatrix(2, 2, np.random.default_rng(4))
        q = Quaternion(0.1, 0.2, 0.3, 0.4)
        self.assertTrue(a.rmul(q)[0, 1].isclose(a[0, 1] * q, 1e-12))
        self.assertTrue(a.lmul(q)[1, 0].isclose(q * a[1, 0], 1e-12))

    def test_power(self):
        a = random_qmatrix(3, 3, np.random.default_rng(5))
        self.assertTrue(a.power(3).allclose(a @ a @ a, 1e-10))
        self.assertTrue(a.power(0).allclose(QMatrix.identity(3), 0.0))

    def test_shape_checks(self):
        with self.assertRaises(DimensionMismatch):
            QMatrix.zeros(2, 3) @ QVector.zeros(2)
        with self.assertRaises(DimensionMismatch):
            QVector.zeros(2) + QVector.zeros(3)


class TestInnerProduct(unittest.TestCase):
    def test_matches_quaternion_sum(self):
        x = QVector.from_quaternions([Quaternion(1, 2, 3, 4), Quaternion(0, 1, -1, 0.5)])
        y = QVector.from_quaternions([Quaternion(0.5, 0, 1, 1), K])
        expected = y[0].conj() * x[0] + y[1].conj() * x[1]
        self.assertTrue(inner(x, y).isclose(expected, 1e-12))

    def test_right_linear_and_hermitian(self):
        rng = np.random.default_rng(6)
        x, y = random_qvector(5, rng), random_qvector(5, rng)
        q = Quaternion(0.3, -0.2, 0.7, 0.1)
        self.assertTrue(inner(x.rmul(q), y).isclose(inner(x, y) * q, 1e-12))
        self.assertTrue(inner(y, x).isclose(inner(x, y).conj(), 1e-12))
        self.assertAlmostEqual(inner(x, x).a0, x.norm_sq(), places=12)

    def test_j_part_is_complex_pairing_with_partner(self):
        rng = np.random.default_rng(7)
        x, y = random_qvector(4, rng), random_qvector(4, rng)
        _, z2 = inner(x, y).split()
        self.assertAlmostEqual(np.vdot(y.j_partner(), x.to_complex()), z2, places=12)

    def test_length_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            inner(QVector.zeros(2), QVector.zeros(3))


class TestRankAndOrthonormalization(unittest.TestCase):
    def test_quaternionic_rank(self):
        x = random_qvector(4, np.random.default_rng(8))
        # x and x q span one quaternionic line
        self.assertEqual(quaternionic_rank([x, x.rmul(Quaternion(0, 1, 2, 3))]), 1)
        self.assertEqual(quaternionic_rank([x, random_qvector(4, np.random.default_rng(9))]), 2)
        self.assertEqual(complex_columns([x]).shape, (8, 2))

    def test_gram_schmidt_orthonormal(self):
        rng = np.random.default_rng(10)
        vectors = [random_qvector(6, rng) for _ in range(4)]
        basis = gram_schmidt_q(vectors)
        g = gram_matrix(basis)
        self.assertTrue(g.allclose(QMatrix.identity(4), 1e-12))
        # flags are preserved: v_1 lies in span(e_0, e_1)
        residual = vectors[1] - basis[0].rmul(inner(vectors[1], basis[0])) - basis[1].rmul(inner(vectors[1], basis[1]))
        self.assertLess(residual.norm(), 1e-12)

    def test_gram_schmidt_dependent(self):
        x = random_qvector(3, np.random.default_rng(11))
        with self.assertRaises(DependentInput):
            gram_schmidt_q([x, x.rmul(Quaternion(1, 1, 1, 1))])


class TestHouseholder(unittest.TestCase):
    @seed(12)
    @settings(max_examples=10)
    @given(seeds)
    def test_unitary(self, s):
        u = householder_random_unitary(6, s)
        self.assertTrue(u.is_unitary(1e-10))
        self.assertTrue((u @ u.adjoint()).allclose(QMatrix.identity(6), 1e-10))

    def test_deterministic(self):
        a = householder_random_unitary(4, 42)
        b = householder_random_unitary(4, 42)
        self.assertTrue(a.allclose(b, 0.0))

    def test_size_must_be_positive(self):
        with self.assertRaises(ValueError):
            householder_random_unitary(0, 1)


if __name__ == "__main__":
    unittest.main()
