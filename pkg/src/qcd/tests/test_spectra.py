#!/usr/bin/env python3
"""Tests for S-spectrum membership, right eigenvalues and truncation trends."""

import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from catalog import TCI_EXPECTED, TCI_REGIONS, tci_operator
from errors import DimensionMismatch, RealS
from logger import MemoryLogger, MemoryLoggerFactory
from qcore import I, J, K, Quaternion
from qlinalg import QMatrix, householder_random_unitary, random_qmatrix
from spectra import (
    _count_to_dim,
    classes_match,
    kernel_split,
    pencil,
    right_eigen_classes,
    right_eigenvectors,
    s_point_membership,
    s_radius_estimate,
    sigma_min_trend,
    similarity_invariance,
    transport_eigenvector,
)

DIAG = [I, Quaternion(1.0, 0.0, 1.0), Quaternion(2.0)]


def conjugated_diag(seed: int = 3) -> QMatrix:
    u = householder_random_unitary(3, seed)
    return u @ QMatrix.diag(DIAG) @ u.adjoint()


class TestPencil(unittest.TestCase):
    def test_depends_only_on_sphere(self):
        t = random_qmatrix(4, 4, np.random.default_rng(0))
        self.assertTrue(pencil(t, I).allclose(pencil(t, J), 1e-12))
        self.assertTrue(pencil(t, Quaternion(1, 2)).allclose(pencil(t, Quaternion(1, 0, 1.2, 1.6)), 1e-12))

    def test_annihilates_right_eigenvectors(self):
        t = conjugated_diag()
        for x in right_eigenvectors(t, I):
            self.assertLess((pencil(t, K) @ x).norm(), 1e-10)

    def test_non_square(self):
        with self.assertRaises(DimensionMismatch):
            pencil(QMatrix.zeros(2, 3), I)


class TestDenseMembership(unittest.TestCase):
    def test_sphere_members(self):
        t = conjugated_diag()
        for s in (I, J, Quaternion(0, 0.6, 0, 0.8), Quaternion(1, 0, 0, 1), Quaternion(1, 1)):
            result = s_point_membership(t, s, logger_factory=MemoryLoggerFactory())
            self.assertTrue(result.member, s.to_text())
            self.assertEqual(result.kernel_dim_H, 1)
            self.assertEqual(len(result.kernel_basis), 1)

    def test_non_members(self):
        t = conjugated_diag()
        for s in (Quaternion(0.5), Quaternion(0, 2), Quaternion(1, 0.5)):
            result = s_point_membership(t, s, logger_factory=MemoryLoggerFactory())
            self.assertFalse(result.member, s.to_text())
            self.assertGreater(result.sigma_min, 1e-3)

    def test_kernel_basis_is_in_pencil_kernel(self):
        t = conjugated_diag()
        result = s_point_membership(t, Quaternion(1, 0, 0, 1), logger_factory=MemoryLoggerFactory())
        p = pencil(t, result.s)
        for x in result.kernel_basis:
            self.assertAlmostEqual(x.norm(), 1.0, places=10)
            self.assertLess((p @ x).norm(), 1e-8)


class TestBandedMembership(unittest.TestCase):
    def test_tci_regions(self):
        op = tci_operator()
        for region, points in TCI_REGIONS.items():
            for s in points:
                result = s_point_membership(op, s, n=64, logger_factory=MemoryLoggerFactory())
                self.assertEqual(result.kernel_dim_H, TCI_EXPECTED[region], f"{region} {s.to_text()}")
                self.assertEqual(result.method, "decay")

    def test_outside_both_discs(self):
        result = s_point_membership(tci_operator(), Quaternion(0, 2.0), n=64, logger_factory=MemoryLoggerFactory())
        self.assertEqual(result.kernel_dim_H, 0)

    def test_truncation_required(self):
        with self.assertRaises(ValueError):
            s_point_membership(tci_operator(), I)

    def test_truncation_too_small(self):
        with self.assertRaises(DimensionMismatch):
            s_point_membership(tci_operator(), I, n=3)

    def test_trend_is_stable(self):
        trend = sigma_min_trend(tci_operator(), Quaternion(0, 0.9), [32, 64, 128], logger_factory=MemoryLoggerFactory())
        self.assertTrue(trend.stable_dimension)
        self.assertEqual(trend.kernel_dims, [1, 1, 1])
        self.assertEqual(trend.sizes, [32, 64, 128])


class TestRightEigenvalues(unittest.TestCase):
    def test_classes_of_conjugated_diagonal(self):
        factory = MemoryLoggerFactory()
        classes = right_eigen_classes(conjugated_diag(), logger_factory=factory)
        self.assertTrue(classes_match(classes, [Quaternion(0, 1), Quaternion(1, 1), Quaternion(2)], 1e-8))
        self.assertFalse(factory.has_errors())

    def test_similarity_invariance(self):
        rng = np.random.default_rng(4)
        a = random_qmatrix(4, 4, rng)
        q = random_qmatrix(4, 4, rng)
        self.assertTrue(similarity_invariance(a, q, 1e-6))

    def test_classes_match_is_set_equality(self):
        self.assertTrue(classes_match([I, Quaternion(2)], [Quaternion(2), I]))
        self.assertFalse(classes_match([I], [I, Quaternion(2)]))
        self.assertFalse(classes_match([I], [Quaternion(0, 1.1)]))

    def test_eigenvectors_on_the_sphere(self):
        t = conjugated_diag()
        for omega in (I, J, Quaternion(0, 0, 0.6, 0.8)):
            vectors = right_eigenvectors(t, omega)
            self.assertEqual(len(vectors), 1)
            for x in vectors:
                self.assertLess((t @ x - x.rmul(omega)).norm(), 1e-10)

    def test_transport(self):
        t = conjugated_diag()
        x = right_eigenvectors(t, I)[0]
        q = Quaternion(1, 2, -1, 0.5)
        y, omega = transport_eigenvector(x, I, q)
        self.assertLess((t @ y - y.rmul(omega)).norm(), 1e-10)
        self.assertAlmostEqual(abs(omega), 1.0, places=12)


class TestKernelSplit(unittest.TestCase):
    def test_split_of_sphere_eigenvector(self):
        t = conjugated_diag()
        omega = Quaternion(1, 1)
        # eigenvector for another point of the sphere lies in the pencil kernel at omega
        x = right_eigenvectors(t, Quaternion(1, 0, 1))[0]
        split = kernel_split(t, omega, x)
        self.assertLess(split.residual, 1e-10)
        self.assertLess((t @ split.u - split.u.rmul(omega)).norm(), 1e-10)
        self.assertLess((t @ split.v - split.v.rmul(omega)).norm(), 1e-10)

    def test_real_point(self):
        t = conjugated_diag()
        with self.assertRaises(RealS):
            kernel_split(t, Quaternion(2), right_eigenvectors(t, Quaternion(2))[0])


class TestRadiusAndDiagnostics(unittest.TestCase):
    def test_radius_of_normal_matrix(self):
        report = s_radius_estimate(conjugated_diag(), 3, 5)
        self.assertEqual(len(report.sequence), 5)
        self.assertAlmostEqual(report.estimate, 2.0, places=8)

    def test_radius_of_banded_operator(self):
        report = s_radius_estimate(tci_operator(), 32, 10)
        self.assertGreaterEqual(report.estimate, 0.5 - 1e-12)
        self.assertLessEqual(report.estimate, report.sequence[0] + 1e-12)

    def test_radius_needs_positive_power(self):
        with self.assertRaises(ValueError):
            s_radius_estimate(conjugated_diag(), 3, 0)

    def test_odd_kernel_count_is_logged(self):
        logger = MemoryLogger("spectra")
        self.assertEqual(_count_to_dim(3, "at s=i", logger), 1)
        self.assertTrue(logger.has_errors())
        self.assertIn("odd complex kernel count 3", logger.get_messages("error")[0])


if __name__ == "__main__":
    unittest.main()
