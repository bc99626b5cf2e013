#!/usr/bin/env python3
"""Tests for jet frames, derivative identities, Gram data, rigidity and equivalence."""

import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from bundles import (
    FunctionSection,
    JetFrame,
    JetSection,
    cauchy_riemann_residual,
    derivative_identity_check,
    expected_pencil_matrix,
    frame_from_right_inverse,
    gram_congruent,
    gram_data,
    jet_basis_check,
    normalize_frame,
    operator_equivalence,
    pencil_matrix_on_jets,
    rigidity_check,
    span_basis,
    spanning_report,
)
from catalog import CNDU_BASE, cndu_jets, cndu_pair, random_conjugate_fixture
from errors import EmptyKernel, IllConditioned, RankMismatch, RealS, SizeMismatch
from logger import MemoryLoggerFactory
from qcore import I, J, Quaternion
from qlinalg import QMatrix, QVector

N = 32
K = 6


def cndu_matrices(n: int = N):
    t, t_tilde = cndu_pair()
    return t.truncate(n), t_tilde.truncate(n)


def cndu_frame(which: int = 0, k: int = K) -> JetFrame:
    return frame_from_right_inverse(cndu_matrices()[which], CNDU_BASE, k, logger_factory=MemoryLoggerFactory())


def rank_two_frame() -> JetFrame:
    t = QMatrix.diag([I, I, Quaternion(0, 2)])
    return frame_from_right_inverse(t, I, 2, logger_factory=MemoryLoggerFactory())


class TestFrameConstruction(unittest.TestCase):
    def test_rank_one_at_diagonal_value(self):
        frame = cndu_frame()
        self.assertEqual(frame.rank, 1)
        self.assertEqual(frame.order, K)
        self.assertEqual(frame.size, N)
        self.assertTrue(frame.base.isclose(I))
        self.assertGreater(frame.spectral_gap, 1e-6)
        # phase-normalized kernel vector is e_0
        self.assertTrue(frame.jets[0][0].allclose(QVector.basis(N, 0), 1e-12))

    def test_rank_two(self):
        frame = rank_two_frame()
        self.assertEqual(frame.rank, 2)

    def test_base_point_reduced_and_logged(self):
        factory = MemoryLoggerFactory()
        frame = frame_from_right_inverse(cndu_matrices()[0], J, K, logger_factory=factory)
        self.assertTrue(frame.base.isclose(I))
        self.assertTrue(any("reduced form" in m for m in factory.get_messages()))

    def test_real_base_point(self):
        with self.assertRaises(RealS):
            frame_from_right_inverse(cndu_matrices()[0], Quaternion(0.5), K)

    def test_empty_kernel(self):
        t = QMatrix.diag([Quaternion(0, 2), Quaternion(0, 3)])
        with self.assertRaises(EmptyKernel):
            frame_from_right_inverse(t, I, 2, logger_factory=MemoryLoggerFactory())

    def test_truncation_guard(self):
        factory = MemoryLoggerFactory()
        with self.assertRaises(IllConditioned):
            frame_from_right_inverse(cndu_matrices()[0], CNDU_BASE, 1, logger_factory=factory)
        self.assertTrue(factory.has_errors())

    def test_complex_jet_round_trip(self):
        frame = cndu_frame()
        rebuilt = JetFrame.from_complex_jets(frame.base, [frame.jet_matrix(m) for m in range(K + 1)])
        self.assertTrue(np.array_equal(rebuilt.stacked(), frame.stacked()))
        self.assertEqual(frame.stacked().shape, (2 * N, K + 1))


class TestDerivativeIdentities(unittest.TestCase):
    def test_right_inverse_frames(self):
        for which in (0, 1):
            report = derivative_identity_check(cndu_matrices()[which], cndu_frame(which))
            self.assertLess(report.max_residual, 1e-9)
            self.assertEqual(len(report.first_order), K + 1)
            self.assertEqual(len(report.power), 3)

    def test_closed_form_jets_satisfy_identities(self):
        for which, name in enumerate(("t", "t_tilde")):
            report = derivative_identity_check(cndu_matrices()[which], cndu_jets(name, N, K))
            self.assertLess(report.max_residual, 1e-12, name)

    def test_jets_of_other_operator_fail(self):
        t, _ = cndu_matrices()
        report = derivative_identity_check(t, cndu_jets("t_tilde", N, K))
        self.assertGreater(report.max_residual, 1e-3)

    def test_holomorphic_regauge_keeps_identities(self):
        t, _ = cndu_matrices()
        frame = cndu_frame().regauge([1.0, 0.3 - 0.2j, 0.1j])
        self.assertLess(derivative_identity_check(t, frame).max_residual, 1e-9)

    def test_regauge_constant(self):
        frame = cndu_frame()
        doubled = frame.regauge([2.0])
        for m in range(K + 1):
            self.assertTrue(doubled.jets[0][m].allclose(frame.jets[0][m].scale(2.0), 1e-12))

    def test_jet_basis(self):
        t, _ = cndu_matrices()
        frame = cndu_frame()
        for k in range(1, K + 2):
            report = jet_basis_check(t, frame, k)
            self.assertTrue(report.ok, f"k={k}: rank {report.rank}, residual {report.kernel_residual:.3e}")
        with self.assertRaises(ValueError):
            jet_basis_check(t, frame, K + 2)

    def test_pencil_matrix(self):
        t, _ = cndu_matrices()
        frame = cndu_frame()
        c = pencil_matrix_on_jets(t, frame, 5)
        self.assertLess(np.max(np.abs(c - expected_pencil_matrix(1j, 5))), 1e-9)

    def test_pencil_matrix_needs_rank_one(self):
        frame = rank_two_frame()
        with self.assertRaises(RankMismatch):
            pencil_matrix_on_jets(QMatrix.diag([I, I, Quaternion(0, 2)]), frame, 2)


class TestGramAndRigidity(unittest.TestCase):
    def test_gram_symmetry(self):
        table = gram_data(cndu_frame())
        self.assertLess(table.symmetry_residual(), 1e-12)
        self.assertTrue(table.base_block_positive())
        self.assertEqual(table.order, K)
        self.assertEqual(table.rank, 1)
        self.assertAlmostEqual(table.entry(0, 0, 0, 0).a0, 1.0, places=12)

    def test_transported_frames_are_rigid(self):
        t, _ = cndu_matrices()
        frame = cndu_frame()
        q = span_basis(frame)
        for seed in range(5):
            u0, _ = random_conjugate_fixture(t, seed)
            result = rigidity_check(frame, frame.transported(u0), logger_factory=MemoryLoggerFactory())
            self.assertTrue(result.congruent)
            self.assertLess(np.linalg.norm((result.u.to_complex() - u0.to_complex()) @ q, 2), 1e-8)
            self.assertLess(result.isometry_residual, 1e-10)

    def test_perturbation_breaks_congruence(self):
        table = gram_data(cndu_frame())
        verdict = gram_congruent(table, table.perturbed(1, 0, 0, 0, 1e-4))
        self.assertFalse(verdict.congruent)
        self.assertGreater(verdict.base_deviation, 1e-6)
        self.assertTrue(gram_congruent(table, table).congruent)

    def test_verdict_rests_on_base_entries(self):
        table = gram_data(cndu_frame())
        verdict = gram_congruent(table, table.perturbed(2, 3, 0, 0, 1e-2))
        self.assertTrue(verdict.congruent)
        self.assertEqual(verdict.base_deviation, 0.0)
        self.assertFalse(verdict.full_table_agrees)
        self.assertGreater(verdict.full_deviation, 1e-8)

    def test_transported_frames_agree_on_full_table(self):
        t, _ = cndu_matrices()
        u0, _ = random_conjugate_fixture(t, 4)
        factory = MemoryLoggerFactory()
        result = rigidity_check(cndu_frame(), cndu_frame().transported(u0), logger_factory=factory)
        self.assertTrue(result.congruent)
        self.assertTrue(result.full_table_agrees)
        self.assertLess(result.full_deviation, 1e-8)
        self.assertFalse(factory.has_errors())

    def test_different_operators_not_congruent(self):
        result = rigidity_check(cndu_frame(0), cndu_frame(1), logger_factory=MemoryLoggerFactory())
        self.assertFalse(result.congruent)
        self.assertIsNone(result.u)

    def test_incompatible_frames(self):
        with self.assertRaises(RankMismatch):
            rigidity_check(cndu_frame(), rank_two_frame())
        with self.assertRaises(SizeMismatch):
            rigidity_check(cndu_frame(k=6), cndu_frame(k=8))

    def test_normalized_frame(self):
        psi = normalize_frame(cndu_frame())
        base = psi.jet_matrix(0)
        self.assertAlmostEqual(float(np.real(base.conj().T @ base)[0, 0]), 1.0, places=12)
        for m in range(1, K + 1):
            self.assertLess(np.max(np.abs(base.conj().T @ psi.jet_matrix(m))), 1e-10)


class TestOperatorEquivalence(unittest.TestCase):
    def test_conjugated_fixtures(self):
        t, _ = cndu_matrices()
        for seed in (1, 2, 3):
            u0, conjugated = random_conjugate_fixture(t, seed)
            result = operator_equivalence(t, conjugated, CNDU_BASE, K, logger_factory=MemoryLoggerFactory())
            self.assertTrue(result.equivalent, result.reason)
            self.assertLess(result.residual, 1e-8)
            self.assertIsNotNone(result.u)

    def test_example_pair_is_not_equivalent(self):
        t, t_tilde = cndu_matrices()
        result = operator_equivalence(t, t_tilde, CNDU_BASE, K, logger_factory=MemoryLoggerFactory())
        self.assertFalse(result.equivalent)
        self.assertIsNone(result.u)
        self.assertTrue(result.reason)


def random_gauge(rng: np.random.Generator, degree: int = 3) -> list:
    """Coefficients of a polynomial f with f(w0) != 0; multiplying by f is upper triangular on jets."""
    coeffs = (rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)) * 0.5 ** np.arange(degree + 1)
    coeffs[0] = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    return list(coeffs)


class TestGaugeIndependence(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_shared_gauge_keeps_rigidity(self):
        t, _ = cndu_matrices()
        frame = cndu_frame()
        q = span_basis(frame)
        for seed in range(3):
            f = random_gauge(self.rng)
            u0, _ = random_conjugate_fixture(t, seed)
            result = rigidity_check(frame.regauge(f), frame.transported(u0).regauge(f),
                                    logger_factory=MemoryLoggerFactory())
            self.assertTrue(result.congruent)
            self.assertTrue(result.full_table_agrees)
            self.assertLess(np.linalg.norm((result.u.to_complex() - u0.to_complex()) @ q, 2), 1e-8)

    def test_shared_gauge_keeps_example_pair_apart(self):
        f = random_gauge(self.rng)
        result = rigidity_check(cndu_frame(0).regauge(f), cndu_frame(1).regauge(f),
                                logger_factory=MemoryLoggerFactory())
        self.assertFalse(result.congruent)
        self.assertIsNone(result.u)

    def test_independent_gauges_keep_equivalence(self):
        t, _ = cndu_matrices()
        factory = MemoryLoggerFactory()
        for seed in (1, 2):
            _, conjugated = random_conjugate_fixture(t, seed)
            first = frame_from_right_inverse(t, CNDU_BASE, K, logger_factory=factory).regauge(random_gauge(self.rng))
            second = frame_from_right_inverse(conjugated, CNDU_BASE, K, logger_factory=factory).regauge(
                random_gauge(self.rng)
            )
            result = operator_equivalence(t, conjugated, CNDU_BASE, K, logger_factory=factory, frames=(first, second))
            self.assertTrue(result.equivalent, result.reason)
            self.assertLess(result.residual, 1e-8)

    def test_independent_gauges_keep_example_pair_apart(self):
        t, t_tilde = cndu_matrices()
        frames = (cndu_frame(0).regauge(random_gauge(self.rng)), cndu_frame(1).regauge(random_gauge(self.rng)))
        result = operator_equivalence(t, t_tilde, CNDU_BASE, K, logger_factory=MemoryLoggerFactory(), frames=frames)
        self.assertFalse(result.equivalent)
        self.assertIsNone(result.u)


class TestSections(unittest.TestCase):
    def test_jet_section_is_holomorphic(self):
        section = JetSection(cndu_frame())
        self.assertLess(cauchy_riemann_residual(section, 1.1j + 0.05), 1e-6)

    def test_antiholomorphic_section_detected(self):
        section = FunctionSection(
            lambda w: QVector(np.array([1.0, np.conj(w)], dtype=complex)),
            lambda w: QVector.zeros(2),
        )
        self.assertGreater(cauchy_riemann_residual(section, 0.3 + 0.2j), 0.1)

    def test_jet_section_matches_frame_at_base(self):
        frame = cndu_frame()
        section = JetSection(frame)
        self.assertTrue(section.value(1j).allclose(frame.jets[0][0], 1e-14))
        self.assertTrue(section.derivative(1j).allclose(frame.jets[0][1], 1e-14))
        self.assertAlmostEqual(section.norm_sq(1j), 1.0, places=12)

    def test_spanning_report(self):
        values = spanning_report(cndu_frame(), 10)
        self.assertEqual(len(values), 10)
        for i in range(K + 1):
            self.assertAlmostEqual(values[i], 1.0, places=8)
        for i in range(K + 1, 10):
            self.assertLess(values[i], 1e-8)


if __name__ == "__main__":
    unittest.main()
