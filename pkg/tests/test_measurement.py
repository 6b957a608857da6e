import math

import numpy as np
import pytest

from cspsa_tomo import measurement, states
from cspsa_tomo.errors import DimensionMismatch, InvalidDistribution


class TestCompleteBasis:
    def test_canonical_fixed_point(self):
        psi = states.normalize([1.0, 0.0, 0.0])
        basis = measurement.complete_basis(psi)
        np.testing.assert_array_equal(basis.matrix, np.eye(3, dtype=complex))

    def test_first_column_is_candidate_exactly(self):
        rng = np.random.default_rng(21)
        for d in (2, 4, 8):
            psi = states.haar_random_state(d, rng)
            basis = measurement.complete_basis(psi)
            np.testing.assert_array_equal(basis.matrix[:, 0], psi.amplitudes)

    def test_unitarity_random_states(self):
        rng = np.random.default_rng(22)
        for d in (2, 4, 8, 16):
            for _ in range(25):
                psi = states.haar_random_state(d, rng)
                u = measurement.complete_basis(psi).matrix
                dev = np.max(np.abs(u.conj().T @ u - np.eye(d)))
                assert dev <= 1e-10

    def test_two_dim_companion(self):
        psi = states.normalize([1.0, 1.0])
        basis = measurement.complete_basis(psi)
        v = basis.vector(1)
        assert abs(np.vdot(v, psi.amplitudes)) <= 1e-10
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        psi = states.haar_random_state(4, np.random.default_rng(23))
        first = measurement.complete_basis(psi).matrix
        second = measurement.complete_basis(psi).matrix
        np.testing.assert_array_equal(first, second)

    def test_vectors_accessor(self):
        psi = states.haar_random_state(3, np.random.default_rng(24))
        basis = measurement.complete_basis(psi)
        assert basis.dim == 3
        for i in range(3):
            np.testing.assert_array_equal(basis.vector(i), basis.matrix[:, i])


class TestMeasurementBasisValidation:
    def test_rejects_nonorthonormal(self):
        bad = np.array([[1.0, 0.5], [0.0, 1.0]], dtype=complex)
        with pytest.raises(ValueError):
            measurement.MeasurementBasis(bad)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            measurement.MeasurementBasis(np.ones((2, 3), dtype=complex))


class TestOutcomeProbabilities:
    def test_projector_onto_self(self):
        rng = np.random.default_rng(25)
        psi = states.haar_random_state(3, rng)
        basis = measurement.complete_basis(psi)
        p = measurement.outcome_probabilities(basis, psi)
        np.testing.assert_allclose(p, [1.0, 0.0, 0.0], atol=1e-12)

    def test_orthogonal_candidate(self):
        basis = measurement.complete_basis(states.normalize([1.0, 0.0]))
        truth = states.normalize([0.0, 1.0])
        p = measurement.outcome_probabilities(basis, truth)
        np.testing.assert_allclose(p, [0.0, 1.0], atol=1e-12)

    def test_balanced_superposition(self):
        basis = measurement.MeasurementBasis(np.eye(2, dtype=complex))
        truth = states.normalize([1.0, 1.0j])
        p = measurement.outcome_probabilities(basis, truth)
        np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-12)

    def test_sums_to_one(self):
        rng = np.random.default_rng(26)
        for d in (2, 4, 8, 16):
            psi = states.haar_random_state(d, rng)
            truth = states.haar_random_state(d, rng)
            p = measurement.outcome_probabilities(measurement.complete_basis(psi), truth)
            assert abs(p.sum() - 1.0) <= 1e-10
            assert p.min() >= 0.0

    def test_dimension_mismatch(self):
        basis = measurement.MeasurementBasis(np.eye(2, dtype=complex))
        with pytest.raises(DimensionMismatch):
            measurement.outcome_probabilities(basis, states.normalize([1, 0, 0]))


class TestSimulateCounts:
    def test_degenerate_distribution(self):
        rng = np.random.default_rng(27)
        counts = measurement.simulate_counts([1.0, 0.0], 50, rng)
        np.testing.assert_array_equal(counts, [50, 0])

    def test_binomial_mean(self):
        rng = np.random.default_rng(28)
        total = 0.0
        reps = 100
        shots = 10**5
        for _ in range(reps):
            counts = measurement.simulate_counts([0.5, 0.5], shots, rng)
            total += counts[0] / shots
        assert total / reps == pytest.approx(0.5, abs=0.005)

    def test_counts_sum_to_shots(self):
        rng = np.random.default_rng(29)
        for d in (2, 3, 16):
            p = rng.dirichlet(np.ones(d))
            counts = measurement.simulate_counts(p, 137, rng)
            assert counts.sum() == 137
            assert counts.min() >= 0

    def test_negative_probability_rejected(self):
        with pytest.raises(InvalidDistribution):
            measurement.simulate_counts([-0.1, 1.1], 10, np.random.default_rng(0))

    def test_bad_sum_rejected(self):
        with pytest.raises(InvalidDistribution):
            measurement.simulate_counts([0.5, 0.4], 10, np.random.default_rng(0))

    def test_tiny_negative_tolerated(self):
        rng = np.random.default_rng(30)
        counts = measurement.simulate_counts([1.0, -1e-13], 20, rng)
        assert counts.sum() == 20

    def test_invalid_shots(self):
        with pytest.raises(ValueError):
            measurement.simulate_counts([0.5, 0.5], 0, np.random.default_rng(0))


class TestEstimateInfidelity:
    def _record(self, counts):
        basis = measurement.MeasurementBasis(np.eye(len(counts), dtype=complex))
        return measurement.CountRecord(basis, np.asarray(counts), int(np.sum(counts)))

    def test_perfect(self):
        assert measurement.estimate_infidelity(self._record([100, 0])) == 0.0

    def test_ninety_ten(self):
        assert measurement.estimate_infidelity(self._record([90, 10])) == pytest.approx(0.1)

    def test_orthogonal(self):
        assert measurement.estimate_infidelity(self._record([0, 100])) == 1.0


class TestCountRecordValidation:
    def test_sum_mismatch_rejected(self):
        basis = measurement.MeasurementBasis(np.eye(2, dtype=complex))
        with pytest.raises(ValueError):
            measurement.CountRecord(basis, np.array([3, 4]), 10)

    def test_negative_counts_rejected(self):
        basis = measurement.MeasurementBasis(np.eye(2, dtype=complex))
        with pytest.raises(ValueError):
            measurement.CountRecord(basis, np.array([-1, 11]), 10)


def test_infinite_shot_consistency():
    # The frequency estimate converges to the exact infidelity; at 1e6
    # shots it must sit within three binomial standard errors.
    rng = np.random.default_rng(31)
    shots = 10**6
    for _ in range(20):
        candidate = states.haar_random_state(2, rng)
        truth = states.haar_random_state(2, rng)
        basis = measurement.complete_basis(candidate)
        p = measurement.outcome_probabilities(basis, truth)
        counts = measurement.simulate_counts(p, shots, rng)
        record = measurement.CountRecord(basis, counts, shots)
        est = measurement.estimate_infidelity(record)
        exact = states.infidelity(candidate, truth)
        se = math.sqrt(max(p[0] * (1.0 - p[0]), 1e-30) / shots)
        assert abs(est - exact) <= 3.0 * se + 1e-12
