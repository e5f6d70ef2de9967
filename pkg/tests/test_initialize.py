import numpy as np
import pytest

from moram import (
    BinIndexVector,
    MeasurementEnsemble,
    ModuloObservation,
    SparseSignal,
    correct_measurements,
    forward,
    gaussian_matrix,
    initial_estimate,
    ml_bin_indices,
    moram_initialize,
    random_sparse_signal,
    relative_error,
    true_bin_indices,
)
from moram.harness import derive_seed


class TestMlBinIndices:
    def test_below_midpoint_is_bin_zero(self):
        obs = ModuloObservation(np.array([1.0]), 4.0)
        assert ml_bin_indices(obs).bits[0] == 0

    def test_midpoint_boundary_is_bin_one(self):
        obs = ModuloObservation(np.array([2.0]), 4.0)
        assert ml_bin_indices(obs).bits[0] == 1

    def test_clear_cases(self):
        obs = ModuloObservation(np.array([3.9, 0.1]), 4.0)
        assert np.array_equal(ml_bin_indices(obs).bits, [1, 0])

    def test_out_of_range_observation_rejected_at_construction(self):
        with pytest.raises(ValueError):
            ModuloObservation(np.array([4.5]), 4.0)

    def test_agrees_with_true_bins_outside_ambiguous_band(self):
        # Disagreement is only possible when |<a_i, x>| >= R/2.
        A = gaussian_matrix(300, 40, seed=21)
        x = random_sparse_signal(40, 4, seed=22)
        r = 4.0
        obs = forward(A, x, r, strict=True)
        z = A.entries @ x.values
        ml = ml_bin_indices(obs).bits
        true = true_bin_indices(A, x).bits
        safe = np.abs(z) < r / 2.0
        assert np.array_equal(ml[safe], true[safe])


class TestCorrectMeasurements:
    def test_subtracts_period_in_bin_one(self):
        obs = ModuloObservation(np.array([3.0]), 4.0)
        p = BinIndexVector(np.array([1]))
        assert np.allclose(correct_measurements(obs, p), [-1.0])

    def test_zero_bins_leave_observation(self):
        obs = ModuloObservation(np.array([1.0, 2.5]), 4.0)
        p = BinIndexVector(np.zeros(2))
        assert np.allclose(correct_measurements(obs, p), obs.y)

    def test_roundtrip_with_true_bins(self):
        A = gaussian_matrix(150, 30, seed=31)
        x = random_sparse_signal(30, 3, seed=32)
        obs = forward(A, x, 5.0, strict=True)
        y_c = correct_measurements(obs, true_bin_indices(A, x))
        assert np.allclose(y_c, A.entries @ x.values, atol=1e-12)

    def test_length_mismatch(self):
        obs = ModuloObservation(np.array([1.0, 2.0]), 4.0)
        with pytest.raises(ValueError):
            correct_measurements(obs, BinIndexVector(np.array([1])))


class TestInitialEstimate:
    def test_hand_evaluated_two_by_two(self):
        A = MeasurementEnsemble(np.eye(2))
        est = initial_estimate(A, np.array([1.0, 0.0]), 1)
        assert np.allclose(est.values, [0.5, 0.0])

    def test_zero_measurements_give_zero(self):
        A = gaussian_matrix(10, 6, seed=4)
        est = initial_estimate(A, np.zeros(10), 2)
        assert np.array_equal(est.values, np.zeros(6))

    def test_dimension_mismatch(self):
        A = gaussian_matrix(10, 6, seed=4)
        with pytest.raises(ValueError):
            initial_estimate(A, np.zeros(9), 2)

    def test_estimator_quality_at_paper_scale(self):
        # Monte Carlo check on the closeness of the first-order estimate.
        good = 0
        for trial in range(10):
            A = gaussian_matrix(1000, 1000, derive_seed(trial, "init-A"))
            x = random_sparse_signal(1000, 3, derive_seed(trial, "init-x"))
            obs = forward(A, x, 4.0)
            x0 = moram_initialize(obs, A, 3)
            if relative_error(x0.values, x.values) < 0.5:
                good += 1
        assert good >= 9


class TestMoramInitialize:
    def test_zero_chain(self):
        A = gaussian_matrix(8, 5, seed=6)
        obs = ModuloObservation(np.zeros(8), 4.0)
        x0 = moram_initialize(obs, A, 2)
        assert np.array_equal(x0.values, np.zeros(5))

    def test_output_sparsity(self):
        A = gaussian_matrix(60, 40, seed=7)
        x = random_sparse_signal(40, 5, seed=8)
        obs = forward(A, x, 4.0)
        x0 = moram_initialize(obs, A, 5)
        assert np.count_nonzero(x0.values) <= 5
        assert x0.sparsity_budget == 5

    def test_threshold_optimality_among_sparse_vectors(self):
        # H_s of the back-projection is closer to it than any s-sparse
        # vector, in particular the truth.
        A = gaussian_matrix(500, 100, seed=41)
        x = random_sparse_signal(100, 3, seed=42)
        obs = forward(A, x, 4.0, strict=True)
        p = ml_bin_indices(obs)
        y_c = correct_measurements(obs, p)
        dense = A.entries.T @ y_c / A.num_measurements
        x0 = moram_initialize(obs, A, 3)
        assert np.linalg.norm(x0.values - dense) <= np.linalg.norm(x.values - dense) + 1e-12

    def test_unbiasedness_of_backprojection(self):
        # Mean of (1/m) A^T A x over seeds approaches x coordinatewise.
        n, s, m, trials = 40, 3, 300, 40
        x = random_sparse_signal(n, s, seed=77)
        acc = np.zeros(n)
        for t in range(trials):
            A = gaussian_matrix(m, n, derive_seed(t, "unbiased"))
            acc += A.entries.T @ (A.entries @ x.values) / m
        acc /= trials
        assert np.max(np.abs(acc - x.values)) < 5.0 / np.sqrt(trials)
