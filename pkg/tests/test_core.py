import numpy as np
import pytest

from moram import (
    BinIndexVector,
    ModuloObservation,
    SparseSignal,
    gaussian_matrix,
    hard_threshold,
    random_sparse_signal,
    relative_error,
)

from oracles import nearest_sparse


class TestGaussianMatrix:
    def test_deterministic_given_seed(self):
        a = gaussian_matrix(3, 2, seed=7)
        b = gaussian_matrix(3, 2, seed=7)
        assert np.array_equal(a.entries, b.entries)
        assert a.seed == 7

    def test_different_seeds_differ(self):
        a = gaussian_matrix(3, 2, seed=7)
        b = gaussian_matrix(3, 2, seed=8)
        assert not np.array_equal(a.entries, b.entries)

    def test_standard_normal_moments(self):
        # Monte Carlo oracle: sample moments of 100k draws.
        ens = gaussian_matrix(2000, 50, seed=1)
        assert abs(ens.entries.mean()) < 0.05
        assert abs(ens.entries.var() - 1.0) < 0.1

    @pytest.mark.parametrize("m,n", [(0, 3), (3, 0), (0, 0)])
    def test_rejects_empty_dimensions(self, m, n):
        with pytest.raises(ValueError):
            gaussian_matrix(m, n, seed=0)

    def test_entries_read_only(self):
        ens = gaussian_matrix(2, 2, seed=0)
        with pytest.raises(ValueError):
            ens.entries[0, 0] = 1.0


class TestRandomSparseSignal:
    def test_paper_scale_draw(self):
        sig = random_sparse_signal(1000, 3, seed=5, normalize=True)
        assert np.count_nonzero(sig.values) == 3
        assert abs(np.linalg.norm(sig.values) - 1.0) <= 1e-12

    def test_fully_dense_when_s_equals_n(self):
        sig = random_sparse_signal(4, 4, seed=0, normalize=False)
        assert np.count_nonzero(sig.values) == 4

    def test_single_support_normalizes_to_unit_entry(self):
        sig = random_sparse_signal(10, 1, seed=2, normalize=True)
        support = sig.support()
        assert support.size == 1
        assert abs(abs(sig.values[support[0]]) - 1.0) <= 1e-12

    def test_deterministic(self):
        a = random_sparse_signal(50, 5, seed=3)
        b = random_sparse_signal(50, 5, seed=3)
        assert np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("n,s", [(10, 0), (10, 11), (5, -1)])
    def test_rejects_bad_sparsity(self, n, s):
        with pytest.raises(ValueError):
            random_sparse_signal(n, s, seed=0)


class TestHardThreshold:
    def test_keeps_largest_magnitude(self):
        assert np.array_equal(hard_threshold([3.0, -5.0, 1.0], 1), [0.0, -5.0, 0.0])

    def test_identity_when_s_exceeds_length(self):
        assert np.array_equal(hard_threshold([1.0, 2.0], 5), [1.0, 2.0])

    def test_tie_breaks_to_lowest_index(self):
        assert np.array_equal(hard_threshold([2.0, -2.0, 0.0], 1), [2.0, 0.0, 0.0])

    def test_s_zero_gives_zero_vector(self):
        assert np.array_equal(hard_threshold([1.0, -1.0], 0), [0.0, 0.0])

    def test_euclidean_optimality_brute_force(self):
        rng = np.random.default_rng(42)
        for n in (4, 6, 8):
            for s in (1, 2, 3):
                v = rng.standard_normal(n)
                kept = hard_threshold(v, s)
                _, best_gap = nearest_sparse(v, s)
                assert np.count_nonzero(kept) <= s
                assert np.linalg.norm(v - kept) <= best_gap + 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            v = rng.standard_normal(12)
            s = int(rng.integers(0, 12))
            once = hard_threshold(v, s)
            assert np.array_equal(hard_threshold(once, s), once)


class TestRelativeError:
    def test_identical_vectors(self):
        x = np.array([1.0, 2.0, -3.0])
        assert relative_error(x, x) == 0.0

    def test_zero_estimate_of_unit_direction(self):
        assert relative_error([0.0, 0.0], [0.0, 3.0]) == 1.0

    def test_hand_evaluated_ratio(self):
        assert relative_error([1.0, 1.0], [1.0, 0.0]) == pytest.approx(1.0)

    def test_zero_reference_raises(self):
        with pytest.raises(ZeroDivisionError):
            relative_error([1.0, 2.0], [0.0, 0.0])

    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError):
            relative_error([1.0], [1.0, 2.0])


class TestDomainTypes:
    def test_sparse_signal_rejects_budget_overflow(self):
        with pytest.raises(ValueError):
            SparseSignal(np.array([1.0, 2.0, 3.0]), 2)

    def test_sparse_signal_rejects_bad_budget(self):
        with pytest.raises(ValueError):
            SparseSignal(np.array([1.0, 0.0]), 0)
        with pytest.raises(ValueError):
            SparseSignal(np.array([1.0, 0.0]), 3)

    def test_bin_vector_rejects_non_binary(self):
        with pytest.raises(ValueError):
            BinIndexVector(np.array([0.0, 0.5, 1.0]))

    def test_bin_vector_flip_count(self):
        a = BinIndexVector(np.array([0, 1, 1, 0]))
        b = BinIndexVector(np.array([0, 0, 1, 1]))
        assert a.flips_from(b) == 2
        assert a.flips_from(a) == 0

    def test_observation_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ModuloObservation(np.array([0.5, 4.2]), 4.0)
        with pytest.raises(ValueError):
            ModuloObservation(np.array([-0.2, 1.0]), 4.0)

    def test_observation_accepts_boundaries(self):
        obs = ModuloObservation(np.array([0.0, 4.0, 2.0]), 4.0)
        assert obs.num_measurements == 3
