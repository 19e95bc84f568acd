import numpy as np
import pytest

from qksvm.featuremap import FeatureMapConfig, embed, embedding_circuit
from qksvm.qkernel import (
    cross_gram,
    gram_matrix,
    kernel_entry,
    matrix_from_text,
    matrix_to_text,
)
from qksvm.statevector import fidelity

from oracles import circuit_unitary

CONFIG = FeatureMapConfig(n_features=2, depth=2)


class TestKernelEntry:
    def test_self_kernel_is_one(self, rng):
        x = rng.uniform(0, 1, size=2)
        theta = rng.normal(size=4)
        assert kernel_entry(x, x, theta, CONFIG) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self, rng):
        x, y = rng.uniform(0, 1, size=(2, 2))
        theta = rng.normal(size=4)
        assert kernel_entry(x, y, theta, CONFIG) == pytest.approx(
            kernel_entry(y, x, theta, CONFIG), abs=1e-12
        )

    def test_against_dense_matrix_oracle(self):
        theta = np.zeros(4)
        x_i = np.array([0.1, 0.2])
        x_j = np.array([0.9, 0.8])
        zero = np.array([1, 0, 0, 0], dtype=complex)
        a = circuit_unitary(embedding_circuit(x_i, theta, CONFIG)) @ zero
        b = circuit_unitary(embedding_circuit(x_j, theta, CONFIG)) @ zero
        expected = abs(np.vdot(a, b)) ** 2
        exact = kernel_entry(x_i, x_j, theta, CONFIG)
        assert exact == pytest.approx(expected, abs=1e-9)
        sampled = kernel_entry(x_i, x_j, theta, CONFIG, shots=8192, seed=1)
        assert sampled == pytest.approx(exact, abs=0.02)

    def test_shot_mode_reproducible(self, rng):
        x, y = rng.uniform(0, 1, size=(2, 2))
        theta = rng.normal(size=4)
        a = kernel_entry(x, y, theta, CONFIG, shots=512, seed=7)
        b = kernel_entry(x, y, theta, CONFIG, shots=512, seed=7)
        assert a == b


class TestGramMatrix:
    def test_duplicated_points_all_ones(self):
        X = np.tile([0.4, 0.6], (3, 1))
        K = gram_matrix(X, np.zeros(4), CONFIG)
        np.testing.assert_allclose(K, np.ones((3, 3)), atol=1e-12)

    def test_single_point(self):
        K = gram_matrix([[0.2, 0.8]], np.zeros(4), CONFIG)
        np.testing.assert_array_equal(K, [[1.0]])

    def test_psd_and_matches_entrywise_calls(self, rng):
        X = rng.uniform(0, 1, size=(4, 2))
        theta = rng.normal(size=4)
        K = gram_matrix(X, theta, CONFIG)
        assert np.linalg.eigvalsh(K).min() >= -1e-9
        for i in range(4):
            for j in range(4):
                assert K[i, j] == pytest.approx(
                    kernel_entry(X[i], X[j], theta, CONFIG), abs=1e-12
                )

    def test_exact_symmetry_and_unit_diagonal(self, rng):
        X = rng.uniform(0, 1, size=(6, 2))
        K = gram_matrix(X, rng.normal(size=4), CONFIG)
        assert np.array_equal(K, K.T)
        np.testing.assert_array_equal(np.diag(K), np.ones(6))
        assert K.min() >= 0.0 and K.max() <= 1.0

    def test_permutation_equivariance(self, rng):
        X = rng.uniform(0, 1, size=(5, 2))
        theta = rng.normal(size=4)
        perm = rng.permutation(5)
        K = gram_matrix(X, theta, CONFIG)
        K_perm = gram_matrix(X[perm], theta, CONFIG)
        np.testing.assert_allclose(K_perm, K[np.ix_(perm, perm)], atol=1e-12)

    def test_cached_embeddings_match_pairwise_recomputation(self, rng):
        X = rng.uniform(0, 1, size=(5, 2))
        theta = rng.normal(size=4)
        K = gram_matrix(X, theta, CONFIG)
        states = [embed(x, theta, CONFIG) for x in X]
        for i in range(5):
            for j in range(i + 1, 5):
                assert K[i, j] == pytest.approx(
                    fidelity(states[i], states[j]), abs=1e-12
                )

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            gram_matrix(np.empty((0, 2)), np.zeros(4), CONFIG)

    def test_shot_mode_diagonal_not_sampled(self, rng):
        X = rng.uniform(0, 1, size=(3, 2))
        K = gram_matrix(X, rng.normal(size=4), CONFIG, shots=16, seed=0)
        np.testing.assert_array_equal(np.diag(K), np.ones(3))
        assert np.array_equal(K, K.T)

    def test_shot_mode_seed_isolation_per_entry(self, rng):
        # entry seeds derive from (seed, i, j): same seed -> same matrix
        X = rng.uniform(0, 1, size=(4, 2))
        theta = rng.normal(size=4)
        a = gram_matrix(X, theta, CONFIG, shots=256, seed=5)
        b = gram_matrix(X, theta, CONFIG, shots=256, seed=5)
        c = gram_matrix(X, theta, CONFIG, shots=256, seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_shot_convergence_6x6(self, rng):
        X = rng.uniform(0, 1, size=(6, 2))
        theta = rng.normal(size=4)
        exact = gram_matrix(X, theta, CONFIG)
        hits = 0
        for seed in range(20):
            sampled = gram_matrix(X, theta, CONFIG, shots=65536, seed=seed)
            if np.max(np.abs(sampled - exact)) <= 0.01:
                hits += 1
        assert hits >= 19


class TestCrossGram:
    def test_equals_gram_on_identical_lists(self, rng):
        X = rng.uniform(0, 1, size=(4, 2))
        theta = rng.normal(size=4)
        cross = cross_gram(X, X, theta, CONFIG)
        gram = gram_matrix(X, theta, CONFIG)
        np.testing.assert_allclose(cross, gram, atol=1e-12)

    def test_identical_point_gives_unit_entry(self, rng):
        X_train = rng.uniform(0, 1, size=(3, 2))
        theta = rng.normal(size=4)
        rows = cross_gram(X_train[1:2], X_train, theta, CONFIG)
        assert rows[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_matches_entrywise_calls(self, rng):
        X_test = rng.uniform(0, 1, size=(2, 2))
        X_train = rng.uniform(0, 1, size=(3, 2))
        theta = rng.normal(size=4)
        rows = cross_gram(X_test, X_train, theta, CONFIG)
        assert rows.shape == (2, 3)
        for t in range(2):
            for s in range(3):
                assert rows[t, s] == pytest.approx(
                    kernel_entry(X_test[t], X_train[s], theta, CONFIG), abs=1e-12
                )

    def test_empty_rejected(self, rng):
        X = rng.uniform(0, 1, size=(2, 2))
        with pytest.raises(ValueError):
            cross_gram(np.empty((0, 2)), X, np.zeros(4), CONFIG)


class TestKernelValidityBulk:
    def test_random_datasets_exact_mode(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            n = int(rng.integers(2, 11))
            X = rng.uniform(0, 1, size=(n, 2))
            theta = rng.normal(size=4)
            K = gram_matrix(X, theta, CONFIG)
            assert np.array_equal(K, K.T)
            assert np.max(np.abs(np.diag(K) - 1.0)) <= 1e-10
            assert K.min() >= 0.0 and K.max() <= 1.0
            assert np.linalg.eigvalsh(K).min() >= -1e-9


class TestSerialization:
    def test_round_trip(self, rng):
        X = rng.uniform(0, 1, size=(4, 2))
        K = gram_matrix(X, rng.normal(size=4), CONFIG)
        text = matrix_to_text(K)
        assert text.splitlines()[0] == "4"
        back = matrix_from_text(text)
        np.testing.assert_allclose(back, K, atol=1e-11)

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            matrix_from_text("2\n1 0\n")
        with pytest.raises(ValueError):
            matrix_from_text("")
