import numpy as np
import pytest
from sklearn.base import clone

from qksvm.hybrid import QuantumKernelSVC
from qksvm.svm import accuracy


def blobs_2d(rng, n_per_class=30):
    """Classes split along feature 0 only; feature 1 is mild shared noise."""
    X = np.vstack([
        np.column_stack([
            rng.uniform(0.05, 0.3, size=n_per_class),
            rng.uniform(0.4, 0.6, size=n_per_class),
        ]),
        np.column_stack([
            rng.uniform(0.55, 0.8, size=n_per_class),
            rng.uniform(0.4, 0.6, size=n_per_class),
        ]),
    ])
    y = np.array([1] * n_per_class + [-1] * n_per_class)
    perm = rng.permutation(len(y))
    return X[perm], y[perm]


class TestQuantumKernelSVC:
    def test_fit_predict_separable(self, rng):
        X, y = blobs_2d(rng)
        model = QuantumKernelSVC(spsa_iterations=5, random_state=1).fit(X, y)
        assert accuracy(model.predict(X), y) >= 0.95
        assert model.final_alignment_ >= -1.0
        assert model.theta_.shape == (4,)

    def test_zero_iterations_keep_theta(self, rng):
        X, y = blobs_2d(rng, n_per_class=10)
        model = QuantumKernelSVC(spsa_iterations=0, random_state=1).fit(X, y)
        np.testing.assert_array_equal(model.theta_, np.zeros(4))
        assert model.final_alignment_ == model.initial_alignment_

    def test_deterministic_given_random_state(self, rng):
        X, y = blobs_2d(rng, n_per_class=12)
        a = QuantumKernelSVC(spsa_iterations=4, random_state=9).fit(X, y)
        b = QuantumKernelSVC(spsa_iterations=4, random_state=9).fit(X, y)
        np.testing.assert_array_equal(a.theta_, b.theta_)
        probe = rng.uniform(0, 1, size=(8, 2))
        np.testing.assert_array_equal(a.predict(probe), b.predict(probe))

    def test_random_init_differs_from_zeros(self, rng):
        X, y = blobs_2d(rng, n_per_class=10)
        zeros = QuantumKernelSVC(spsa_iterations=0, random_state=2).fit(X, y)
        random_init = QuantumKernelSVC(
            spsa_iterations=0, theta_init="random", random_state=2
        ).fit(X, y)
        assert not np.array_equal(zeros.theta_, random_init.theta_)

    def test_align_subset_runs(self, rng):
        X, y = blobs_2d(rng, n_per_class=15)
        model = QuantumKernelSVC(
            spsa_iterations=4, align_subset=10, random_state=3
        ).fit(X, y)
        assert hasattr(model, "svc_")

    def test_sklearn_clone_compatible(self):
        model = QuantumKernelSVC(depth=3, C=2.0, spsa_iterations=7)
        twin = clone(model)
        assert twin.get_params() == model.get_params()

    def test_rejects_unscaled_features(self, rng):
        X = rng.normal(size=(10, 2)) * 10
        y = np.array([1, -1] * 5)
        with pytest.raises(ValueError):
            QuantumKernelSVC(spsa_iterations=0).fit(X, y)

    def test_rejects_unknown_theta_init(self, rng):
        X, y = blobs_2d(rng, n_per_class=5)
        with pytest.raises(ValueError):
            QuantumKernelSVC(theta_init="ones", spsa_iterations=0).fit(X, y)

    def test_stage_timings_recorded(self, rng):
        X, y = blobs_2d(rng, n_per_class=10)
        model = QuantumKernelSVC(spsa_iterations=2, random_state=0).fit(X, y)
        assert set(model.stage_seconds_) == {"align", "gram", "train"}
        assert all(v >= 0 for v in model.stage_seconds_.values())

    def test_shot_mode_smoke(self, rng):
        X, y = blobs_2d(rng, n_per_class=8)
        model = QuantumKernelSVC(
            spsa_iterations=2, shots=256, random_state=4
        ).fit(X, y)
        predictions = model.predict(X)
        assert set(np.unique(predictions)) <= {-1, 1}
