"""Quantum-kernel SVM estimator: alignment-tuned embedding + SMO training.

``fit`` evaluates the starting alignment, maximizes it over the ansatz
angles with SPSA, builds the quantum Gram at the tuned angles and trains
the SVM on it; ``predict`` evaluates kernel rows between new points and the
stored training points. Features must already be scaled into [0, 1].
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .alignment import (
    AlignmentTrace,
    SpsaConfig,
    SubsampledAlignment,
    alignment_objective,
    spsa_maximize,
)
from .featuremap import FeatureMapConfig
from .qkernel import cross_gram, gram_matrix
from .svm import KernelSVC
from .validation import as_feature_array, as_label_array, check_unit_interval


class QuantumKernelSVC(BaseEstimator, ClassifierMixin):
    """SVM with a fidelity kernel whose input ansatz is alignment-tuned.

    Parameters
    ----------
    depth : int
        Feature-map repetitions.
    C : float
        SVM box constraint.
    spsa_iterations, spsa_a, spsa_c, spsa_alpha, spsa_gamma, spsa_stability :
        SPSA budget and gain schedule; 0 iterations skips tuning.
    align_subset : int or None
        If set, each SPSA evaluation scores alignment on a fresh random
        subsample of this size (endpoint evaluations stay full-set).
    theta_init : "zeros" or "random"
        Initial ansatz angles: all zeros (identity ansatz) or uniform in
        [-pi, pi].
    shots : int or None
        None for exact kernels, else shots per kernel entry.
    random_state : int
        Seed for SPSA perturbations, subsampling, random init and shot noise.
    """

    def __init__(self, depth=2, C=1.0, spsa_iterations=100, spsa_a=0.1,
                 spsa_c=0.1, spsa_alpha=0.602, spsa_gamma=0.101,
                 spsa_stability=0.0, align_subset=None, theta_init="zeros",
                 shots=None, random_state=0):
        self.depth = depth
        self.C = C
        self.spsa_iterations = spsa_iterations
        self.spsa_a = spsa_a
        self.spsa_c = spsa_c
        self.spsa_alpha = spsa_alpha
        self.spsa_gamma = spsa_gamma
        self.spsa_stability = spsa_stability
        self.align_subset = align_subset
        self.theta_init = theta_init
        self.shots = shots
        self.random_state = random_state

    def tune(self, X, y) -> AlignmentTrace:
        """Maximize kernel target alignment over the ansatz angles.

        Sets ``theta_``, ``trace_``, ``initial_alignment_`` and
        ``final_alignment_`` without training the SVM.
        """
        X = as_feature_array(X)
        check_unit_interval(X)
        y = as_label_array(y)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"|X| = {X.shape[0]} but |y| = {y.shape[0]}")

        config = FeatureMapConfig(n_features=X.shape[1], depth=self.depth)
        seeds = np.random.SeedSequence(self.random_state).spawn(4)
        spsa_seed = int(seeds[0].generate_state(1, dtype=np.uint64)[0])
        subset_seed = int(seeds[1].generate_state(1, dtype=np.uint64)[0])
        shot_seed = int(seeds[2].generate_state(1, dtype=np.uint64)[0])

        if self.theta_init == "zeros":
            theta0 = np.zeros(config.n_ansatz_params)
        elif self.theta_init == "random":
            init_rng = np.random.default_rng(seeds[3])
            theta0 = init_rng.uniform(-np.pi, np.pi, size=config.n_ansatz_params)
        else:
            raise ValueError(
                f'theta_init must be "zeros" or "random", got {self.theta_init!r}'
            )

        def full_objective(theta):
            return alignment_objective(
                theta, X, y, config, shots=self.shots, seed=shot_seed
            )

        if self.align_subset is not None:
            objective = SubsampledAlignment(
                X, y, config, subset_size=self.align_subset, seed=subset_seed,
                shots=self.shots, shot_seed=shot_seed,
            )
        else:
            objective = full_objective

        spsa_cfg = SpsaConfig(
            iterations=self.spsa_iterations, a=self.spsa_a, c=self.spsa_c,
            alpha=self.spsa_alpha, gamma=self.spsa_gamma,
            stability=self.spsa_stability, seed=spsa_seed,
        )
        trace = spsa_maximize(
            objective, theta0, spsa_cfg, trace_objective=full_objective
        )

        self.config_ = config
        self.shot_seed_ = shot_seed
        self.theta_ = trace.theta_final
        self.trace_ = trace
        self.initial_alignment_ = trace.initial_alignment
        self.final_alignment_ = trace.final_alignment
        return trace

    def fit(self, X, y):
        stage_seconds = {}
        tic = time.perf_counter()
        self.tune(X, y)
        stage_seconds["align"] = time.perf_counter() - tic
        X = as_feature_array(X)
        y = as_label_array(y)

        tic = time.perf_counter()
        K = gram_matrix(X, self.theta_, self.config_, shots=self.shots,
                        seed=self.shot_seed_)
        stage_seconds["gram"] = time.perf_counter() - tic

        tic = time.perf_counter()
        self.svc_ = KernelSVC(C=self.C, kernel="precomputed").fit(K, y)
        stage_seconds["train"] = time.perf_counter() - tic

        self.X_fit_ = X
        self.stage_seconds_ = stage_seconds
        self.classes_ = np.array([-1, 1])
        return self

    def kernel_rows(self, X) -> np.ndarray:
        """Kernel block between ``X`` and the full training set."""
        X = as_feature_array(X, n_features=self.X_fit_.shape[1])
        check_unit_interval(X)
        return cross_gram(X, self.X_fit_, self.theta_, self.config_,
                          shots=self.shots, seed=self.shot_seed_)

    def decision_function(self, X) -> np.ndarray:
        return self.svc_.decision_function(self.kernel_rows(X))

    def predict(self, X) -> np.ndarray:
        return self.svc_.predict(self.kernel_rows(X))
