"""Soft-margin SVM trained by sequential minimal optimization (SMO).

The solver works on precomputed kernel matrices, which keeps this module
free of any simulator dependency: quantum kernels enter as plain Gram
matrices, the RBF baseline computes its own. Working-set selection is the
maximal-violating-pair rule; convergence is declared when the largest KKT
violation drops below ``tol`` (default 1e-3, the usual library default).

Estimator layout follows scikit-learn: hyperparameters in ``__init__``,
state learned by ``fit`` in trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import ConvergenceError, DegenerateError
from .validation import as_feature_array, as_label_array, as_square_matrix

SUPPORT_THRESHOLD = 1e-9


def rbf_default_gamma(X) -> float:
    """Baseline RBF width 1 / (n_features * variance).

    The variance is the population variance of all feature values pooled
    together, matching the common "scale" default.
    """
    X = as_feature_array(X)
    if X.shape[0] < 1:
        raise ValueError("X must be nonempty")
    variance = float(X.var())
    if variance <= 0.0:
        raise DegenerateError(
            "features have zero variance; RBF gamma 1/(m*var) is undefined"
        )
    return 1.0 / (X.shape[1] * variance)


def _squared_distances(A, B) -> np.ndarray:
    a2 = np.sum(A * A, axis=1)
    b2 = np.sum(B * B, axis=1)
    d2 = a2[:, None] + b2[None, :] - 2.0 * (A @ B.T)
    return np.maximum(d2, 0.0)


def rbf_gram(X, gamma: float) -> np.ndarray:
    """exp(-gamma * ||x_i - x_j||^2); exactly symmetric with unit diagonal."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    X = as_feature_array(X)
    raw = np.exp(-gamma * _squared_distances(X, X))
    upper = np.triu(raw, 1)
    K = upper + upper.T
    np.fill_diagonal(K, 1.0)
    return K


def rbf_cross(X_test, X_train, gamma: float) -> np.ndarray:
    """Rectangular RBF block between test and train rows."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    X_test = as_feature_array(X_test)
    X_train = as_feature_array(X_train, n_features=X_test.shape[1])
    return np.exp(-gamma * _squared_distances(X_test, X_train))


def accuracy(predicted, actual) -> float:
    """Fraction of matching labels."""
    predicted = as_label_array(predicted, "predicted")
    actual = as_label_array(actual, "actual")
    if predicted.shape != actual.shape:
        raise ValueError(
            f"length mismatch: {predicted.shape[0]} vs {actual.shape[0]}"
        )
    return float(np.mean(predicted == actual))


def smo_solve(K, y, C: float, tol: float = 1e-3, max_iter: int = 10_000):
    """Solve the soft-margin dual on a precomputed kernel.

    Maximizes sum(alpha) - 0.5 * (alpha y)^T K (alpha y) subject to
    0 <= alpha <= C and sum(alpha * y) = 0, updating one maximal-violating
    pair per iteration.

    Returns (alpha, bias, n_iter). Raises ConvergenceError when the budget
    of ``max_iter`` pair updates is exhausted.
    """
    K = as_square_matrix(K)
    y = as_label_array(y)
    n = K.shape[0]
    if y.shape[0] != n:
        raise ValueError(f"kernel is {n}x{n} but y has {y.shape[0]} labels")
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")

    alpha = np.zeros(n)
    # F_t = y_t - decision_t drives both selection and the bias
    F = y.astype(np.float64).copy()
    pos = y > 0

    def masks():
        up = (pos & (alpha < C)) | (~pos & (alpha > 0.0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0.0))
        return up, low

    n_iter = 0
    while True:
        up, low = masks()
        f_up = np.where(up, F, -np.inf)
        f_low = np.where(low, F, np.inf)
        i = int(np.argmax(f_up))
        j = int(np.argmin(f_low))
        violation = f_up[i] - f_low[j]
        if not np.isfinite(violation) or violation <= tol:
            break
        if n_iter >= max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} pair updates "
                f"(KKT violation {violation:.3e} > tol {tol:.0e})"
            )

        # step lambda > 0 along alpha_i += y_i*lam, alpha_j -= y_j*lam
        lam_box_i = C - alpha[i] if pos[i] else alpha[i]
        lam_box_j = alpha[j] if pos[j] else C - alpha[j]
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta > 1e-12:
            lam = min(violation / eta, lam_box_i, lam_box_j)
        else:
            lam = min(lam_box_i, lam_box_j)
        alpha[i] += y[i] * lam
        alpha[j] -= y[j] * lam
        F -= lam * (K[:, i] - K[:, j])
        n_iter += 1

    free = (alpha > SUPPORT_THRESHOLD) & (alpha < C - SUPPORT_THRESHOLD)
    if np.any(free):
        bias = float(np.mean(F[free]))
    else:
        up, low = masks()
        bounds = []
        if np.any(up):
            bounds.append(float(np.max(F[up])))
        if np.any(low):
            bounds.append(float(np.min(F[low])))
        bias = float(np.mean(bounds)) if bounds else 0.0
    return alpha, bias, n_iter


def dual_objective(K, y, alpha) -> float:
    """Value of the soft-margin dual at ``alpha``."""
    coef = np.asarray(alpha, dtype=np.float64) * as_label_array(y)
    return float(np.sum(alpha) - 0.5 * coef @ as_square_matrix(K) @ coef)


class KernelSVC(BaseEstimator, ClassifierMixin):
    """Binary SVM over a precomputed kernel or an RBF kernel.

    Parameters
    ----------
    C : float
        Box constraint on the dual variables.
    kernel : "precomputed" or "rbf"
        With "precomputed", ``fit`` takes the training Gram matrix and
        ``predict`` takes kernel rows; with "rbf", both take feature rows.
    gamma : float or None
        RBF width. None means 1/(n_features * variance), computed at fit.
    tol : float
        KKT violation tolerance for SMO convergence.
    max_iter : int
        Hard cap on SMO pair updates.

    After ``fit``: ``support_`` (training indices with alpha > 1e-9),
    ``dual_coef_`` (alpha_i * y_i over support vectors), ``intercept_``,
    ``alpha_`` (full vector), ``n_iter_``, and ``gamma_`` for RBF.
    """

    def __init__(self, C=1.0, kernel="precomputed", gamma=None, tol=1e-3,
                 max_iter=10_000):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def _validate_kernel_choice(self):
        if self.kernel not in ("precomputed", "rbf"):
            raise ValueError(
                f'kernel must be "precomputed" or "rbf", got {self.kernel!r}'
            )

    def fit(self, X, y):
        """Fit on a Gram matrix (precomputed) or feature rows (rbf)."""
        self._validate_kernel_choice()
        y = as_label_array(y)
        if self.kernel == "precomputed":
            K = as_square_matrix(X)
            if not np.allclose(K, K.T, rtol=0.0, atol=1e-10):
                raise ValueError("precomputed kernel matrix must be symmetric")
            self.gamma_ = None
        else:
            X = as_feature_array(X)
            self.gamma_ = self.gamma if self.gamma is not None else rbf_default_gamma(X)
            self.X_fit_ = X
            K = rbf_gram(X, self.gamma_)

        alpha, bias, n_iter = smo_solve(
            K, y, C=self.C, tol=self.tol, max_iter=self.max_iter
        )
        self.alpha_ = alpha
        self.n_fit_ = K.shape[0]
        self.n_iter_ = n_iter
        self.support_ = np.flatnonzero(alpha > SUPPORT_THRESHOLD)
        self.dual_coef_ = alpha[self.support_] * y[self.support_]
        self.intercept_ = bias
        self.classes_ = np.array([-1, 1])
        return self

    def _support_rows(self, X):
        """Kernel rows test x support, from whichever input form applies.

        RBF models fitted in-process keep their training rows and accept
        feature rows here; reloaded models only carry coefficients and
        take precomputed kernel rows like the precomputed case.
        """
        if self.kernel == "rbf" and hasattr(self, "X_fit_"):
            X = as_feature_array(X, n_features=self.X_fit_.shape[1])
            return rbf_cross(X, self.X_fit_[self.support_], self.gamma_)
        rows = np.asarray(X, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError(f"kernel rows must be 2-D, got shape {rows.shape}")
        if rows.shape[1] == self.n_fit_:
            return rows[:, self.support_]
        if rows.shape[1] == self.support_.shape[0]:
            return rows
        raise ValueError(
            f"kernel rows have {rows.shape[1]} columns; expected "
            f"{self.n_fit_} (training set) or {self.support_.shape[0]} "
            "(support vectors)"
        )

    def decision_function(self, X) -> np.ndarray:
        return self._support_rows(X) @ self.dual_coef_ + self.intercept_

    def predict(self, X) -> np.ndarray:
        """Signs of the decision function; exact zeros resolve to +1."""
        scores = self.decision_function(X)
        return np.where(scores >= 0.0, 1, -1).astype(np.int64)

    def to_text(self) -> str:
        """Plain-text model record (12 significant digits)."""
        lines = [f"C {self.C:.12g}", f"kernel {self.kernel}"]
        if self.kernel == "rbf":
            lines.append(f"gamma {self.gamma_:.12g}")
        lines.append(f"bias {self.intercept_:.12g}")
        lines.append("support " + " ".join(str(int(i)) for i in self.support_))
        lines.append("dual_coefs " + " ".join(f"{v:.12g}" for v in self.dual_coef_))
        lines.append(f"n_train {self.n_fit_}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "KernelSVC":
        fields = {}
        for line in text.strip().splitlines():
            key, _, rest = line.partition(" ")
            fields[key] = rest
        model = cls(C=float(fields["C"]), kernel=fields["kernel"],
                    gamma=float(fields["gamma"]) if "gamma" in fields else None)
        model.gamma_ = model.gamma
        model.intercept_ = float(fields["bias"])
        model.support_ = np.array(
            [int(tok) for tok in fields["support"].split()], dtype=np.int64
        )
        model.dual_coef_ = np.array(
            [float(tok) for tok in fields["dual_coefs"].split()]
        )
        model.n_fit_ = int(fields["n_train"])
        model.classes_ = np.array([-1, 1])
        return model
