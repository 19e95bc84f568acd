"""Input validation helpers used by the estimator-facing modules."""

import numpy as np


def as_feature_array(X, n_features=None, name="X"):
    """Coerce to a finite 2-D float64 array, optionally checking the width."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(
            f"{name} has {X.shape[1]} features, expected {n_features}"
        )
    return X


def as_label_array(y, name="y"):
    """Coerce to a 1-D array of -1/+1 integer labels."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {y.shape}")
    y = y.astype(np.int64, casting="unsafe")
    if not np.all(np.isin(y, (-1, 1))):
        bad = np.setdiff1d(np.unique(y), (-1, 1))
        raise ValueError(f"{name} must contain only -1/+1 labels, found {bad}")
    return y


def check_unit_interval(X, name="X"):
    """Reject feature values outside [0, 1]; the phase encoding requires them."""
    if X.size and (X.min() < 0.0 or X.max() > 1.0):
        raise ValueError(
            f"{name} must lie in [0, 1] (got range [{X.min()}, {X.max()}]); "
            "apply unit-interval scaling first"
        )


def as_square_matrix(K, name="K"):
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {K.shape}")
    return K
