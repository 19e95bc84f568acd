"""Quantum kernel estimation: fidelity kernel entries and Gram matrices.

Entries are state fidelities between embedded points. Two evaluation modes:

* exact (``shots=None``): inner products of simulated statevectors, the
  reference mode;
* shot-sampled (``shots=N``): the compute-uncompute estimate, i.e. the
  all-zeros frequency after ansatz -> map(x_i) -> map(x_j)^dag ->
  ansatz^dag, which targets the same fidelity. Every entry draws from its
  own generator seeded by (seed, i, j), so results do not depend on
  evaluation order.

Exact-mode entries outside [0, 1] by more than 1e-9 indicate a simulator
defect and raise rather than being clamped.
"""

from __future__ import annotations

import numpy as np

from .featuremap import FeatureMapConfig, embed, embed_batch, embedding_circuit
from .statevector import apply_circuit, fidelity, sample_all_zeros, zero_state

_ENTRY_TOL = 1e-9


def _entry_seed(seed: int, i: int, j: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(i), int(j)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_entries(values: np.ndarray) -> None:
    hi = float(values.max(initial=0.0))
    lo = float(values.min(initial=0.0))
    if hi > 1.0 + _ENTRY_TOL or lo < -_ENTRY_TOL:
        raise RuntimeError(
            f"exact kernel entry outside [0, 1]: range [{lo}, {hi}]; "
            "this indicates a simulator inconsistency"
        )


def _overlap_state(x_i, x_j, params, config: FeatureMapConfig):
    """State whose all-zeros probability is the kernel entry (x_i, x_j)."""
    circuit = embedding_circuit(x_i, params, config)
    circuit.extend(embedding_circuit(x_j, params, config).inverse())
    return apply_circuit(zero_state(config.n_qubits), circuit)


def kernel_entry(
    x_i,
    x_j,
    params,
    config: FeatureMapConfig,
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """Single kernel value |<phi(x_i)|phi(x_j)>|^2."""
    if shots is None:
        value = fidelity(embed(x_i, params, config), embed(x_j, params, config))
        _check_entries(np.asarray([value]))
        return float(min(value, 1.0))
    state = _overlap_state(x_i, x_j, params, config)
    return sample_all_zeros(state, shots, seed)


def gram_matrix(
    X,
    params,
    config: FeatureMapConfig,
    shots: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Symmetric kernel matrix over ``X``.

    Only the upper triangle is computed and then mirrored; the diagonal is
    set to 1 without evaluation in both modes (identical circuits compose
    to the identity, so sampling it would only add noise).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError(f"expected a nonempty 2-D array, got shape {X.shape}")
    n = X.shape[0]
    if shots is None:
        states = embed_batch(X, params, config)
        raw = np.abs(states @ states.conj().T) ** 2
        upper = np.triu(raw, 1)
        _check_entries(upper)
        np.minimum(upper, 1.0, out=upper)
    else:
        upper = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                state = _overlap_state(X[i], X[j], params, config)
                upper[i, j] = sample_all_zeros(state, shots, _entry_seed(seed, i, j))
    K = upper + upper.T
    np.fill_diagonal(K, 1.0)
    return K


def cross_gram(
    X_test,
    X_train,
    params,
    config: FeatureMapConfig,
    shots: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Rectangular kernel block: entry (t, s) = kernel(X_test[t], X_train[s])."""
    X_test = np.asarray(X_test, dtype=np.float64)
    X_train = np.asarray(X_train, dtype=np.float64)
    for name, arr in (("X_test", X_test), ("X_train", X_train)):
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError(f"{name} must be a nonempty 2-D array, got {arr.shape}")
    if shots is None:
        test_states = embed_batch(X_test, params, config)
        train_states = embed_batch(X_train, params, config)
        K = np.abs(test_states @ train_states.conj().T) ** 2
        _check_entries(K)
        return np.minimum(K, 1.0)
    K = np.empty((X_test.shape[0], X_train.shape[0]))
    for t in range(X_test.shape[0]):
        for s in range(X_train.shape[0]):
            state = _overlap_state(X_test[t], X_train[s], params, config)
            K[t, s] = sample_all_zeros(state, shots, _entry_seed(seed, t, s))
    return K


def matrix_to_text(K) -> str:
    """Plain-text square matrix: header line ``N``, then N space-separated rows."""
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {K.shape}")
    lines = [str(K.shape[0])]
    for row in K:
        lines.append(" ".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    n = int(lines[0])
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows, found {len(lines) - 1}")
    rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    K = np.asarray(rows, dtype=np.float64)
    if K.shape != (n, n):
        raise ValueError(f"expected shape ({n}, {n}), got {K.shape}")
    return K
