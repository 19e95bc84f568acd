"""Data-embedding circuits: trainable input ansatz + repeated ZZ phase map.

The map encodes an m-dimensional point ``x`` in [0, 1]^m on m qubits. Each
repetition applies a Hadamard layer and then diagonal phases built from

    single_phase(x_i)     = pi * x_i
    pair_phase(x_i, x_j)  = pi * (1 - x_i) * (1 - x_j)

as RZ(2 * single_phase) on each qubit and RZZ(2 * pair_phase) on each pair
i < j (lexicographic; the phase terms commute, the order just keeps circuit
dumps deterministic). The rotation angles carry a factor 2 because RZ/RZZ
divide their argument by two; the encoding is then exp(i*phase*Z)-like up to
a global phase, which kernel fidelities cannot observe.

The ansatz that prepares the pre-embedding state is a hardware-efficient
two-layer form: an RY layer, a CX entangler, and a second RY layer, with
2 * n_qubits angles. The entangler is a chain CX(i, i+1) closed into a ring
for n >= 3 (a closing gate on two qubits would duplicate the chain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import Circuit, StateVector, apply_circuit, zero_state
from .validation import check_unit_interval


@dataclass(frozen=True)
class FeatureMapConfig:
    """Embedding geometry: feature count (= qubit count) and repetitions."""

    n_features: int
    depth: int = 2

    def __post_init__(self):
        if self.n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {self.n_features}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    @property
    def n_qubits(self) -> int:
        return self.n_features

    @property
    def n_ansatz_params(self) -> int:
        return 2 * self.n_features


def single_phase(x_i: float) -> float:
    """Phase for one feature: pi * x_i."""
    return math.pi * x_i


def pair_phase(x_i: float, x_j: float) -> float:
    """Phase for a feature pair: pi * (1 - x_i) * (1 - x_j). Symmetric.

    The grouping keeps the symmetry exact in floating point.
    """
    return math.pi * ((1.0 - x_i) * (1.0 - x_j))


def _as_point(x, config: FeatureMapConfig) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != config.n_features:
        raise ValueError(
            f"data point has {x.shape[0]} features, expected {config.n_features}"
        )
    check_unit_interval(x, name="data point")
    return x


def zz_feature_map_circuit(x, config: FeatureMapConfig) -> Circuit:
    """Phase-encoding circuit for one data point, ``config.depth`` repetitions.

    Each repetition is [H on every qubit; RZ(2*single_phase(x_i)) on each
    qubit; RZZ(2*pair_phase(x_i, x_j)) on each pair i < j].
    """
    x = _as_point(x, config)
    n = config.n_features
    circuit = Circuit(n)
    for _ in range(config.depth):
        for q in range(n):
            circuit.h(q)
        for q in range(n):
            circuit.rz(q, 2.0 * single_phase(x[q]))
        for i in range(n):
            for j in range(i + 1, n):
                circuit.rzz(i, j, 2.0 * pair_phase(x[i], x[j]))
    return circuit


def entangler_pairs(n_qubits: int) -> list[tuple[int, int]]:
    """CX (control, target) pairs of the ansatz entangler."""
    pairs = [(i, i + 1) for i in range(n_qubits - 1)]
    if n_qubits >= 3:
        pairs.append((n_qubits - 1, 0))
    return pairs


def ansatz_circuit(params, n_qubits: int) -> Circuit:
    """Trainable state-preparation circuit: RY layer, CX entangler, RY layer."""
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    if params.shape[0] != 2 * n_qubits:
        raise ValueError(
            f"ansatz takes {2 * n_qubits} angles for {n_qubits} qubits, "
            f"got {params.shape[0]}"
        )
    if not np.all(np.isfinite(params)):
        raise ValueError("ansatz angles must be finite")
    circuit = Circuit(n_qubits)
    for q in range(n_qubits):
        circuit.ry(q, params[q])
    for control, target in entangler_pairs(n_qubits):
        circuit.cx(control, target)
    for q in range(n_qubits):
        circuit.ry(q, params[n_qubits + q])
    return circuit


def embedding_circuit(x, params, config: FeatureMapConfig) -> Circuit:
    """Full embedding circuit: ansatz followed by the ZZ map for ``x``."""
    circuit = ansatz_circuit(params, config.n_qubits)
    circuit.extend(zz_feature_map_circuit(x, config))
    return circuit


def embed(x, params, config: FeatureMapConfig) -> StateVector:
    """Embedded state for one data point: map(x) applied to ansatz|0...0>."""
    return apply_circuit(zero_state(config.n_qubits), embedding_circuit(x, params, config))


def embed_batch(X, params, config: FeatureMapConfig) -> np.ndarray:
    """Embedded states for many points at once, one row per point.

    Vectorized over the batch: the ansatz state is computed once, the
    Hadamard layers act on the shared state axis and the RZ/RZZ layers
    reduce to per-point diagonal phases. Agrees with :func:`embed` row by
    row to machine precision.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != config.n_features:
        raise ValueError(
            f"expected shape (n_points, {config.n_features}), got {X.shape}"
        )
    check_unit_interval(X, name="data points")

    n = config.n_qubits
    dim = 2**n
    base = apply_circuit(zero_state(n), ansatz_circuit(params, n)).amplitudes
    states = np.tile(base, (X.shape[0], 1))

    # +-1 per basis index and qubit: -1 where the qubit's bit is 0
    bit_signs = np.empty((n, dim))
    for q in range(n):
        bit_signs[q] = 2.0 * ((np.arange(dim) >> q) & 1) - 1.0

    for _ in range(config.depth):
        for q in range(n):
            view = states.reshape(X.shape[0], -1, 2, 2**q)
            a = view[:, :, 0, :].copy()
            b = view[:, :, 1, :]
            view[:, :, 0, :] = (a + b) / math.sqrt(2.0)
            view[:, :, 1, :] = (a - b) / math.sqrt(2.0)
        for q in range(n):
            angles = 2.0 * math.pi * X[:, q]
            states *= np.exp(0.5j * np.outer(angles, bit_signs[q]))
        for i in range(n):
            for j in range(i + 1, n):
                angles = 2.0 * math.pi * (1.0 - X[:, i]) * (1.0 - X[:, j])
                signs = bit_signs[i] * bit_signs[j]
                states *= np.exp(-0.5j * np.outer(angles, signs))
    return states
