"""Minimal dense statevector simulator.

Provides exactly the gate set the embedding circuits need (H, RY, RZ, RZZ,
CX) plus inner products and all-zeros measurement sampling. Qubit 0 is the
least-significant bit of the basis index, so ``|q1 q0> = |10>`` is index 2.
Amplitudes are double-precision complex throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 16

_SQRT1_2 = 1.0 / math.sqrt(2.0)

#: gate kind -> (number of targets, takes an angle)
GATE_ARITY = {
    "H": (1, False),
    "RY": (1, True),
    "RZ": (1, True),
    "RZZ": (2, True),
    "CX": (2, False),
}


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target qubit indices, optional rotation angle."""

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets, takes_angle = GATE_ARITY[self.kind]
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(targets) != n_targets:
            raise ValueError(
                f"{self.kind} takes {n_targets} target(s), got {len(targets)}"
            )
        if len(set(targets)) != len(targets):
            raise ValueError(f"{self.kind} targets must be distinct: {targets}")
        if any(t < 0 for t in targets):
            raise IndexError(f"negative qubit index in {targets}")
        if takes_angle:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} requires a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{self.kind} does not take an angle")

    def inverse(self) -> "Gate":
        """Adjoint gate: H and CX are self-inverse, rotations negate."""
        if self.angle is None:
            return self
        return Gate(self.kind, self.targets, -self.angle)


@dataclass
class Circuit:
    """Ordered gate list on ``n_qubits`` qubits; list order is application order."""

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}"
            )
        for gate in self.gates:
            self._check(gate)

    def _check(self, gate: Gate):
        if any(t >= self.n_qubits for t in gate.targets):
            raise IndexError(
                f"gate {gate.kind} targets {gate.targets} exceed "
                f"{self.n_qubits} qubits"
            )

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    # builder helpers
    def h(self, q) -> "Circuit":
        return self.append(Gate("H", (q,)))

    def ry(self, q, angle) -> "Circuit":
        return self.append(Gate("RY", (q,), angle))

    def rz(self, q, angle) -> "Circuit":
        return self.append(Gate("RZ", (q,), angle))

    def rzz(self, q0, q1, angle) -> "Circuit":
        return self.append(Gate("RZZ", (q0, q1), angle))

    def cx(self, control, target) -> "Circuit":
        return self.append(Gate("CX", (control, target)))

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError(
                f"cannot extend {self.n_qubits}-qubit circuit with "
                f"{other.n_qubits}-qubit circuit"
            )
        for gate in other.gates:
            self.append(gate)
        return self

    def inverse(self) -> "Circuit":
        """Adjoint circuit: reversed order, each gate inverted."""
        return Circuit(self.n_qubits, [g.inverse() for g in reversed(self.gates)])

    def __len__(self):
        return len(self.gates)

    def to_text(self) -> str:
        """One gate per line: ``KIND targets [angle]`` with 12-digit angles."""
        lines = []
        for g in self.gates:
            parts = [g.kind, *(str(t) for t in g.targets)]
            if g.angle is not None:
                parts.append(f"{g.angle:.12g}")
            lines.append(" ".join(parts))
        return "\n".join(lines)


@dataclass(frozen=True)
class StateVector:
    """Dense state of ``n_qubits`` qubits; treated as immutable once built."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}"
            )
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def zero_state(n_qubits: int) -> StateVector:
    """|0...0>: amplitude 1 at basis index 0."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _bit_signs(n_qubits: int, q: int) -> np.ndarray:
    """Vector of +-1 over basis indices: -1 where bit q is 0, +1 where set."""
    bits = (np.arange(2**n_qubits) >> q) & 1
    return 2.0 * bits - 1.0


def _apply_gate_inplace(amps: np.ndarray, gate: Gate, n_qubits: int) -> None:
    """Apply one gate to a flat amplitude buffer of length 2**n_qubits."""
    kind = gate.kind
    if kind == "H":
        (q,) = gate.targets
        view = amps.reshape(-1, 2, 2**q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = (a + b) * _SQRT1_2
        view[:, 1, :] = (a - b) * _SQRT1_2
    elif kind == "RY":
        (q,) = gate.targets
        c = math.cos(gate.angle / 2.0)
        s = math.sin(gate.angle / 2.0)
        view = amps.reshape(-1, 2, 2**q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = c * a - s * b
        view[:, 1, :] = s * a + c * b
    elif kind == "RZ":
        # diag(e^{-i a/2}, e^{+i a/2})
        (q,) = gate.targets
        amps *= np.exp(0.5j * gate.angle * _bit_signs(n_qubits, q))
    elif kind == "RZZ":
        # diag phase e^{-i a/2 * s}, s = +1 for equal bits, -1 otherwise
        qa, qb = gate.targets
        signs = _bit_signs(n_qubits, qa) * _bit_signs(n_qubits, qb)
        amps *= np.exp(-0.5j * gate.angle * signs)
    elif kind == "CX":
        control, target = gate.targets
        idx = np.arange(amps.shape[0])
        sel = (idx >> control) & 1 == 1
        flipped = idx[sel] ^ (1 << target)
        swapped = amps[flipped].copy()
        amps[sel] = swapped
    else:  # pragma: no cover - Gate.__post_init__ rejects unknown kinds
        raise ValueError(f"unknown gate kind {kind!r}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return the state transformed by one gate (input left untouched)."""
    if any(t >= state.n_qubits for t in gate.targets):
        raise IndexError(
            f"gate targets {gate.targets} exceed {state.n_qubits} qubits"
        )
    amps = state.amplitudes.copy()
    _apply_gate_inplace(amps, gate, state.n_qubits)
    return StateVector(state.n_qubits, amps)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply all gates in list order; returns a new state."""
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit acts on {circuit.n_qubits} qubits, state has "
            f"{state.n_qubits}"
        )
    amps = state.amplitudes.copy()
    for gate in circuit.gates:
        _apply_gate_inplace(amps, gate, state.n_qubits)
    return StateVector(state.n_qubits, amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2; symmetric, invariant under global phases."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}"
        )
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def all_zeros_probability(state: StateVector) -> float:
    """Probability of measuring 0 on every qubit: |amplitude[0]|^2."""
    return float(abs(state.amplitudes[0]) ** 2)


def sample_all_zeros(state: StateVector, shots: int, seed: int) -> float:
    """Shot estimate of :func:`all_zeros_probability`.

    Draws the all-zeros count from Binomial(shots, p) with a generator
    seeded by ``seed``, so results are reproducible bit for bit.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p = min(all_zeros_probability(state), 1.0)
    rng = np.random.default_rng(seed)
    return float(rng.binomial(shots, p)) / float(shots)
