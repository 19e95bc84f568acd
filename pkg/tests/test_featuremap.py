import math

import numpy as np
import pytest

from qksvm.featuremap import (
    FeatureMapConfig,
    ansatz_circuit,
    embed,
    embed_batch,
    embedding_circuit,
    entangler_pairs,
    pair_phase,
    single_phase,
    zz_feature_map_circuit,
)
from qksvm.statevector import apply_circuit, fidelity, zero_state

from oracles import circuit_unitary

# angles are pi/2, pi and 3*pi/4 for x = (0.25, 0.5)
GOLDEN_DUMP = "\n".join(
    [
        "H 0",
        "H 1",
        "RZ 0 1.57079632679",
        "RZ 1 3.14159265359",
        "RZZ 0 1 2.35619449019",
    ]
    * 2
)


class TestPhases:
    @pytest.mark.parametrize("x,expected", [(0.0, 0.0), (1.0, math.pi), (0.5, math.pi / 2)])
    def test_single_phase(self, x, expected):
        assert single_phase(x) == pytest.approx(expected, abs=0)

    @pytest.mark.parametrize("a,b,expected", [
        (0.0, 0.0, math.pi),
        (1.0, 0.3, 0.0),
        (0.5, 0.5, math.pi / 4),
    ])
    def test_pair_phase(self, a, b, expected):
        assert pair_phase(a, b) == pytest.approx(expected, abs=1e-15)

    def test_pair_phase_symmetric(self, rng):
        for _ in range(20):
            a, b = rng.uniform(0, 1, size=2)
            assert pair_phase(a, b) == pair_phase(b, a)


class TestFeatureMapCircuit:
    def test_single_repetition_layout(self):
        x = np.array([0.3, 0.7])
        circuit = zz_feature_map_circuit(x, FeatureMapConfig(2, depth=1))
        kinds = [(g.kind, g.targets) for g in circuit.gates]
        assert kinds == [
            ("H", (0,)), ("H", (1,)),
            ("RZ", (0,)), ("RZ", (1,)),
            ("RZZ", (0, 1)),
        ]
        assert circuit.gates[2].angle == pytest.approx(2 * math.pi * 0.3)
        assert circuit.gates[3].angle == pytest.approx(2 * math.pi * 0.7)
        assert circuit.gates[4].angle == pytest.approx(2 * math.pi * 0.7 * 0.3)

    def test_two_repetitions_double_the_list(self):
        x = np.array([0.3, 0.7])
        once = zz_feature_map_circuit(x, FeatureMapConfig(2, depth=1)).gates
        twice = zz_feature_map_circuit(x, FeatureMapConfig(2, depth=2)).gates
        assert len(twice) == 10
        assert twice == once + once

    def test_extreme_input_angles(self):
        circuit = zz_feature_map_circuit([1.0, 1.0], FeatureMapConfig(2, depth=1))
        assert circuit.gates[2].angle == pytest.approx(2 * math.pi)
        assert circuit.gates[4].angle == 0.0

    def test_embedding_of_corners_against_oracle(self):
        config = FeatureMapConfig(2, depth=1)
        theta = np.zeros(4)
        state_11 = embed([1.0, 1.0], theta, config)
        state_00 = embed([0.0, 0.0], theta, config)
        oracle = {
            tuple(x): circuit_unitary(embedding_circuit(x, theta, config))
            @ zero_state(2).amplitudes
            for x in ([1.0, 1.0], [0.0, 0.0])
        }
        np.testing.assert_allclose(
            state_11.amplitudes, oracle[(1.0, 1.0)], atol=1e-12
        )
        expected = abs(np.vdot(oracle[(1.0, 1.0)], oracle[(0.0, 0.0)])) ** 2
        assert fidelity(state_11, state_00) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n,d", [(1, 1), (2, 2), (3, 2), (4, 3)])
    def test_gate_count_law(self, n, d):
        x = np.full(n, 0.4)
        circuit = zz_feature_map_circuit(x, FeatureMapConfig(n, depth=d))
        assert len(circuit) == d * (n + n + n * (n - 1) // 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            zz_feature_map_circuit([0.1, 0.2, 0.3], FeatureMapConfig(2, 1))

    def test_rejects_out_of_range_features(self):
        with pytest.raises(ValueError):
            zz_feature_map_circuit([0.5, 1.2], FeatureMapConfig(2, 1))
        with pytest.raises(ValueError):
            embed([-0.1, 0.5], np.zeros(4), FeatureMapConfig(2, 1))

    def test_golden_dump(self):
        circuit = zz_feature_map_circuit([0.25, 0.5], FeatureMapConfig(2, 2))
        assert circuit.to_text() == GOLDEN_DUMP


class TestAnsatz:
    def test_identity_parameters_fix_zero_state(self):
        state = apply_circuit(zero_state(2), ansatz_circuit(np.zeros(4), 2))
        np.testing.assert_allclose(state.amplitudes, [1, 0, 0, 0], atol=1e-12)

    def test_pi_rotation_propagates_through_cx(self):
        # RY(pi) flips qubit 0, the CX then sets qubit 1 -> |11>
        state = apply_circuit(zero_state(2), ansatz_circuit([math.pi, 0, 0, 0], 2))
        expected = circuit_unitary(ansatz_circuit([math.pi, 0, 0, 0], 2))
        expected = expected @ zero_state(2).amplitudes
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)
        assert abs(state.amplitudes[3]) == pytest.approx(1.0, abs=1e-12)

    def test_single_qubit_ry(self):
        state = apply_circuit(zero_state(1), ansatz_circuit([math.pi / 2, 0.0], 1))
        np.testing.assert_allclose(
            state.amplitudes,
            [math.cos(math.pi / 4), math.sin(math.pi / 4)],
            atol=1e-12,
        )

    def test_entangler_topology(self):
        assert entangler_pairs(1) == []
        assert entangler_pairs(2) == [(0, 1)]
        assert entangler_pairs(3) == [(0, 1), (1, 2), (2, 0)]
        assert entangler_pairs(4) == [(0, 1), (1, 2), (2, 3), (3, 0)]

    def test_parameter_count_enforced(self):
        with pytest.raises(ValueError):
            ansatz_circuit(np.zeros(3), 2)
        with pytest.raises(ValueError):
            ansatz_circuit([np.nan, 0.0], 1)


class TestEmbed:
    def test_determinism(self, rng):
        config = FeatureMapConfig(2, 2)
        x = rng.uniform(0, 1, size=2)
        theta = rng.normal(size=4)
        a = embed(x, theta, config)
        b = embed(x, theta, config)
        assert fidelity(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_norm_one_over_random_inputs(self, rng):
        config = FeatureMapConfig(3, 2)
        for _ in range(100):
            x = rng.uniform(0, 1, size=3)
            theta = rng.normal(size=6)
            state = embed(x, theta, config)
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10

    def test_zero_ansatz_reduces_to_bare_map(self, rng):
        config = FeatureMapConfig(2, 2)
        x = rng.uniform(0, 1, size=2)
        with_ansatz = embed(x, np.zeros(4), config)
        bare = apply_circuit(zero_state(2), zz_feature_map_circuit(x, config))
        np.testing.assert_allclose(
            with_ansatz.amplitudes, bare.amplitudes, atol=1e-12
        )

    def test_matches_dense_oracle(self):
        config = FeatureMapConfig(2, 2)
        x = np.array([0.3, 0.7])
        theta = np.zeros(4)
        expected = circuit_unitary(embedding_circuit(x, theta, config))
        expected = expected @ zero_state(2).amplitudes
        np.testing.assert_allclose(
            embed(x, theta, config).amplitudes, expected, atol=1e-9
        )


class TestEmbedBatch:
    @pytest.mark.parametrize("n_features,depth", [(1, 1), (2, 2), (3, 2)])
    def test_matches_single_point_embedding(self, n_features, depth, rng):
        config = FeatureMapConfig(n_features, depth)
        X = rng.uniform(0, 1, size=(6, n_features))
        theta = rng.normal(size=2 * n_features)
        batch = embed_batch(X, theta, config)
        for i in range(X.shape[0]):
            np.testing.assert_allclose(
                batch[i], embed(X[i], theta, config).amplitudes, atol=1e-12
            )

    def test_shape_validation(self, rng):
        with pytest.raises(ValueError):
            embed_batch(rng.uniform(0, 1, size=(4, 3)), np.zeros(4), FeatureMapConfig(2, 1))
