import math

import numpy as np
import pytest

from phasemix.circuit import (
    Circuit,
    CircuitError,
    phase_aligned_overlap,
    serialize,
    two_qubit_count,
    unitary_of,
)
from phasemix.generators import DEFAULT_PROBS, GateProbabilities, cp_decompose, qft, random_circuit


class TestGateProbabilities:
    def test_defaults_match_benchmark_mix(self):
        assert (DEFAULT_PROBS.p_cnot, DEFAULT_PROBS.p_h, DEFAULT_PROBS.p_s, DEFAULT_PROBS.p_zphase) == (
            0.5,
            0.3,
            0.1,
            0.1,
        )

    def test_sum_must_be_one(self):
        with pytest.raises(ValueError):
            GateProbabilities(0.5, 0.5, 0.5, 0.5)

    def test_range_checked(self):
        with pytest.raises(ValueError):
            GateProbabilities(1.2, -0.2, 0.0, 0.0)


class TestRandomCircuit:
    def test_zero_depth(self):
        assert random_circuit(3, 0, seed=1).gates == ()

    def test_gate_count_equals_depth(self):
        assert len(random_circuit(8, 500, seed=4).gates) == 500

    def test_seed_determinism_byte_identical(self):
        a = serialize(random_circuit(6, 200, seed=123))
        b = serialize(random_circuit(6, 200, seed=123))
        assert a == b
        assert a != serialize(random_circuit(6, 200, seed=124))

    def test_needs_two_qubits_for_cnot(self):
        with pytest.raises(ValueError):
            random_circuit(1, 10)
        assert random_circuit(1, 10, probs=GateProbabilities(0, 0.5, 0.25, 0.25), seed=1)

    def test_angles_in_half_open_interval(self):
        c = random_circuit(4, 2000, probs=GateProbabilities(0, 0, 0, 1.0), seed=7)
        angles = [g.angle for g in c.gates]
        assert all(-math.pi / 4 < a <= math.pi / 4 for a in angles)

    def test_cnot_pairs_distinct_and_cover(self):
        c = random_circuit(4, 3000, probs=GateProbabilities(1.0, 0, 0, 0), seed=5)
        pairs = {g.qubits for g in c.gates}
        assert all(a != b for a, b in pairs)
        assert len(pairs) == 12  # all ordered pairs show up

    def test_kind_frequencies_chi_squared(self):
        from scipy.stats import chisquare

        n = 100_000
        c = random_circuit(8, n, seed=2024)
        counts = {"cnot": 0, "h": 0, "s": 0, "zphase": 0}
        for g in c.gates:
            counts[g.kind] += 1
        observed = [counts["cnot"], counts["h"], counts["s"], counts["zphase"]]
        expected = [0.5 * n, 0.3 * n, 0.1 * n, 0.1 * n]
        assert chisquare(observed, expected).pvalue > 0.001


class TestCpDecompose:
    def test_rejects_equal_qubits(self):
        with pytest.raises(CircuitError):
            cp_decompose(2, 2, 0.1)

    def test_exactly_five_gates_two_cnots(self):
        for alpha in (0.0, 0.3, math.pi / 2, -1.2):
            gates = cp_decompose(0, 1, alpha)
            assert len(gates) == 5
            assert sum(1 for g in gates if g.kind == "cnot") == 2

    def test_quarter_turn_unitary(self):
        u = unitary_of(Circuit(2, cp_decompose(1, 0, math.pi / 2)))
        assert np.allclose(u, np.diag([1, 1, 1, 1j]), atol=1e-12)

    def test_matches_controlled_phase_for_random_angles(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            alpha = rng.uniform(-math.pi / 2, math.pi / 2)
            u = unitary_of(Circuit(2, cp_decompose(1, 0, alpha)))
            assert np.max(np.abs(u - np.diag([1, 1, 1, np.exp(1j * alpha)]))) < 1e-12

    def test_zero_angle_simplifies_away(self):
        from phasemix.simplify import best_simplify

        c = Circuit(2, cp_decompose(0, 1, 0.0))
        assert best_simplify(c).gates == ()


class TestQft:
    def test_single_qubit_is_h(self):
        c = qft(1)
        assert [g.kind for g in c.gates] == ["h"]

    @pytest.mark.parametrize("n,cnots", [(2, 2), (8, 56), (24, 552)])
    def test_cnot_counts(self, n, cnots):
        assert two_qubit_count(qft(n)) == cnots

    def test_block_count(self):
        n = 6
        c = qft(n)
        assert two_qubit_count(c) == n * (n - 1)
        zcount = sum(1 for g in c.gates if g.kind == "zphase")
        assert zcount == 3 * n * (n - 1) // 2

    def test_three_qubit_dft_oracle(self):
        # Dense DFT oracle; output bits come out reversed (no swap network).
        n = 3
        dim = 2**n
        dft = np.array(
            [[np.exp(2j * np.pi * j * k / dim) for k in range(dim)] for j in range(dim)]
        ) / math.sqrt(dim)
        reversal = np.zeros((dim, dim))
        for i in range(dim):
            reversal[int(format(i, f"0{n}b")[::-1], 2), i] = 1.0
        u = unitary_of(qft(n))
        assert phase_aligned_overlap(u, reversal @ dft) > 1 - 1e-12
