import math

import numpy as np
import pytest

import gqtsp.circuit as cz
from gqtsp.backends import HAVE_COMPILED, get_backend
from gqtsp.circuit import Circuit, Gate, QubitLedger
from gqtsp.errors import PoolExhaustedError, ResourceLimitError
from gqtsp.statevector import (
    apply_circuit,
    apply_gate,
    basis_probability,
    new_state,
    sample,
)
from oracles import circuit_matrix, gate_matrix, random_state

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def random_circuit(ledger, n, n_gates, rng):
    circ = Circuit(ledger)
    for _ in range(n_gates):
        kind = rng.integers(0, 7)
        qs = rng.permutation(n)
        if kind == 0:
            circ.x(qs[0])
        elif kind == 1:
            circ.h(qs[0])
        elif kind == 2:
            circ.phase(qs[0], rng.uniform(0, 2 * math.pi))
        elif kind == 3:
            circ.cphase(qs[0], qs[1], rng.uniform(0, 2 * math.pi))
        elif kind == 4:
            circ.toffoli(qs[0], qs[1], qs[2])
        elif kind == 5:
            k = rng.integers(1, n)
            circ.mcx(qs[:k], qs[k])
        else:
            r = rng.integers(1, min(n, 4) + 1)
            circ.diag(qs[:r], rng.uniform(0, 2 * math.pi, size=1 << r))
    return circ


class TestNewState:
    def test_single_qubit(self):
        s = new_state(1)
        assert np.allclose(s.amplitudes, [1, 0])

    def test_three_qubits(self):
        s = new_state(3)
        assert s.amplitudes[0] == 1.0
        assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12

    def test_large_allocation(self):
        # matches the N=4 full-run footprint from the qubit budget table
        s = new_state(23)
        assert s.amplitudes.size == 1 << 23
        assert s.norm_error() < 1e-12

    def test_memory_bound(self):
        with pytest.raises(ResourceLimitError):
            new_state(30, max_qubits=26)
        with pytest.raises(ValueError):
            new_state(0)

    def test_qubit_count_immutable(self):
        s = new_state(2)
        with pytest.raises(AttributeError):
            s.qubit_count = 5


class TestApplyGate:
    def test_hadamard_on_zero(self):
        s = apply_gate(new_state(1), Gate(cz.HADAMARD, (0,)))
        assert np.allclose(s.amplitudes, [INV_SQRT2, INV_SQRT2])

    def test_x_qubit0_least_significant(self):
        s = apply_gate(new_state(2), Gate(cz.PAULI_X, (0,)))
        assert np.allclose(s.amplitudes, [0, 1, 0, 0])

    def test_cphase_pi_on_11(self):
        s = new_state(2)
        apply_gate(s, Gate(cz.PAULI_X, (0,)))
        apply_gate(s, Gate(cz.PAULI_X, (1,)))
        apply_gate(s, Gate(cz.CONTROLLED_PHASE, (0, 1), angle=math.pi))
        assert np.allclose(s.amplitudes, [0, 0, 0, -1])

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            apply_gate(new_state(2), Gate(cz.PAULI_X, (5,)))

    @pytest.mark.parametrize("backend", ["python", "compiled"])
    def test_every_kind_against_matrix_oracle(self, backend):
        if backend == "compiled" and not HAVE_COMPILED:
            pytest.skip("extension not built")
        rng = np.random.default_rng(7)
        n = 4
        gates = [
            Gate(cz.PAULI_X, (2,)),
            Gate(cz.HADAMARD, (1,)),
            Gate(cz.PHASE, (3,), angle=0.7),
            Gate(cz.CONTROLLED_PHASE, (0, 3), angle=2.1),
            Gate(cz.TOFFOLI, (0, 2, 3)),
            Gate(cz.MULTI_CONTROLLED_X, (0, 1, 3, 2)),
            Gate(cz.DIAGONAL_PHASE, (2, 0, 3), table=rng.uniform(0, 6.2, size=8)),
        ]
        for gate in gates:
            start = random_state(n, rng)
            s = new_state(n, backend=backend)
            s.amplitudes[:] = start
            apply_gate(s, gate)
            expected = gate_matrix(gate, n) @ start
            assert np.allclose(s.amplitudes, expected, atol=1e-12), gate

    def test_gate_inverses_identity(self):
        rng = np.random.default_rng(3)
        n = 4
        gates = [
            Gate(cz.PAULI_X, (1,)),
            Gate(cz.HADAMARD, (0,)),
            Gate(cz.PHASE, (2,), angle=1.3),
            Gate(cz.CONTROLLED_PHASE, (1, 2), angle=4.0),
            Gate(cz.TOFFOLI, (3, 1, 0)),
            Gate(cz.MULTI_CONTROLLED_X, (3, 2, 1, 0)),
            Gate(cz.DIAGONAL_PHASE, (0, 1), table=rng.uniform(0, 6.2, size=4)),
        ]
        for gate in gates:
            start = random_state(n, rng)
            s = new_state(n)
            s.amplitudes[:] = start
            apply_gate(s, gate)
            apply_gate(s, gate.inverse())
            assert np.allclose(s.amplitudes, start, atol=1e-9), gate


class TestApplyCircuit:
    def test_empty_circuit(self):
        ledger = QubitLedger()
        ledger.new_register("r", 3)
        s = new_state(3)
        before = s.amplitudes.copy()
        apply_circuit(s, Circuit(ledger))
        assert np.array_equal(s.amplitudes, before)

    def test_circuit_then_mirror_is_identity(self):
        rng = np.random.default_rng(11)
        ledger = QubitLedger()
        ledger.new_register("r", 5)
        circ = random_circuit(ledger, 5, 60, rng)
        start = random_state(5, rng)
        s = new_state(5)
        s.amplitudes[:] = start
        apply_circuit(s, circ)
        apply_circuit(s, circ.inverse())
        assert np.max(np.abs(s.amplitudes - start)) < 1e-9

    def test_norm_preserved_over_long_random_sequence(self):
        rng = np.random.default_rng(13)
        ledger = QubitLedger()
        ledger.new_register("r", 6)
        s = new_state(6)
        s.amplitudes[:] = random_state(6, rng)
        apply_circuit(s, random_circuit(ledger, 6, 400, rng))
        assert s.norm_error() < 1e-9

    def test_matches_matrix_oracle(self):
        rng = np.random.default_rng(17)
        ledger = QubitLedger()
        ledger.new_register("r", 4)
        circ = random_circuit(ledger, 4, 30, rng)
        start = random_state(4, rng)
        s = new_state(4)
        s.amplitudes[:] = start
        apply_circuit(s, circ)
        assert np.allclose(s.amplitudes, circuit_matrix(circ, 4) @ start, atol=1e-10)

    def test_ledger_larger_than_state_rejected(self):
        ledger = QubitLedger()
        ledger.new_register("r", 5)
        with pytest.raises(ValueError):
            apply_circuit(new_state(3), Circuit(ledger))

    @pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
    def test_backend_parity(self):
        rng = np.random.default_rng(23)
        ledger = QubitLedger()
        ledger.new_register("r", 6)
        circ = random_circuit(ledger, 6, 120, rng)
        start = random_state(6, rng)
        sp = new_state(6, backend="python")
        sc = new_state(6, backend="compiled")
        sp.amplitudes[:] = start
        sc.amplitudes[:] = start
        apply_circuit(sp, circ)
        apply_circuit(sc, circ)
        assert np.max(np.abs(sp.amplitudes - sc.amplitudes)) < 1e-12


class TestSample:
    def test_deterministic_zero_state(self):
        s = new_state(1)
        assert sample(s, 100, [0], seed=1) == {"0": 100}

    def test_plus_state_within_5_sigma(self):
        s = apply_gate(new_state(1), Gate(cz.HADAMARD, (0,)))
        counts = sample(s, 10_000, [0], seed=42)
        sigma = math.sqrt(10_000 * 0.25)
        assert abs(counts["0"] - 5000) < 5 * sigma
        assert counts["0"] + counts["1"] == 10_000

    def test_same_seed_identical(self):
        s = apply_gate(new_state(3), Gate(cz.HADAMARD, (1,)))
        apply_gate(s, Gate(cz.HADAMARD, (2,)))
        assert sample(s, 500, [0, 1, 2], seed=9) == sample(s, 500, [0, 1, 2], seed=9)

    def test_chi_square_against_exact_probabilities(self):
        from scipy import stats

        rng = np.random.default_rng(29)
        ledger = QubitLedger()
        ledger.new_register("r", 4)
        s = new_state(4)
        s.amplitudes[:] = random_state(4, rng)
        circ = Circuit(ledger)
        for q in range(4):
            circ.h(q)
        apply_circuit(s, circ)
        counts = sample(s, 10_000, [0, 1, 2, 3], seed=31)
        expected = np.array([
            basis_probability(s, ledger, "r", v) for v in range(16)
        ]) * 10_000
        observed = np.zeros(16)
        for bits, c in counts.items():
            observed[int(bits, 2)] = c
        keep = expected > 1e-9
        _, p = stats.chisquare(observed[keep], expected[keep])
        assert p > 0.001

    def test_empty_qubit_list(self):
        with pytest.raises(ValueError):
            sample(new_state(2), 10, [], seed=0)


class TestBasisProbability:
    def test_zero_state(self):
        ledger = QubitLedger()
        ledger.new_register("a", 2)
        ledger.new_register("b", 3)
        s = new_state(5)
        assert basis_probability(s, ledger, "a", 0) == pytest.approx(1.0)
        assert basis_probability(s, ledger, "b", 0) == pytest.approx(1.0)
        assert basis_probability(s, ledger, "b", 5) == pytest.approx(0.0)

    def test_uniform_eight_qubits(self):
        ledger = QubitLedger()
        ledger.new_register("C", 8)
        s = new_state(8)
        circ = Circuit(ledger)
        for q in range(8):
            circ.h(q)
        apply_circuit(s, circ)
        assert basis_probability(s, ledger, "C", 77) == pytest.approx(1 / 256)

    def test_completeness(self):
        rng = np.random.default_rng(37)
        ledger = QubitLedger()
        ledger.new_register("r", 3)
        ledger.new_pool(2)
        s = new_state(5)
        s.amplitudes[:] = random_state(5, rng)
        total = sum(basis_probability(s, ledger, "r", v) for v in range(8))
        assert abs(total - 1.0) < 1e-9

    def test_unknown_register(self):
        ledger = QubitLedger()
        ledger.new_register("r", 2)
        with pytest.raises(KeyError):
            basis_probability(new_state(2), ledger, "nope", 0)


class TestQubitLedger:
    def test_no_double_membership(self):
        ledger = QubitLedger()
        a = ledger.new_register("a", 3)
        b = ledger.new_register("b", 2)
        pool = ledger.new_pool(4)
        assert len(set(a) | set(b) | set(pool)) == 9
        assert ledger.total_allocated == 9

    def test_total_matches_live_plus_pool(self):
        ledger = QubitLedger()
        ledger.new_register("a", 3)
        ledger.new_pool(5)
        live = sum(len(ix) for ix in ledger.registers.values())
        assert ledger.total_allocated == live + ledger.pool_size

    def test_pool_borrow_and_return(self):
        ledger = QubitLedger()
        ledger.new_pool(3)
        got = ledger.borrow_zeroed(2)
        assert len(ledger.pool_free) == 1
        ledger.return_zeroed(got)
        assert len(ledger.pool_free) == 3
        with pytest.raises(PoolExhaustedError):
            ledger.borrow_zeroed(4)

    def test_pool_register_lifecycle(self):
        ledger = QubitLedger()
        ledger.new_pool(6)
        t = ledger.pool_register("T", 4)
        assert ledger.register("T") == t
        assert len(ledger.pool_free) == 2
        ledger.free_register("T")
        assert len(ledger.pool_free) == 6
        with pytest.raises(ValueError):
            ledger.new_register("x", 1) and ledger.new_register("x", 1)

    def test_duplicate_name_rejected(self):
        ledger = QubitLedger()
        ledger.new_register("a", 1)
        with pytest.raises(ValueError):
            ledger.new_register("a", 2)


class TestCircuitMetadata:
    def test_counts_and_depth(self):
        ledger = QubitLedger()
        ledger.new_register("r", 3)
        circ = Circuit(ledger)
        circ.h(0)
        circ.h(1)
        circ.toffoli(0, 1, 2)
        circ.x(2)
        assert circ.gate_counts == {"Hadamard": 2, "Toffoli": 1, "PauliX": 1}
        assert circ.depth == 3  # the two H's share a layer
        assert circ.toffoli_count == 1

    def test_append_validates_ledger(self):
        ledger = QubitLedger()
        ledger.new_register("r", 2)
        circ = Circuit(ledger)
        with pytest.raises(ValueError):
            circ.x(5)

    def test_angles_stored_mod_2pi(self):
        g = Gate(cz.PHASE, (0,), angle=5 * math.pi)
        assert abs(g.angle - math.pi) < 1e-12
        g2 = Gate(cz.PHASE, (0,), angle=-math.pi / 2)
        assert abs(g2.angle - 3 * math.pi / 2) < 1e-12

    def test_repeated_qubits_rejected(self):
        with pytest.raises(ValueError):
            Gate(cz.TOFFOLI, (1, 1, 2))

    def test_export_text_stable(self):
        ledger = QubitLedger()
        ledger.new_register("r", 2)
        circ = Circuit(ledger)
        circ.h(0)
        circ.cphase(0, 1, math.pi / 4)
        text = circ.export_text()
        lines = text.strip().split("\n")
        assert lines[0] == "Hadamard 0"
        assert lines[1].startswith("ControlledPhase 0 1 ")
