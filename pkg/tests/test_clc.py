import math

import numpy as np
import pytest

from gqtsp.circuit import Circuit, QubitLedger
from gqtsp.clc import ClcConfig, build_clc, build_cost_phase, build_qpe
from gqtsp.statevector import (
    apply_circuit,
    basis_probability,
    new_state,
    probability_of_pattern,
)
from gqtsp.tsp import (
    INF,
    TspGraph,
    build_adjacency_lists,
    brute_force_best,
    normalize_phases,
    random_integer_graph,
    value_to_word,
    word_to_value,
)
from gqtsp.verify import verify_clc
from oracles import random_state


def exact_auto_threshold_graph(seed=4):
    """Integer-cost N=4 instance with a unique optimum and distinct buckets."""
    for s in range(seed, seed + 50):
        g = random_integer_graph(4, seed=s)
        phases = normalize_phases(g, t=6)
        _, _, ranked = brute_force_best(g)
        buckets = [phases.quantize(r.word) for r in ranked]
        if buckets[0] == buckets[1] > buckets[2]:  # the two directed optima alone
            return g, phases, ranked
    raise RuntimeError("no suitable seed found")


class TestCostPhase:
    def test_zero_tables_identity(self):
        costs = np.full((4, 4), 3.0)
        np.fill_diagonal(costs, INF)
        g = TspGraph(costs)  # all edges maximal: every shifted cost is zero
        phases = normalize_phases(g, t=6)
        ledger = QubitLedger()
        cycle = ledger.new_register("C", 8)
        circ = build_cost_phase(ledger, phases, cycle)
        assert len(circ) == 0

    def test_tiny_instances_rejected(self):
        with pytest.raises(ValueError):
            TspGraph(np.array([[INF, 1.0], [1.0, INF]]))

    def test_basis_word_acquires_classical_phase_sum(self):
        g = random_integer_graph(4, seed=1)
        phases = normalize_phases(g, t=6)
        ledger = QubitLedger()
        cycle = ledger.new_register("C", 8)
        circ = build_cost_phase(ledger, phases, cycle)
        rng = np.random.default_rng(0)
        for _ in range(20):
            word = tuple(int(v) for v in rng.integers(0, 4, size=4))
            value = word_to_value(word, 2)
            state = new_state(8)
            state.amplitudes[:] = 0
            state.amplitudes[value] = 1.0
            apply_circuit(state, circ)
            expected = np.exp(1j * phases.word_phase(word))
            assert abs(state.amplitudes[value] - expected) < 1e-9

    def test_interference_against_plus_control(self):
        # controlled version of the same diagonal read out through |+>
        from gqtsp.synth import controlled_u

        g = random_integer_graph(4, seed=3)
        phases = normalize_phases(g, t=6)
        lists = build_adjacency_lists(g)
        word = brute_force_best(g)[0]
        value = word_to_value(word, 2)
        ledger = QubitLedger()
        cycle = ledger.new_register("C", 8)
        ctrl = ledger.new_register("ctrl", 1)[0]
        ledger.new_pool(1)
        circ = Circuit(ledger)
        circ.h(ctrl)
        from gqtsp.hcd import cycle_slices

        for j, table in enumerate(phases.tables):
            circ.extend(controlled_u(ledger, ctrl, cycle_slices(cycle, 4, 2)[j], table))
        circ.h(ctrl)
        state = new_state(10)
        state.amplitudes[:] = 0
        state.amplitudes[value] = 1.0
        apply_circuit(state, circ)
        phi = phases.word_phase(word)
        p_zero = probability_of_pattern(state, [ctrl], 0)
        assert abs(p_zero - (1 + math.cos(phi)) / 2) < 1e-9


class TestQpe:
    def _single_phase_setup(self, phi, t):
        """Synthetic one-city phase table so the QPE sees exactly phi."""
        from gqtsp.tsp import AdjacencyLists, NormalizedPhases

        lists = AdjacencyLists(((1, 2), (0, 2), (0, 1)))
        tables = (np.array([phi, 0.0]), np.zeros(2), np.zeros(2))
        phases = NormalizedPhases(tables, 0.0, 1.0, t, False, lists)
        ledger = QubitLedger()
        cycle = ledger.new_register("C", 3)
        t_reg = ledger.new_register("T", t)
        ledger.new_pool(1)
        circ = build_qpe(ledger, phases, cycle, t_reg)
        state = new_state(ledger.total_allocated)  # word (0,0,0) on the cycle
        apply_circuit(state, circ)
        return state, ledger

    def test_exact_fraction_reads_exactly(self):
        state, ledger = self._single_phase_setup(2 * math.pi * 5 / 16, t=4)
        assert basis_probability(state, ledger, "T", 5) == pytest.approx(1.0, abs=1e-12)

    def test_zero_phase_reads_zero(self):
        state, ledger = self._single_phase_setup(0.0, t=4)
        assert basis_probability(state, ledger, "T", 0) == pytest.approx(1.0, abs=1e-12)

    def test_inexact_phase_dominant_bucket(self):
        # phi = 2 pi 0.3: nearest 4-bit bucket is round(4.8) = 5
        t = 4
        state, ledger = self._single_phase_setup(2 * math.pi * 0.3, t=t)
        probs = [basis_probability(state, ledger, "T", b) for b in range(1 << t)]
        assert int(np.argmax(probs)) == 5
        assert probs[5] >= 4 / math.pi ** 2
        # closed-form Dirichlet-kernel weight for each bucket
        for b in range(1 << t):
            delta = 0.3 - b / (1 << t)
            num = math.sin(math.pi * (1 << t) * delta)
            den = (1 << t) * math.sin(math.pi * delta)
            expected = 1.0 if den == 0 else (num / den) ** 2
            assert abs(probs[b] - expected) < 1e-9

    def test_every_word_reads_its_bucket_exact_instance(self):
        report = verify_clc(random_integer_graph(4, seed=2), t=6)
        assert report.ok, report.counterexamples[:5]


class TestClc:
    def test_threshold_zero_greater_flags_positive_buckets(self):
        g = random_integer_graph(4, seed=5)
        phases = normalize_phases(g, t=6)
        config = ClcConfig(phases, 0, "greater")
        for value in range(0, 256, 7):
            word = value_to_word(value, 4, 2)
            assert config.marks(word) == (phases.quantize(word) > 0)

    def test_isolating_threshold_marks_two_directed_optima(self):
        g, phases, ranked = exact_auto_threshold_graph()
        threshold = phases.quantize(ranked[2].word)
        config = ClcConfig(phases, threshold, "greater")
        marked = [r.word for r in ranked if config.marks(r.word)]
        assert len(marked) == 2
        assert set(marked) == {ranked[0].word, ranked[1].word}
        report = verify_clc(g, t=6, threshold=threshold)
        assert report.ok, report.counterexamples[:5]

    def test_mirror_restores_t_register(self):
        g = random_integer_graph(4, seed=7)
        phases = normalize_phases(g, t=6)
        config = ClcConfig(phases, 10, "greater")
        ledger = QubitLedger()
        cycle = ledger.new_register("C", 8)
        t_reg = ledger.new_register("T", 6)
        r_clc = ledger.new_register("R_CLC", 1)[0]
        ledger.new_pool(1)
        circ = build_clc(ledger, config, cycle, t_reg, r_clc)
        state = new_state(ledger.total_allocated)
        prep = Circuit(ledger)
        for q in cycle:
            prep.h(q)
        apply_circuit(state, prep)
        apply_circuit(state, circ)
        t_zero = basis_probability(state, ledger, "T", 0)
        assert t_zero == pytest.approx(1.0, abs=1e-9)

    def test_clc_followed_by_inverse_is_identity(self):
        g = random_integer_graph(4, seed=8)
        phases = normalize_phases(g, t=6)
        config = ClcConfig(phases, 20, "greater")
        ledger = QubitLedger()
        cycle = ledger.new_register("C", 8)
        t_reg = ledger.new_register("T", 6)
        r_clc = ledger.new_register("R_CLC", 1)[0]
        ledger.new_pool(1)
        circ = build_clc(ledger, config, cycle, t_reg, r_clc)
        rng = np.random.default_rng(1)
        n_total = ledger.total_allocated
        start = random_state(n_total, rng)
        state = new_state(n_total)
        state.amplitudes[:] = start
        apply_circuit(state, circ)
        apply_circuit(state, circ.inverse())
        assert np.max(np.abs(state.amplitudes - start)) < 1e-9

    def test_threshold_out_of_range_rejected(self):
        g = random_integer_graph(4, seed=9)
        phases = normalize_phases(g, t=6)
        with pytest.raises(ValueError):
            ClcConfig(phases, 64, "greater")
        with pytest.raises(ValueError):
            ClcConfig(phases, 1, "above")
