"""Exhaustive verification sweeps shared by the test suite and the CLI.

Each sweep compares a circuit family against an independent classical
oracle and reports counterexamples instead of raising, so the CLI can
print them.  Permutation circuits are swept with the vectorized bit
tracer; phase behavior is checked on statevectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gqtsp.circuit import Circuit, QubitLedger
from gqtsp.hcd import AnchorPlan, ForwarderSpec, allocate_hcd, build_hcd
from gqtsp.statevector import apply_circuit, new_state
from gqtsp.synth import mcx_borrowed, mcx_one_zeroed, qaqr
from gqtsp.trace import trace_words
from gqtsp.tsp import (
    AdjacencyLists,
    TspGraph,
    build_adjacency_lists,
    is_hamiltonian_theorem1,
    value_to_word,
)


@dataclass
class SweepReport:
    name: str
    cases: int
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def line(self) -> str:
        verdict = "pass" if self.ok else f"FAIL ({len(self.counterexamples)} counterexamples)"
        return f"{self.name}: {self.cases} cases, {verdict}"


# ---------------------------------------------------------------------------
# HCD sweeps


def hcd_trace_flags(lists: AdjacencyLists, variant: str):
    """Boolean-propagate every basis word through an HCD variant.

    Returns (flags, clean): the oracle verdict per word and whether the
    word's trace left every non-result qubit exactly as it entered.
    """
    n_cities, m = lists.n_cities, lists.choice_bits
    spec = ForwarderSpec(lists)
    ledger = QubitLedger()
    cycle = ledger.new_register("C", m * n_cities)
    r_hcd = ledger.new_register("R_HCD", 1)[0]
    ledger.new_pool(64 - ledger.total_allocated)  # trace packs into uint64
    regs = allocate_hcd(ledger, spec, variant, cycle, r_hcd)
    circ = build_hcd(ledger, spec, variant, regs)
    words = np.arange(1 << (m * n_cities), dtype=np.uint64)
    out = trace_words(circ, words)
    flags = ((out >> np.uint64(r_hcd)) & np.uint64(1)).astype(bool)
    clean = (out ^ (flags.astype(np.uint64) << np.uint64(r_hcd))) == words
    return flags, clean


def verify_hcd(graph: TspGraph, variants=("naive", "improved", "anchored")) -> SweepReport:
    """All variants against the classical cycle-determination check."""
    lists = build_adjacency_lists(graph)
    n_cities, m = lists.n_cities, lists.choice_bits
    total = 1 << (m * n_cities)
    expected = np.array([
        is_hamiltonian_theorem1(lists, value_to_word(v, n_cities, m))
        for v in range(total)])
    report = SweepReport(f"hcd N={n_cities}", cases=total * len(variants))
    for variant in variants:
        flags, clean = hcd_trace_flags(lists, variant)
        for v in np.flatnonzero(flags != expected):
            report.counterexamples.append(
                (variant, value_to_word(int(v), n_cities, m), bool(flags[v]),
                 bool(expected[v])))
        for v in np.flatnonzero(~clean):
            report.counterexamples.append(
                (variant, value_to_word(int(v), n_cities, m), "dirty ancillas"))
    return report


def verify_hcd_kickback(graph: TspGraph, variant: str = "anchored",
                        tolerance: float = 1e-6) -> SweepReport:
    """Statevector check of the phase-flip form on the uniform superposition.

    With the result qubit prepared |->, one run on H^(x)|0> simultaneously
    verifies, for every basis word, the (-1)^flag kickback, ancilla
    restoration and cycle-register preservation: the final state must be
    exactly sum_w (-1)^flag(w) |w>|0...0>|-> within `tolerance`.
    """
    lists = build_adjacency_lists(graph)
    n_cities, m = lists.n_cities, lists.choice_bits
    spec = ForwarderSpec(lists)
    ledger = QubitLedger()
    cycle = ledger.new_register("C", m * n_cities)
    r_hcd = ledger.new_register("R_HCD", 1)[0]
    demand = {"naive": n_cities * spec.index_bits + (n_cities - 1),
              "improved": n_cities * spec.index_bits}
    plan = AnchorPlan.optimal(n_cities)
    if variant == "anchored":
        pool = plan.location_qubits(spec.index_bits)
    else:
        pool = demand[variant]
    pool += len([d for d in range(1, n_cities) if n_cities % d == 0]) + m
    ledger.new_pool(pool)
    regs = allocate_hcd(ledger, spec, variant, cycle, r_hcd)
    circ = build_hcd(ledger, spec, variant, regs)

    n_total = ledger.total_allocated
    state = new_state(n_total)
    prep = Circuit(ledger)
    for q in cycle:
        prep.h(q)
    prep.x(r_hcd)
    prep.h(r_hcd)
    apply_circuit(state, prep)
    apply_circuit(state, circ)
    # undo the |-> preparation so the expected state is classical-signed
    undo = Circuit(ledger)
    undo.h(r_hcd)
    undo.x(r_hcd)
    apply_circuit(state, undo)

    total = 1 << (m * n_cities)
    amp = 1.0 / math.sqrt(total)
    expected = np.zeros(1 << n_total, dtype=np.complex128)
    for v in range(total):
        word = value_to_word(v, n_cities, m)
        sign = -1.0 if is_hamiltonian_theorem1(lists, word) else 1.0
        expected[v] = sign * amp
    report = SweepReport(f"hcd kickback N={n_cities} {variant}", cases=total)
    err = np.abs(state.amplitudes - expected)
    for idx in np.flatnonzero(err > tolerance):
        report.counterexamples.append((int(idx), float(err[idx])))
    return report


# ---------------------------------------------------------------------------
# gate-synthesis sweeps


def verify_mcx(n_values=(3, 4, 5, 6)) -> SweepReport:
    """Borrowed and one-zeroed decompositions against the primitive truth table."""
    report = SweepReport(f"mcx n={list(n_values)}", cases=0)
    for n in n_values:
        total = 2 * n - 1
        ledger = QubitLedger()
        ledger.new_register("work", total)
        controls = list(range(n))
        target = n
        circ_b = mcx_borrowed(ledger, controls, target, list(range(n + 1, total)))
        words = np.arange(1 << total, dtype=np.uint64)
        out = trace_words(circ_b, words)
        fire = np.ones(len(words), dtype=bool)
        for c in controls:
            fire &= ((words >> np.uint64(c)) & np.uint64(1)).astype(bool)
        expected = words ^ (fire.astype(np.uint64) << np.uint64(target))
        report.cases += len(words)
        for v in np.flatnonzero(out != expected):
            report.counterexamples.append(("borrowed", n, int(v)))

        circ_z = mcx_one_zeroed(ledger, controls, target, n + 1)
        anc_zero = words[((words >> np.uint64(n + 1)) & np.uint64(1)) == 0]
        out = trace_words(circ_z, anc_zero)
        fire = np.ones(len(anc_zero), dtype=bool)
        for c in controls:
            fire &= ((anc_zero >> np.uint64(c)) & np.uint64(1)).astype(bool)
        expected = anc_zero ^ (fire.astype(np.uint64) << np.uint64(target))
        report.cases += len(anc_zero)
        for v in np.flatnonzero(out != expected):
            report.counterexamples.append(("one_zeroed", n, int(v)))
    return report


def verify_clc(graph: TspGraph, t: int, threshold: int | None = None,
               direction: str = "greater", tolerance: float = 1e-6) -> SweepReport:
    """CLC on a bucket-exact instance, every basis word at once.

    Runs the oracle on the uniform cycle superposition and checks the full
    final statevector against sum_w |w>|T=0>|flag(w)>: that simultaneously
    verifies the comparator bit, the T uncompute and leakage for all words.
    A second run stops after the forward estimation and checks T reads
    each word's classical bucket with probability 1.
    """
    from gqtsp.clc import ClcConfig, build_clc, build_qpe
    from gqtsp.tsp import normalize_phases

    lists = build_adjacency_lists(graph)
    n_cities, m = lists.n_cities, lists.choice_bits
    phases = normalize_phases(graph, t, lists)
    if not phases.exact:
        raise ValueError("verify_clc needs a bucket-exact instance")
    if threshold is None:
        buckets = sorted({phases.quantize(value_to_word(v, n_cities, m))
                          for v in range(1 << (m * n_cities))})
        threshold = buckets[len(buckets) // 2]
    config = ClcConfig(phases, threshold, direction)

    ledger = QubitLedger()
    cycle = ledger.new_register("C", m * n_cities)
    t_reg = ledger.new_register("T", t)
    r_clc = ledger.new_register("R_CLC", 1)[0]
    ledger.new_pool(1)  # controlled-U ancilla
    n_total = ledger.total_allocated

    total_words = 1 << (m * n_cities)
    amp = 1.0 / math.sqrt(total_words)
    report = SweepReport(f"clc N={n_cities} t={t} th={threshold}", cases=2 * total_words)

    # forward QPE only: T must hold each word's bucket exactly
    state = new_state(n_total)
    prep = Circuit(ledger)
    for q in cycle:
        prep.h(q)
    apply_circuit(state, prep)
    apply_circuit(state, build_qpe(ledger, phases, cycle, t_reg))
    expected = np.zeros(1 << n_total, dtype=np.complex128)
    for v in range(total_words):
        word = value_to_word(v, n_cities, m)
        expected[v | (phases.quantize(word) << (m * n_cities))] = amp
    err = np.abs(state.amplitudes - expected)
    for idx in np.flatnonzero(err > tolerance):
        report.counterexamples.append(("qpe", int(idx), float(err[idx])))

    # full oracle: T restored, flag equals the classical comparison
    state = new_state(n_total)
    apply_circuit(state, prep)
    apply_circuit(state, build_clc(ledger, config, cycle, t_reg, r_clc))
    expected = np.zeros(1 << n_total, dtype=np.complex128)
    for v in range(total_words):
        word = value_to_word(v, n_cities, m)
        expected[v | (int(config.marks(word)) << (m * n_cities + t))] = amp
    err = np.abs(state.amplitudes - expected)
    for idx in np.flatnonzero(err > tolerance):
        report.counterexamples.append(("clc", int(idx), float(err[idx])))
    return report


def verify_qaqr(address_bits: int = 3, width: int = 2, trials: int = 20,
                seed: int = 0) -> SweepReport:
    """Multiplexer against classical indexing over random stored data."""
    rng = np.random.default_rng(seed)
    slots = 1 << address_bits
    total = address_bits + slots * width + width
    ledger = QubitLedger()
    ledger.new_register("work", total)
    address = list(range(address_bits))
    regs = [[address_bits + width * i + b for b in range(width)] for i in range(slots)]
    output = list(range(total - width, total))
    circ = qaqr(ledger, address, regs, output)
    report = SweepReport(f"qaqr a={address_bits} L={width}", cases=0)
    for _ in range(trials):
        data = [int(rng.integers(0, 1 << width)) for _ in range(slots)]
        for addr in range(slots):
            word = addr
            for i, v in enumerate(data):
                word |= v << (address_bits + width * i)
            out = trace_words(circ, np.array([word], dtype=np.uint64))[0]
            report.cases += 1
            if out != word | (data[addr] << (total - width)):
                report.counterexamples.append((data, addr, int(out)))
    return report
