"""Grover-adaptive-search driver: initialization, oracle-marked Grover
iterations, measurement, and the adaptive threshold loop.

One Grover step follows the published loop body exactly: length oracle
into its flag, cycle-detection oracle into its flag, a Toffoli onto a
|-> kickback qubit (borrowed from the ancilla pool, which is empty at
that moment), both oracles uncomputed, then diffusion over the cycle
register.  On bucket-exact instances every ancilla is restored exactly,
so the marked-subspace probability follows the two-dimensional rotation
law sin^2((2k+1) theta / 2) with theta = 2 arcsin sqrt(M / 2^(mN)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gqtsp.budget import QubitBudget
from gqtsp.circuit import Circuit, QubitLedger
from gqtsp.clc import ClcConfig, build_clc
from gqtsp.errors import NoHamiltonianCycleError
from gqtsp.hcd import AnchorPlan, ForwarderSpec, allocate_hcd, build_hcd, release_hcd
from gqtsp.statevector import (
    StateVector,
    apply_circuit,
    basis_probability,
    new_state,
    sample,
)
from gqtsp.tsp import (
    NormalizedPhases,
    TspGraph,
    brute_force_best,
    build_adjacency_lists,
    cost as word_cost,
    is_hamiltonian_theorem1,
    normalize_phases,
    ranked_undirected,
    sample_valid_cycles,
    value_to_word,
    word_to_tour,
)


def estimate_iterations(search_qubits: int, marked: int) -> int:
    """Closest integer to pi/(2 theta) - 1/2, theta = 2 arcsin sqrt(M/2^mN)."""
    space = 1 << search_qubits
    if not 1 <= marked < space:
        raise ValueError(f"need 1 <= marked < {space}, got {marked}")
    theta = 2.0 * math.asin(math.sqrt(marked / space))
    x = math.pi / (2.0 * theta) - 0.5
    return int(math.floor(x + 0.5))


def rotation_probability(search_qubits: int, marked: int, iterations: int) -> float:
    """Marked-subspace probability after k exact Grover steps."""
    theta = 2.0 * math.asin(math.sqrt(marked / (1 << search_qubits)))
    return math.sin((2 * iterations + 1) * theta / 2.0) ** 2


def fixed_iteration_count(search_qubits: int) -> int:
    """The fixed per-round schedule ceil(pi sqrt(2^mN) / 4) (ignores M)."""
    return math.ceil(math.pi * math.sqrt(1 << search_qubits) / 4.0)


# ---------------------------------------------------------------------------
# layout


@dataclass
class GqtspLayout:
    """Register map for one full solver instance.

    Total qubits = mN + pool + 2, the pool sized by the qubit budget;
    the readout register T and the cycle-detection ancillas time-share
    the pool, and the kickback qubit borrows pool slot 0 transiently.
    """

    graph: TspGraph
    t: int
    variant: str = "anchored"

    def __post_init__(self):
        self.lists = build_adjacency_lists(self.graph)
        self.spec = ForwarderSpec(self.lists)
        self.phases = normalize_phases(self.graph, self.t, self.lists)
        self.n_cities = self.lists.n_cities
        self.m = self.lists.choice_bits
        self.search_qubits = self.m * self.n_cities
        budget = QubitBudget(self.n_cities, self.graph.degree, self.t)
        self.budget = budget
        self.ledger = QubitLedger()
        self.cycle = self.ledger.new_register("C", self.search_qubits)
        pool = self.ledger.new_pool(budget.pool)
        self.r_clc = self.ledger.new_register("R_CLC", 1)[0]
        self.r_hcd = self.ledger.new_register("R_HCD", 1)[0]
        self.t_qubits = pool[:self.t]
        self.kick_qubit = pool[0]
        self.total_qubits = self.ledger.total_allocated

    def new_zero_state(self) -> StateVector:
        return new_state(self.total_qubits)

    def uniform_prep(self) -> Circuit:
        circ = Circuit(self.ledger, name="prep")
        for q in self.cycle:
            circ.h(q)
        return circ

    def build_clc_circuit(self, threshold: int, direction: str = "greater") -> Circuit:
        config = ClcConfig(self.phases, threshold, direction)
        t_reg = self.ledger.borrow_zeroed(self.t)
        try:
            assert tuple(t_reg) == tuple(self.t_qubits)
            return build_clc(self.ledger, config, self.cycle, t_reg, self.r_clc)
        finally:
            self.ledger.return_zeroed(t_reg)

    def build_hcd_circuit(self) -> Circuit:
        regs = allocate_hcd(self.ledger, self.spec, self.variant, self.cycle,
                            self.r_hcd, AnchorPlan.optimal(self.n_cities))
        try:
            return build_hcd(self.ledger, self.spec, self.variant, regs)
        finally:
            release_hcd(self.ledger, regs)

    def kickback(self) -> Circuit:
        """(-1)^(R_CLC and R_HCD) via a transient |-> qubit and a Toffoli."""
        circ = Circuit(self.ledger, name="kick")
        q = self.kick_qubit
        circ.x(q)
        circ.h(q)
        circ.toffoli(self.r_clc, self.r_hcd, q)
        circ.h(q)
        circ.x(q)
        return circ


def build_grover_step(layout: GqtspLayout, clc: Circuit, hcd: Circuit) -> Circuit:
    """One full oracle-and-diffusion iteration as a reusable circuit."""
    from gqtsp.synth import diffusion

    step = Circuit(layout.ledger, name="grover_step")
    step.extend(clc)
    step.extend(hcd)
    step.extend(layout.kickback())
    step.extend(hcd.inverse())
    step.extend(clc.inverse())
    step.extend(diffusion(layout.ledger, layout.cycle))
    return step


def grover_step(state: StateVector, clc: Circuit, hcd: Circuit,
                layout: GqtspLayout) -> StateVector:
    """Apply one Grover iteration (assembles the step circuit on the fly)."""
    return apply_circuit(state, build_grover_step(layout, clc, hcd))


# ---------------------------------------------------------------------------
# results


@dataclass
class ExperimentResult:
    best_word: tuple[int, ...] | None
    best_tour: tuple[int, ...] | None
    best_cost: float | None
    threshold_history: list[int] = field(default_factory=list)
    incumbent_history: list[float] = field(default_factory=list)
    rounds_run: int = 0
    iterations_per_round: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    curve: list[tuple[float, float, float]] | None = None
    i_opt_empirical: int | None = None
    i_opt_estimate: int | None = None
    marked_count: int | None = None
    qubit_total: int = 0
    step_gate_counts: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class GasConfig:
    graph: TspGraph
    t: int = 6
    shots: int = 1024
    seed: int = 0
    rounds: int = 5
    iterations: int | None = None     # None: fixed schedule from mN
    initial_samples: int = 8
    variant: str = "anchored"
    objective: str = "min"
    record_curve: bool = False
    stall_rounds: int = 2             # stop after this many non-improving rounds

    def __post_init__(self):
        if self.shots < 1 or self.t < 1:
            raise ValueError("shots and t must be positive")
        if self.objective not in ("min", "max"):
            raise ValueError("objective must be 'min' or 'max'")


def _top3_undirected(graph: TspGraph):
    _, _, ranked = brute_force_best(graph)
    return ranked_undirected(ranked)[:3]


def _curve_point(state, layout, groups):
    point = []
    for _, words in groups:
        point.append(sum(
            basis_probability(state, layout.ledger, "C",
                              sum(c << (layout.m * i) for i, c in enumerate(w)))
            for w in words))
    while len(point) < 3:
        point.append(0.0)
    return tuple(point[:3])


def threshold_update(samples, phases: NormalizedPhases, lists, graph,
                     incumbent_cost: float | None, objective: str = "min"):
    """GAS threshold rule: move to the best valid sample seen so far.

    `samples` are decoded cycle words; returns (new_threshold_bucket,
    incumbent_cost, incumbent_word, improved) where the threshold is the
    quantized cost of the incumbent.  With no valid sample and no
    incumbent the threshold is left to the caller (None, warning case).
    """
    better = (lambda a, b: a < b) if objective == "min" else (lambda a, b: a > b)
    best_word = None
    best_cost = incumbent_cost
    for word in samples:
        if not is_hamiltonian_theorem1(lists, word):
            continue
        c = word_cost(graph, lists, word)
        if best_cost is None or better(c, best_cost):
            best_cost = c
            best_word = word
    improved = best_word is not None
    if best_cost is None:
        return None, None, None, False
    return phases.bucket_of_cost(best_cost), best_cost, best_word, improved


def run_fixed(layout: GqtspLayout, threshold: int, iterations: int,
              direction: str = "greater", record_curve: bool = True,
              groups=None):
    """Run `iterations` Grover steps at a fixed threshold.

    Returns (state, curve); the curve holds the top-3 undirected cycle
    probabilities before any step and after each step (noiseless, via
    exact basis probabilities).
    """
    clc = layout.build_clc_circuit(threshold, direction)
    hcd = layout.build_hcd_circuit()
    step = build_grover_step(layout, clc, hcd)
    state = layout.new_zero_state()
    apply_circuit(state, layout.uniform_prep())
    curve = None
    if record_curve:
        if groups is None:
            groups = _top3_undirected(layout.graph)
        curve = [_curve_point(state, layout, groups)]
    for _ in range(iterations):
        apply_circuit(state, step)
        if record_curve:
            curve.append(_curve_point(state, layout, groups))
    return state, curve, step


def classical_marked_count(layout: GqtspLayout, threshold: int,
                           direction: str = "greater") -> int:
    """Words marked by both oracles, counted classically (tests/reporting)."""
    config = ClcConfig(layout.phases, threshold, direction)
    count = 0
    for value in range(1 << layout.search_qubits):
        word = value_to_word(value, layout.n_cities, layout.m)
        if is_hamiltonian_theorem1(layout.lists, word) and config.marks(word):
            count += 1
    return count


def run_gqtsp(config: GasConfig) -> ExperimentResult:
    """The full adaptive search loop.

    Each round runs the fixed iteration schedule at the current threshold,
    samples the cycle register, and moves the threshold to the best valid
    tour seen so far.  Stops early once `stall_rounds` successive rounds
    bring no improvement.
    """
    graph = config.graph
    layout = GqtspLayout(graph, config.t, config.variant)
    lists, phases = layout.lists, layout.phases
    rng = np.random.default_rng(config.seed)
    direction = "greater" if config.objective == "min" else "less"

    initial = sample_valid_cycles(graph, config.initial_samples, rng)
    threshold, incumbent_cost, incumbent_word, _ = threshold_update(
        initial, phases, lists, graph, None, config.objective)
    if threshold is None:
        raise NoHamiltonianCycleError("no valid starting tour found")

    iterations = (config.iterations if config.iterations is not None
                  else fixed_iteration_count(layout.search_qubits))
    hcd = layout.build_hcd_circuit()
    result = ExperimentResult(
        best_word=incumbent_word, best_tour=None, best_cost=incumbent_cost,
        iterations_per_round=iterations, qubit_total=layout.total_qubits)
    groups = _top3_undirected(graph) if config.record_curve else None
    if config.record_curve:
        result.curve = []

    stall = 0
    for round_no in range(config.rounds):
        result.threshold_history.append(threshold)
        result.incumbent_history.append(incumbent_cost)
        clc = layout.build_clc_circuit(threshold, direction)
        step = build_grover_step(layout, clc, hcd)
        if not result.step_gate_counts:
            result.step_gate_counts = step.gate_counts
        state = layout.new_zero_state()
        apply_circuit(state, layout.uniform_prep())
        for _ in range(iterations):
            apply_circuit(state, step)
            if config.record_curve:
                result.curve.append(_curve_point(state, layout, groups))
        shot_seed = int(rng.integers(0, 2 ** 31))
        counts = sample(state, config.shots, layout.cycle, shot_seed)
        result.counts = counts
        result.rounds_run = round_no + 1
        decoded = [_bits_to_word(bits, layout.n_cities, layout.m)
                   for bits in counts]
        new_threshold, new_cost, new_word, improved = threshold_update(
            decoded, phases, lists, graph, incumbent_cost, config.objective)
        if new_threshold is None:
            result.warnings.append(f"round {round_no}: no valid sample")
        elif improved:
            threshold, incumbent_cost, incumbent_word = (
                new_threshold, new_cost, new_word)
            stall = 0
            continue
        stall += 1
        if stall >= config.stall_rounds:
            break

    result.best_word = incumbent_word
    result.best_cost = incumbent_cost
    if incumbent_word is not None:
        tour = word_to_tour(lists, incumbent_word)
        result.best_tour = tuple(tour) if tour else None
    if config.record_curve and result.curve:
        p1 = [p[0] for p in result.curve]
        result.i_opt_empirical = int(np.argmax(p1)) + 1
    if layout.n_cities <= 8:
        marked = classical_marked_count(layout, threshold, direction)
        result.marked_count = marked
        if marked:
            result.i_opt_estimate = estimate_iterations(layout.search_qubits, marked)
    return result


def _bits_to_word(bits: str, n_cities: int, m: int):
    value = int(bits, 2)
    return value_to_word(value, n_cities, m)
