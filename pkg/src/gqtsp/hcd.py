"""Hamiltonian-cycle-detection oracle circuits.

Three variants share the traveling machinery (the index forwarder):

* naive    - locations I_1..I_N all live, OR checks at every step 1..N-1;
* improved - OR checks only at proper divisors of N;
* anchored - divisor checks plus anchor registers so only k+floor(N/(k+1))
             location registers are ever live.

Every variant writes its verdict into a single result qubit and then
mirrors the compute part, so all ancillas return to |0> on every basis
input.  Applied onto a |-> result qubit the same circuit acts as the
phase-flip form of the oracle.

The index converter maps an out-of-range (index, choice) pair back to
the current index.  A city's choice bits never change, so an invalid
position is absorbing: the walk parks there, the final "back at city 0"
check fails, and the word is rejected exactly as the classical
definition demands (if the invalid choice sits at city 0 itself the
walk parks at 0 and the always-present first divisor check fails).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gqtsp.circuit import Circuit, QubitLedger
from gqtsp.synth import ClassicalTable, or_gate, qacr, qaqr
from gqtsp.tsp import AdjacencyLists, proper_divisors


@dataclass(frozen=True)
class ForwarderSpec:
    """Adjacency data plus the classical index-conversion table."""

    lists: AdjacencyLists

    @property
    def n_cities(self) -> int:
        return self.lists.n_cities

    @property
    def choice_bits(self) -> int:
        return self.lists.choice_bits

    @property
    def index_bits(self) -> int:
        return self.lists.index_bits

    def conversion_table(self) -> ClassicalTable:
        """(index << m | choice) -> next index; invalid pairs hold position."""
        m, n = self.choice_bits, self.index_bits
        entries = {}
        for index in range(1 << n):
            row = self.lists.lists[index] if index < self.n_cities else ()
            for choice in range(1 << m):
                addr = (index << m) | choice
                entries[addr] = row[choice] if choice < len(row) else index
        return ClassicalTable(entries, m + n, n)

    def first_step_table(self) -> ClassicalTable:
        """choice -> P_0[choice]; an invalid choice stays at city 0."""
        m = self.choice_bits
        row = self.lists.lists[0]
        entries = {c: (row[c] if c < len(row) else 0) for c in range(1 << m)}
        return ClassicalTable(entries, m, self.index_bits)


def cycle_slices(cycle_register, n_cities: int, m: int):
    """Split the flat mN-qubit cycle register into per-city m-qubit slices."""
    cycle_register = list(cycle_register)
    if len(cycle_register) != n_cities * m:
        raise ValueError("cycle register size is not N*m")
    return [cycle_register[m * i:m * (i + 1)] for i in range(n_cities)]


def build_index_forwarder(ledger: QubitLedger, spec: ForwarderSpec, current,
                          nxt, slices, scratch) -> Circuit:
    """next |0> <- successor of `current` under the cycle register.

    Quantum multiplexer (QAQR addressed by the current index over the N
    cycle slices) into the scratch register, index conversion (QACR on
    scratch+current), then the mirrored multiplexer to clear the scratch.
    `current` and the cycle register are unchanged.
    """
    current = list(current)
    scratch = list(scratch)
    circ = Circuit(ledger, name="forwarder")
    data = list(slices) + [None] * ((1 << len(current)) - len(slices))
    mux = qaqr(ledger, current, data, scratch)
    circ.extend(mux)
    circ.extend(qacr(ledger, scratch + current, spec.conversion_table(), nxt))
    circ.extend(mux.inverse())
    return circ


def _first_forwarder(ledger, spec, nxt, slice0, scratch) -> Circuit:
    """Specialized first step: the salesman starts at the classical city 0."""
    circ = Circuit(ledger, name="forwarder0")
    for bit, q in enumerate(slice0):
        circ.mcx([q], scratch[bit])
    circ.extend(qacr(ledger, list(scratch), spec.first_step_table(), nxt))
    for bit, q in enumerate(slice0):
        circ.mcx([q], scratch[bit])
    return circ


def _finish(ledger, compute: Circuit, checks, final_reg, r_hcd) -> Circuit:
    """compute, then MCX(checks AND final_reg == 0 -> r_hcd), then mirror."""
    circ = Circuit(ledger, name=compute.name)
    circ.extend(compute)
    for q in final_reg:
        circ.x(q)
    circ.mcx(list(checks) + list(final_reg), r_hcd)
    for q in final_reg:
        circ.x(q)
    circ.extend(compute.inverse())
    return circ


def build_hcd_naive(ledger: QubitLedger, spec: ForwarderSpec, cycle,
                    locations, checks, scratch, r_hcd) -> Circuit:
    """Theorem-1 oracle: every step checked, N location registers live.

    `locations` holds N registers of n qubits (I_1..I_N), `checks` N-1
    qubits, `scratch` m qubits; all ancillas |0> on entry and exit.
    """
    n_cities = spec.n_cities
    locations = [list(r) for r in locations]
    checks = list(checks)
    if len(locations) != n_cities or len(checks) != n_cities - 1:
        raise ValueError("naive variant needs N location registers and N-1 checks")
    slices = cycle_slices(cycle, n_cities, spec.choice_bits)
    compute = Circuit(ledger, name="hcd_naive")
    compute.extend(_first_forwarder(ledger, spec, locations[0], slices[0], scratch))
    for step in range(2, n_cities + 1):
        compute.extend(build_index_forwarder(
            ledger, spec, locations[step - 2], locations[step - 1], slices, scratch))
    for step in range(1, n_cities):
        compute.extend(or_gate(ledger, locations[step - 1], checks[step - 1]))
    return _finish(ledger, compute, checks, locations[-1], r_hcd)


def build_hcd_improved(ledger: QubitLedger, spec: ForwarderSpec, cycle,
                       locations, checks, scratch, r_hcd) -> Circuit:
    """Theorem-2 oracle: OR checks only at proper divisors of N."""
    n_cities = spec.n_cities
    divisors = proper_divisors(n_cities)
    locations = [list(r) for r in locations]
    checks = list(checks)
    if len(locations) != n_cities or len(checks) != len(divisors):
        raise ValueError(
            f"improved variant needs N location registers and {len(divisors)} checks")
    slices = cycle_slices(cycle, n_cities, spec.choice_bits)
    compute = Circuit(ledger, name="hcd_improved")
    compute.extend(_first_forwarder(ledger, spec, locations[0], slices[0], scratch))
    for step in range(2, n_cities + 1):
        compute.extend(build_index_forwarder(
            ledger, spec, locations[step - 2], locations[step - 1], slices, scratch))
    for check_q, step in zip(checks, divisors):
        compute.extend(or_gate(ledger, locations[step - 1], check_q))
    return _finish(ledger, compute, checks, locations[-1], r_hcd)


# ---------------------------------------------------------------------------
# anchored variant


def k_opt(n_cities: int, index_bits: int | None = None) -> int:
    """argmin_k of floor(N/(k+1)) + k; ties break toward smaller k."""
    if n_cities < 2:
        raise ValueError("need at least two cities")
    best_k, best = 1, None
    for k in range(1, n_cities + 1):
        value = n_cities // (k + 1) + k
        if best is None or value < best:
            best_k, best = k, value
    return best_k


@dataclass(frozen=True)
class AnchorPlan:
    """Block schedule for the anchored oracle.

    k intermediate location registers are reused across L blocks; block i
    computes steps (i-1)(k+1)+1 .. i(k+1), keeps the last one as anchor
    A_i and uncomputes the rest.  Steps past L(k+1) form the tail.
    """

    n_cities: int
    k: int

    @classmethod
    def optimal(cls, n_cities: int) -> "AnchorPlan":
        return cls(n_cities, k_opt(n_cities))

    @property
    def anchors(self) -> int:
        return self.n_cities // (self.k + 1)

    @property
    def tail(self) -> int:
        return self.n_cities - self.anchors * (self.k + 1)

    @property
    def location_registers(self) -> int:
        return self.k + self.anchors

    def location_qubits(self, index_bits: int) -> int:
        return index_bits * self.location_registers

    def __post_init__(self):
        if self.k < 1 or self.anchors < 1:
            raise ValueError(f"infeasible anchor plan N={self.n_cities}, k={self.k}")


def build_hcd_anchored(ledger: QubitLedger, spec: ForwarderSpec,
                       plan: AnchorPlan, cycle, intermediates, anchors,
                       checks, scratch, r_hcd) -> Circuit:
    """Theorem-2 oracle with anchored location reuse.

    `intermediates` holds the plan's k reusable registers, `anchors` its
    L anchor registers; marking behavior is identical to the improved
    variant on every basis word.
    """
    n_cities = spec.n_cities
    divisors = proper_divisors(n_cities)
    intermediates = [list(r) for r in intermediates]
    anchors = [list(r) for r in anchors]
    checks = list(checks)
    if len(intermediates) != plan.k or len(anchors) != plan.anchors:
        raise ValueError("register count does not match the anchor plan")
    if len(checks) != len(divisors):
        raise ValueError(f"anchored variant needs {len(divisors)} checks")
    slices = cycle_slices(cycle, n_cities, spec.choice_bits)
    check_for_step = dict(zip(divisors, checks))

    def forward(source, target):
        # source None means the classical start at city 0
        if source is None:
            return _first_forwarder(ledger, spec, target, slices[0], scratch)
        return build_index_forwarder(ledger, spec, source, target, slices, scratch)

    compute = Circuit(ledger, name="hcd_anchored")
    k = plan.k
    for block in range(plan.anchors):
        base = block * (k + 1)
        prev = anchors[block - 1] if block else None
        segment = Circuit(ledger)  # the part undone once the anchor is set
        regs = []
        for off in range(k):
            segment.extend(forward(prev if off == 0 else regs[-1], intermediates[off]))
            regs.append(intermediates[off])
        compute.extend(segment)
        compute.extend(forward(regs[-1], anchors[block]))
        for off, reg in enumerate(regs):
            step = base + off + 1
            if step in check_for_step:
                compute.extend(or_gate(ledger, reg, check_for_step[step]))
        anchor_step = base + k + 1
        if anchor_step in check_for_step:
            compute.extend(or_gate(ledger, anchors[block], check_for_step[anchor_step]))
        compute.extend(segment.inverse())

    final_reg = anchors[-1]
    if plan.tail:
        prev = anchors[-1]
        for off in range(plan.tail):
            step = plan.anchors * (k + 1) + off + 1
            compute.extend(forward(prev, intermediates[off]))
            prev = intermediates[off]
            if step in check_for_step:
                compute.extend(or_gate(ledger, prev, check_for_step[step]))
        final_reg = prev

    return _finish(ledger, compute, checks, final_reg, r_hcd)


# ---------------------------------------------------------------------------
# register layout helpers


@dataclass
class HcdRegisters:
    cycle: tuple[int, ...]
    location_regs: list[list[int]]
    anchor_regs: list[list[int]]
    checks: list[int]
    scratch: list[int]
    r_hcd: int


def allocate_hcd(ledger: QubitLedger, spec: ForwarderSpec, variant: str,
                 cycle, r_hcd, plan: AnchorPlan | None = None) -> HcdRegisters:
    """Borrow the ancilla registers a variant needs from the ledger pool."""
    n_cities, n, m = spec.n_cities, spec.index_bits, spec.choice_bits
    if variant == "anchored":
        plan = plan or AnchorPlan.optimal(n_cities)
        loc = [ledger.borrow_zeroed(n) for _ in range(plan.k)]
        anc = [ledger.borrow_zeroed(n) for _ in range(plan.anchors)]
        n_checks = len(proper_divisors(n_cities))
    else:
        loc = [ledger.borrow_zeroed(n) for _ in range(n_cities)]
        anc = []
        n_checks = (n_cities - 1 if variant == "naive"
                    else len(proper_divisors(n_cities)))
    checks = ledger.borrow_zeroed(n_checks)
    scratch = ledger.borrow_zeroed(m)
    return HcdRegisters(tuple(cycle), loc, anc, checks, scratch, r_hcd)


def release_hcd(ledger: QubitLedger, regs: HcdRegisters) -> None:
    for r in regs.location_regs + regs.anchor_regs:
        ledger.return_zeroed(r)
    ledger.return_zeroed(regs.checks)
    ledger.return_zeroed(regs.scratch)


def build_hcd(ledger: QubitLedger, spec: ForwarderSpec, variant: str,
              regs: HcdRegisters, plan: AnchorPlan | None = None) -> Circuit:
    if variant == "naive":
        return build_hcd_naive(ledger, spec, regs.cycle, regs.location_regs,
                               regs.checks, regs.scratch, regs.r_hcd)
    if variant == "improved":
        return build_hcd_improved(ledger, spec, regs.cycle, regs.location_regs,
                                  regs.checks, regs.scratch, regs.r_hcd)
    if variant == "anchored":
        plan = plan or AnchorPlan.optimal(spec.n_cities)
        return build_hcd_anchored(ledger, spec, plan, regs.cycle,
                                  regs.location_regs, regs.anchor_regs,
                                  regs.checks, regs.scratch, regs.r_hcd)
    raise ValueError(f"unknown HCD variant {variant!r}")
