"""Composite circuit builders on top of the primitive gate set.

Multi-controlled NOTs under ancilla constraints, OR gates, quantum-addressed
registers (quantum-data and classical-table variants), controlled diagonal
phase operators, QFT/iQFT, a constant comparator and the Grover diffusion
operator.  All builders are pure functions returning fresh Circuits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gqtsp.circuit import Circuit, QubitLedger
from gqtsp.errors import PoolExhaustedError

PI = math.pi


# ---------------------------------------------------------------------------
# multi-controlled X


def mcx_borrowed(ledger: QubitLedger, controls, target, borrowed) -> Circuit:
    """C^nNOT from Toffolis using n-2 borrowed ancillas (any state).

    Toggle-detection ladder; every borrowed qubit is restored for every
    basis input.  Toffoli count is exactly 4(n-2) for n >= 3.
    """
    controls = list(controls)
    borrowed = list(borrowed)
    n = len(controls)
    circ = Circuit(ledger, name=f"mcx_borrowed[{n}]")
    if n == 0:
        circ.x(target)
        return circ
    if n == 1:
        circ.mcx([controls[0]], target)
        return circ
    if n == 2:
        circ.toffoli(controls[0], controls[1], target)
        return circ
    if len(borrowed) < n - 2:
        raise ValueError(f"C^{n}NOT needs {n - 2} borrowed ancillas, got {len(borrowed)}")
    if set(borrowed) & (set(controls) | {target}):
        raise ValueError("borrowed ancillas overlap the gate qubits")
    borrowed = borrowed[: n - 2]

    tip = (controls[n - 1], borrowed[n - 3], target)
    base = (controls[0], controls[1], borrowed[0])
    ladder = [(controls[j + 2], borrowed[j], borrowed[j + 1]) for j in range(n - 3)]

    def descend_ascend(include_tips):
        if include_tips:
            circ.toffoli(*tip)
        for tof in reversed(ladder):
            circ.toffoli(*tof)
        circ.toffoli(*base)
        for tof in ladder:
            circ.toffoli(*tof)
        if include_tips:
            circ.toffoli(*tip)

    descend_ascend(include_tips=True)
    descend_ascend(include_tips=False)  # second pass restores the borrows
    return circ


def mcx_one_zeroed(ledger: QubitLedger, controls, target, zeroed=None) -> Circuit:
    """C^nNOT with a single zeroed ancilla, split into four half-size gates.

    Each half borrows its ancillas from the other half's controls, so no
    further qubits are needed.  When `zeroed` is None an ancilla is taken
    from the ledger pool; a C^nNOT without any ancilla is impossible (it
    is an odd permutation, Toffolis on a strict qubit subset are even),
    so an empty pool is rejected.
    """
    controls = list(controls)
    n = len(controls)
    circ = Circuit(ledger, name=f"mcx_one_zeroed[{n}]")
    if n <= 2:
        return mcx_borrowed(ledger, controls, target, [])
    release = None
    if zeroed is None:
        zeroed = ledger.borrow_zeroed(1)[0]
        release = zeroed
    try:
        if n == 3:
            circ.toffoli(controls[0], controls[1], zeroed)
            circ.toffoli(controls[2], zeroed, target)
            circ.toffoli(controls[0], controls[1], zeroed)
        else:
            half = n - (n // 2)           # ceil(n/2)
            group1 = controls[:half]
            group2 = controls[half:]
            to_anc = mcx_borrowed(ledger, group1, zeroed, group2)
            to_tgt = mcx_borrowed(ledger, group2 + [zeroed], target, group1)
            for part in (to_anc, to_tgt, to_anc, to_tgt):
                circ.extend(part)
    finally:
        if release is not None:
            ledger.return_zeroed([release])
    return circ


# ---------------------------------------------------------------------------
# OR


def or_gate(ledger: QubitLedger, inputs, result) -> Circuit:
    """result |0> <- OR of the inputs; inputs unchanged (X-MCX-X sandwich)."""
    inputs = list(inputs)
    circ = Circuit(ledger, name="or")
    for q in inputs:
        circ.x(q)
    circ.mcx(inputs, result)
    for q in inputs:
        circ.x(q)
    circ.x(result)
    return circ


# ---------------------------------------------------------------------------
# quantum-addressed registers


@dataclass(frozen=True)
class ClassicalTable:
    """Fixed lookup table: address (< 2^a) -> value (< 2^o); absent rows are 0."""

    entries: dict[int, int]
    address_width: int
    output_width: int

    def __post_init__(self):
        for addr, value in self.entries.items():
            if not 0 <= addr < (1 << self.address_width):
                raise ValueError(f"address {addr} out of range")
            if not 0 <= value < (1 << self.output_width):
                raise ValueError(f"value {value} too wide for {self.output_width} bits")

    def __getitem__(self, addr: int) -> int:
        return self.entries.get(addr, 0)


def _gray_walk(circ: Circuit, address, emit_term) -> None:
    """Visit all addresses in Gray order, X-toggling one line per step.

    The walk starts at the all-ones pattern (no set-up X gates) and ends
    with a single restoring X, so the total X count on the address lines
    is exactly 2^len(address).
    """
    n = len(address)
    full = (1 << n) - 1
    x_state = 0  # bitmask of currently inverted address lines
    for i in range(1 << n):
        addr = (i ^ (i >> 1)) ^ full
        wanted = ~addr & full
        toggle = wanted ^ x_state
        for q in range(n):
            if (toggle >> q) & 1:
                circ.x(address[q])
        x_state = wanted
        emit_term(addr)
    for q in range(n):
        if (x_state >> q) & 1:
            circ.x(address[q])


def qaqr(ledger: QubitLedger, address, data_registers, output) -> Circuit:
    """Quantum-addressed quantum register: output |0> <- data[address].

    `data_registers` holds up to 2^n registers of equal length; None
    entries (addresses past the stored data) read as zero.
    """
    address = list(address)
    output = list(output)
    regs = list(data_registers)
    if len(regs) > (1 << len(address)):
        raise ValueError("more data registers than addressable slots")
    width = len(output)
    seen = set(address) | set(output)
    for reg in regs:
        if reg is None:
            continue
        if len(reg) != width:
            raise ValueError("data register width differs from output width")
        overlap = set(reg) & (set(address) | set(output))
        if overlap:
            raise ValueError(f"data register overlaps address/output on {overlap}")
        seen |= set(reg)

    circ = Circuit(ledger, name=f"qaqr[{len(address)}x{width}]")

    def emit(addr):
        if addr < len(regs) and regs[addr] is not None:
            for bit in range(width):
                circ.mcx(address + [regs[addr][bit]], output[bit])

    _gray_walk(circ, address, emit)
    return circ


def qacr(ledger: QubitLedger, address, table: ClassicalTable, output) -> Circuit:
    """Quantum-addressed classical register: output |0> <- table[address]."""
    address = list(address)
    output = list(output)
    if len(address) != table.address_width:
        raise ValueError("address register width differs from table")
    if len(output) != table.output_width:
        raise ValueError("output register width differs from table")

    circ = Circuit(ledger, name=f"qacr[{table.address_width}->{table.output_width}]")

    def emit(addr):
        value = table[addr]
        for bit in range(len(output)):
            if (value >> bit) & 1:
                circ.mcx(address, output[bit])

    _gray_walk(circ, address, emit)
    return circ


# ---------------------------------------------------------------------------
# controlled diagonal phase operator


def controlled_u(ledger: QubitLedger, control, register, angles) -> Circuit:
    """When control=|1>, register value k gains phase e^{i angles[k]}.

    m=1 is a phase/controlled-phase pair; m=2 splits into the two-gate
    product of a three-phase block and one doubly-controlled phase; m>2
    recurses on the top choice bit with one pool ancilla per level.
    """
    register = list(register)
    angles = np.asarray(angles, dtype=float)
    m = len(register)
    if angles.shape != (1 << m,):
        raise ValueError(f"need {1 << m} angles for an {m}-qubit register")
    circ = Circuit(ledger, name=f"controlled_u[{m}]")
    _controlled_u_into(circ, ledger, control, register, angles)
    return circ


def _controlled_u_into(circ, ledger, control, register, angles):
    m = len(register)
    if m == 1:
        t0, t1 = float(angles[0]), float(angles[1])
        if t0:
            circ.phase(control, t0)
        if (t1 - t0) % (2 * PI):
            circ.cphase(control, register[0], t1 - t0)
        return
    if m == 2:
        t0, t1, t2, t3 = (float(a) for a in angles)
        if t0:
            circ.phase(control, t0)
        if (t1 - t0) % (2 * PI):
            circ.cphase(control, register[0], t1 - t0)
        if (t2 - t0) % (2 * PI):
            circ.cphase(control, register[1], t2 - t0)
        residual = (t3 - t2 - t1 + t0) % (2 * PI)
        if residual:
            anc = ledger.borrow_zeroed(1)[0]
            circ.toffoli(register[1], register[0], anc)
            circ.cphase(control, anc, residual)
            circ.toffoli(register[1], register[0], anc)
            ledger.return_zeroed([anc])
        return
    # m > 2: split the table on the top choice bit
    top = register[-1]
    rest = register[:-1]
    half = 1 << (m - 1)
    anc = ledger.borrow_zeroed(1)[0]
    circ.toffoli(control, top, anc)
    _controlled_u_into(circ, ledger, anc, rest, angles[half:])
    circ.toffoli(control, top, anc)
    circ.x(top)
    circ.toffoli(control, top, anc)
    _controlled_u_into(circ, ledger, anc, rest, angles[:half])
    circ.toffoli(control, top, anc)
    circ.x(top)
    ledger.return_zeroed([anc])


# ---------------------------------------------------------------------------
# QFT / iQFT


def qft(ledger: QubitLedger, register) -> Circuit:
    """Textbook transform, little-endian: |k> -> sum_c e^{2 pi i kc/2^t}|c>/sqrt(2^t)."""
    register = list(register)
    t = len(register)
    circ = Circuit(ledger, name=f"qft[{t}]")
    for j in range(t - 1, -1, -1):
        circ.h(register[j])
        for i in range(j - 1, -1, -1):
            circ.cphase(register[i], register[j], PI / (1 << (j - i)))
    for i in range(t // 2):
        _swap(circ, register[i], register[t - 1 - i])
    return circ


def iqft(ledger: QubitLedger, register) -> Circuit:
    return qft(ledger, register).inverse(name=f"iqft[{len(list(register))}]")


def _swap(circ, a, b):
    circ.mcx([a], b)
    circ.mcx([b], a)
    circ.mcx([a], b)


# ---------------------------------------------------------------------------
# comparator


def compare_const(ledger: QubitLedger, register, threshold: int, result,
                  direction: str = "greater") -> Circuit:
    """result |0> <- [register < threshold] (or >); register restored.

    Most-significant-first prefix scan against the classical constant:
    for each bit where crossing the constant decides the comparison, one
    multi-controlled X fires on a pattern that can match at most once,
    so the flips accumulate to the comparison bit without ancillas.
    """
    register = list(register)
    t = len(register)
    if not 0 <= threshold < (1 << t):
        raise ValueError(f"threshold {threshold} out of range for {t} bits")
    if direction not in ("less", "greater"):
        raise ValueError(f"direction must be 'less' or 'greater', not {direction!r}")
    circ = Circuit(ledger, name=f"cmp[{direction}{threshold}]")
    want = 0 if direction == "greater" else 1
    for i in range(t - 1, -1, -1):
        if (threshold >> i) & 1 != want:
            continue
        # register matches the threshold on bits above i and differs at i;
        # the patterns are mutually exclusive, so the flips never collide
        sandwich = []
        for j in range(i, t):
            required = (threshold >> j) & 1 if j > i else 1 - want
            if required == 0:
                sandwich.append(register[j])
        for q in sandwich:
            circ.x(q)
        circ.mcx([register[j] for j in range(i, t)], result)
        for q in sandwich:
            circ.x(q)
    return circ


# ---------------------------------------------------------------------------
# diffusion


def diffusion(ledger: QubitLedger, register) -> Circuit:
    """Exact 2|s><s| - I on the register, |s> the uniform superposition."""
    register = list(register)
    circ = Circuit(ledger, name=f"diffusion[{len(register)}]")
    for q in register:
        circ.h(q)
    table = np.zeros(1 << len(register))
    table[0] = PI
    circ.diag(register, table)
    circ.diag([register[0]], np.array([PI, PI]))  # global phase: fixes the overall sign
    for q in register:
        circ.h(q)
    return circ
