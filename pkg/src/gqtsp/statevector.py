"""Dense statevector simulation of circuits built from the primitive gates.

Amplitudes are complex128, 2^n of them, so memory is 16 * 2^n bytes:
n = 23 needs 128 MiB, n = 25 needs 512 MiB.  `new_state` refuses anything
above the memory bound (default 26 qubits ~ 1 GiB, overridable via the
GQTSP_MAX_QUBITS environment variable or the `max_qubits` argument).

Plain X gates are tracked lazily as an XOR offset on the basis-state
index instead of permuting 2^n amplitudes; controlled gates fold the
offset into their control patterns.  The `amplitudes` property
materializes the offset, so observable semantics are unchanged.
"""

from __future__ import annotations

import os

import numpy as np

from gqtsp import circuit as cz
from gqtsp.backends import get_backend
from gqtsp.circuit import Circuit, Gate, QubitLedger
from gqtsp.errors import ResourceLimitError

DEFAULT_MAX_QUBITS = 26


def max_qubit_bound() -> int:
    value = os.environ.get("GQTSP_MAX_QUBITS")
    return int(value) if value else DEFAULT_MAX_QUBITS


class StateVector:
    """2^n complex amplitudes with a norm-1 invariant.

    The qubit count is fixed at construction.  Kernels mutate the
    amplitude buffer in place; two StateVectors never share storage.
    """

    def __init__(self, qubit_count: int, amplitudes: np.ndarray, backend):
        self._n = qubit_count
        self._amps = amplitudes
        self._offset = 0  # semantic index = physical index XOR offset
        self._kern = backend

    @property
    def qubit_count(self) -> int:
        return self._n

    @property
    def amplitudes(self) -> np.ndarray:
        self.materialize()
        return self._amps

    def materialize(self) -> None:
        """Apply any pending lazy X permutation to the buffer."""
        off = self._offset
        q = 0
        while off:
            if off & 1:
                self._kern.apply_x(self._amps, self._n, q, 0, 0)
            off >>= 1
            q += 1
        self._offset = 0

    def copy(self) -> "StateVector":
        dup = StateVector(self._n, self._amps.copy(), self._kern)
        dup._offset = self._offset
        return dup

    def norm_error(self) -> float:
        return abs(self._kern.norm_sq(self._amps) - 1.0)


def new_state(n: int, max_qubits: int | None = None, backend: str = "auto") -> StateVector:
    """|0...0> on n qubits."""
    if n < 1:
        raise ValueError("need at least one qubit")
    bound = max_qubits if max_qubits is not None else max_qubit_bound()
    if n > bound:
        raise ResourceLimitError(
            f"{n} qubits exceed the memory bound of {bound} "
            f"(2^{n} amplitudes = {16 * (1 << n) / 2**30:.1f} GiB)")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps, get_backend(backend))


def _bitmask(qubits) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return mask


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the state."""
    n = state.qubit_count
    for q in gate.qubits:
        if q >= n:
            raise ValueError(f"gate {gate!r} out of range for {n} qubits")
    amps = state._amps
    k = state._kern
    off = state._offset
    kind = gate.kind
    if kind == cz.PAULI_X:
        state._offset ^= 1 << gate.qubits[0]
    elif kind == cz.HADAMARD:
        q = gate.qubits[0]
        if (off >> q) & 1:
            k.apply_x(amps, n, q, 0, 0)
            state._offset ^= 1 << q
        k.apply_h(amps, n, q)
    elif kind in (cz.PHASE, cz.CONTROLLED_PHASE):
        mask = _bitmask(gate.qubits)
        k.apply_phase(amps, n, mask, mask & ~off, gate.angle)
    elif kind in (cz.TOFFOLI, cz.MULTI_CONTROLLED_X):
        ctrl = _bitmask(gate.qubits[:-1])
        k.apply_x(amps, n, gate.qubits[-1], ctrl, ctrl & ~off)
    elif kind == cz.DIAGONAL_PHASE:
        qubits = np.asarray(gate.qubits, dtype=np.int32)
        factors = np.exp(1j * gate.table)
        # padding rows enter as exact zeros; make their factors exact ones
        factors[gate.table == 0.0] = 1.0
        sub_off = 0
        for i, q in enumerate(gate.qubits):
            if (off >> q) & 1:
                sub_off |= 1 << i
        if sub_off:
            factors = factors[np.arange(factors.size) ^ sub_off]
        k.apply_diag(amps, n, qubits, np.ascontiguousarray(factors))
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    return state


def apply_circuit(state: StateVector, circ: Circuit) -> StateVector:
    if circ.ledger.total_allocated > state.qubit_count:
        raise ValueError(
            f"circuit uses {circ.ledger.total_allocated} qubits, "
            f"state has {state.qubit_count}")
    for gate in circ.gates:
        apply_gate(state, gate)
    return state


def probability_of_pattern(state: StateVector, qubits, value: int) -> float:
    """Probability that the listed qubits (LSB first) read `value`."""
    mask = _bitmask(qubits)
    pattern = 0
    for i, q in enumerate(qubits):
        if (value >> i) & 1:
            pattern |= 1 << q
    pattern ^= state._offset & mask
    return state._kern.prob_mask(state._amps, state.qubit_count, mask, pattern)


def basis_probability(state: StateVector, ledger: QubitLedger,
                      register: str, value: int) -> float:
    """Probability that the named register reads `value` (exact, no sampling)."""
    qubits = ledger.register(register)
    if value < 0 or value >= (1 << len(qubits)):
        raise ValueError(f"value {value} out of range for register {register!r}")
    return probability_of_pattern(state, qubits, value)


def sample(state: StateVector, shots: int, qubits, seed: int) -> dict[str, int]:
    """Measure the given qubits `shots` times; returns bitstring -> count.

    Bitstrings are printed most significant first, so qubits[0] is the
    rightmost character.  The seed is required: equal seeds give
    bit-identical counts.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    qubits = list(qubits)
    if not qubits:
        raise ValueError("empty qubit list")
    state.materialize()
    k = len(qubits)
    probs = state._kern.marginal_probs(
        state._amps, state.qubit_count, np.asarray(qubits, dtype=np.int32))
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    out = {}
    for value in np.flatnonzero(counts):
        bits = format(int(value), f"0{k}b")
        out[bits] = int(counts[value])
    return out
