"""Classical bit-trace evaluation of permutation circuits.

Circuits made only of X / Toffoli / MultiControlledX map basis states to
basis states, so they can be evaluated by Boolean propagation — no
statevector.  `trace_words` runs a whole batch of basis words at once
with vectorized uint64 bit operations, which is what keeps the N=6
oracle sweeps (4096 words x ~10^4 gates) under a minute.
"""

import numpy as np

from gqtsp import circuit as cz
from gqtsp.circuit import Circuit


def _masks(gate):
    ctrl = 0
    for q in gate.qubits[:-1]:
        ctrl |= 1 << q
    return np.uint64(ctrl), np.uint64(1 << gate.qubits[-1])


def trace_words(circ: Circuit, words: np.ndarray) -> np.ndarray:
    """Propagate packed basis states (uint64, qubit q = bit q) through `circ`."""
    state = np.asarray(words, dtype=np.uint64).copy()
    for gate in circ.gates:
        if gate.kind == cz.PAULI_X:
            state ^= np.uint64(1 << gate.qubits[0])
        elif gate.kind in (cz.TOFFOLI, cz.MULTI_CONTROLLED_X):
            ctrl, tbit = _masks(gate)
            state ^= np.where((state & ctrl) == ctrl, tbit, np.uint64(0))
        else:
            raise ValueError(
                f"{gate.kind} is not a permutation gate; trace only handles "
                "X/Toffoli/MultiControlledX circuits")
    return state


def trace_word(circ: Circuit, word: int) -> int:
    return int(trace_words(circ, np.array([word], dtype=np.uint64))[0])
