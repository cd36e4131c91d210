"""Pure-NumPy gate kernels.

Fallback backend with the same call surface as the compiled module
(`_kernels_c`).  Every kernel mutates the amplitude array in place.
Indices are little-endian: qubit 0 is the least significant bit of the
basis-state index.  Controlled kernels take a (mask, pattern) pair and
fire where (index & mask) == pattern, which lets the dispatcher fold
lazily-tracked X gates into the controls.
"""

import numpy as np

COMPILED = False

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _mask_bits(mask):
    bits = []
    q = 0
    while mask:
        if mask & 1:
            bits.append(q)
        mask >>= 1
        q += 1
    return bits


def _free_indices(n, fixed_bits):
    """Indices over the full space with zeros at the fixed bit positions."""
    idx = np.arange(1 << (n - len(fixed_bits)), dtype=np.intp)
    for p in sorted(fixed_bits):
        low = idx & ((1 << p) - 1)
        idx = ((idx >> p) << (p + 1)) | low
    return idx


def apply_x(amps, n, target, ctrl_mask, ctrl_pattern):
    """X on `target` where (index & ctrl_mask) == ctrl_pattern."""
    fixed = _mask_bits(ctrl_mask) + [target]
    i0 = _free_indices(n, fixed) | ctrl_pattern
    i1 = i0 | (1 << target)
    tmp = amps[i0].copy()
    amps[i0] = amps[i1]
    amps[i1] = tmp


def apply_h(amps, n, target):
    step = 1 << target
    view = amps.reshape(-1, 2, step)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = (a + b) * _INV_SQRT2
    view[:, 1, :] = (a - b) * _INV_SQRT2


def apply_phase(amps, n, mask, pattern, angle):
    """Multiply e^{i*angle} onto every state with (index & mask) == pattern."""
    idx = _free_indices(n, _mask_bits(mask)) | pattern
    amps[idx] *= np.exp(1j * angle)


def apply_diag(amps, n, qubits, factors):
    """Per-value phase factors on the sub-register `qubits` (qubits[0] = LSB)."""
    free = _free_indices(n, list(qubits))
    for value in range(len(factors)):
        f = factors[value]
        if f == 1.0 + 0.0j:
            continue
        offset = 0
        for i, q in enumerate(qubits):
            if (value >> i) & 1:
                offset |= 1 << q
        amps[free | offset] *= f


def prob_mask(amps, n, mask, pattern):
    """Total probability of states whose `mask` bits equal `pattern`."""
    idx = _free_indices(n, _mask_bits(mask)) | pattern
    sub = amps[idx]
    return float(np.sum(sub.real * sub.real + sub.imag * sub.imag))


def marginal_probs(amps, n, qubits):
    """Probability of each value of the sub-register `qubits`."""
    k = len(qubits)
    free = _free_indices(n, list(qubits))
    out = np.empty(1 << k)
    for value in range(1 << k):
        offset = 0
        for i, q in enumerate(qubits):
            if (value >> i) & 1:
                offset |= 1 << q
        sub = amps[free | offset]
        out[value] = np.sum(sub.real * sub.real + sub.imag * sub.imag)
    return out


def norm_sq(amps):
    return float(np.sum(amps.real * amps.real + amps.imag * amps.imag))
