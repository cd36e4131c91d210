# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled gate kernels: strided in-place amplitude updates.

Same call surface as `_kernels_py`.  Inner loops run over contiguous
index ranges below the lowest fixed qubit where possible, and the
Hadamard/phase butterflies work on the buffer as flat doubles so the
compiler can vectorize them without shuffles.  Qubit 0 is the least
significant bit.  Controlled kernels fire where (index & mask) == pattern.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

COMPILED = True

ctypedef cnp.complex128_t cplx


cdef inline Py_ssize_t _collect_bits(unsigned long long mask, int* bits) nogil:
    cdef Py_ssize_t cnt = 0
    cdef int q = 0
    while mask:
        if mask & 1ULL:
            bits[cnt] = q
            cnt += 1
        mask >>= 1
        q += 1
    return cnt


cdef inline void _sort_small(int* arr, Py_ssize_t k) nogil:
    cdef Py_ssize_t i, j
    cdef int v
    for i in range(1, k):
        v = arr[i]
        j = i
        while j > 0 and arr[j - 1] > v:
            arr[j] = arr[j - 1]
            j -= 1
        arr[j] = v


cdef inline unsigned long long _expand(unsigned long long g, int* fixed,
                                       Py_ssize_t k) nogil:
    # insert a zero bit at each fixed position (ascending order)
    cdef Py_ssize_t i
    cdef unsigned long long low, one = 1
    for i in range(k):
        low = g & ((one << fixed[i]) - 1)
        g = ((g >> fixed[i]) << (fixed[i] + 1)) | low
    return g


def apply_x(cplx[::1] amps, int n, int target, unsigned long long ctrl_mask,
            unsigned long long ctrl_pattern):
    cdef int fixed[64]
    cdef Py_ssize_t k = _collect_bits(ctrl_mask | (1ULL << target), fixed)
    _sort_small(fixed, k)
    cdef int p0 = fixed[0]
    cdef Py_ssize_t run = (<Py_ssize_t> 1) << p0
    cdef Py_ssize_t outer = (<Py_ssize_t> 1) << (n - k - p0)
    cdef unsigned long long tbit = 1ULL << target
    cdef Py_ssize_t g, j
    cdef unsigned long long i0, i1
    cdef cplx tmp
    with nogil:
        for g in range(outer):
            i0 = _expand((<unsigned long long> g) << p0, fixed, k) | ctrl_pattern
            i1 = i0 | tbit
            for j in range(run):
                tmp = amps[i0 + j]
                amps[i0 + j] = amps[i1 + j]
                amps[i1 + j] = tmp


def apply_h(cplx[::1] amps, int n, int target):
    cdef double* d = <double*> &amps[0]
    cdef Py_ssize_t dr = (<Py_ssize_t> 2) << target      # doubles per half-block
    cdef Py_ssize_t outer = (<Py_ssize_t> 1) << (n - 1 - target)
    cdef double s = 1.0 / sqrt(2.0)
    cdef Py_ssize_t g, j, p0, p1
    cdef double a, b
    with nogil:
        for g in range(outer):
            p0 = (<Py_ssize_t> g) * 2 * dr
            p1 = p0 + dr
            for j in range(dr):
                a = d[p0 + j]
                b = d[p1 + j]
                d[p0 + j] = (a + b) * s
                d[p1 + j] = (a - b) * s


def apply_phase(cplx[::1] amps, int n, unsigned long long mask,
                unsigned long long pattern, double angle):
    cdef int fixed[64]
    cdef Py_ssize_t k = _collect_bits(mask, fixed)
    _sort_small(fixed, k)
    cdef int p0 = fixed[0]
    cdef Py_ssize_t run = (<Py_ssize_t> 1) << p0
    cdef Py_ssize_t outer = (<Py_ssize_t> 1) << (n - k - p0)
    cdef double fr = cos(angle), fi = sin(angle)
    cdef double* d = <double*> &amps[0]
    cdef Py_ssize_t g, j, base
    cdef double re, im
    with nogil:
        for g in range(outer):
            base = 2 * <Py_ssize_t> (
                _expand((<unsigned long long> g) << p0, fixed, k) | pattern)
            for j in range(run):
                re = d[base + 2 * j]
                im = d[base + 2 * j + 1]
                d[base + 2 * j] = re * fr - im * fi
                d[base + 2 * j + 1] = re * fi + im * fr


def apply_diag(cplx[::1] amps, int n, int[::1] qubits, cplx[::1] factors):
    """Phase table over a sub-register; entries equal to 1 are skipped.

    Mostly-unit tables walk one sub-hyperplane per non-unit value; dense
    tables do a single gather pass over the whole vector.
    """
    cdef int fixed[64]
    cdef int shifts[64]
    cdef Py_ssize_t r = qubits.shape[0], i
    cdef Py_ssize_t size = factors.shape[0]
    for i in range(r):
        fixed[i] = qubits[i]
        shifts[i] = qubits[i]
    _sort_small(fixed, r)
    cdef Py_ssize_t active = 0
    for i in range(size):
        if factors[i].real != 1.0 or factors[i].imag != 0.0:
            active += 1
    if active == 0:
        return
    cdef double* d = <double*> &amps[0]
    cdef Py_ssize_t g, j, v, base
    cdef unsigned long long idx, offset
    cdef double fr, fi, re, im
    cdef int p0 = fixed[0]
    cdef Py_ssize_t run = (<Py_ssize_t> 1) << p0
    cdef Py_ssize_t outer = (<Py_ssize_t> 1) << (n - r - p0)
    cdef Py_ssize_t total = (<Py_ssize_t> 1) << n

    if 4 * active <= size:
        # sparse: visit only the hyperplanes with a non-unit factor
        with nogil:
            for v in range(size):
                fr = factors[v].real
                fi = factors[v].imag
                if fr == 1.0 and fi == 0.0:
                    continue
                offset = 0
                for i in range(r):
                    if (v >> i) & 1:
                        offset |= 1ULL << qubits[i]
                for g in range(outer):
                    idx = _expand((<unsigned long long> g) << p0, fixed, r) | offset
                    base = 2 * <Py_ssize_t> idx
                    for j in range(run):
                        re = d[base + 2 * j]
                        im = d[base + 2 * j + 1]
                        d[base + 2 * j] = re * fr - im * fi
                        d[base + 2 * j + 1] = re * fi + im * fr
        return

    # dense: one pass, gathering the table index from the register bits;
    # for big states, resolve the low byte through a precomputed table so
    # the inner loop does one lookup instead of r shifts
    cdef Py_ssize_t blk, nblocks
    cdef unsigned long long vh
    cdef unsigned short lowtab[256]
    if n >= 10:
        for j in range(256):
            v = 0
            for i in range(r):
                if shifts[i] < 8 and (j >> shifts[i]) & 1:
                    v = v | ((<Py_ssize_t> 1) << i)
            lowtab[j] = <unsigned short> v
        nblocks = total >> 8
        with nogil:
            for blk in range(nblocks):
                vh = 0
                for i in range(r):
                    if shifts[i] >= 8:
                        vh = vh | ((((<unsigned long long> blk) >> (shifts[i] - 8)) & 1ULL) << i)
                base = blk << 8
                for j in range(256):
                    v = <Py_ssize_t> (vh | lowtab[j])
                    fr = factors[v].real
                    fi = factors[v].imag
                    re = d[2 * (base + j)]
                    im = d[2 * (base + j) + 1]
                    d[2 * (base + j)] = re * fr - im * fi
                    d[2 * (base + j) + 1] = re * fi + im * fr
        return
    with nogil:
        for g in range(total):
            v = 0
            for i in range(r):
                v = v | ((((<unsigned long long> g) >> shifts[i]) & 1ULL) << i)
            fr = factors[v].real
            fi = factors[v].imag
            re = d[2 * g]
            im = d[2 * g + 1]
            d[2 * g] = re * fr - im * fi
            d[2 * g + 1] = re * fi + im * fr


def prob_mask(cplx[::1] amps, int n, unsigned long long mask,
              unsigned long long pattern):
    cdef int fixed[64]
    cdef Py_ssize_t k = _collect_bits(mask, fixed)
    if k == 0:
        return norm_sq(amps)
    _sort_small(fixed, k)
    cdef int p0 = fixed[0]
    cdef Py_ssize_t run = (<Py_ssize_t> 1) << p0
    cdef Py_ssize_t outer = (<Py_ssize_t> 1) << (n - k - p0)
    cdef double acc = 0.0
    cdef Py_ssize_t g, j
    cdef unsigned long long i0
    cdef cplx a
    with nogil:
        for g in range(outer):
            i0 = _expand((<unsigned long long> g) << p0, fixed, k) | pattern
            for j in range(run):
                a = amps[i0 + j]
                acc += a.real * a.real + a.imag * a.imag
    return acc


def marginal_probs(cplx[::1] amps, int n, int[::1] qubits):
    cdef Py_ssize_t r = qubits.shape[0]
    out_arr = np.zeros(1 << r)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t idx, total = (<Py_ssize_t> 1) << n
    cdef unsigned long long v
    cdef Py_ssize_t i
    cdef cplx a
    with nogil:
        for idx in range(total):
            v = 0
            for i in range(r):
                if (idx >> qubits[i]) & 1:
                    v |= 1ULL << i
            a = amps[idx]
            out[v] += a.real * a.real + a.imag * a.imag
    return out_arr


def norm_sq(cplx[::1] amps):
    cdef Py_ssize_t i, total = amps.shape[0]
    cdef double acc = 0.0
    cdef cplx a
    with nogil:
        for i in range(total):
            a = amps[i]
            acc += a.real * a.real + a.imag * a.imag
    return acc
