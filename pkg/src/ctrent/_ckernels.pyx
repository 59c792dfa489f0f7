# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels for the preprocessing and histogram hot paths.

Mirrors ``ctrent._pykernels`` exactly; both backends must produce
bit-identical arrays.
"""

from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memset

import numpy as np


def delta_signmag(samples):
    """Successive differences of a uint64 sequence, sign-magnitude encoded."""
    cdef const uint64_t[::1] s = np.ascontiguousarray(samples, dtype=np.uint64)
    cdef Py_ssize_t n = s.shape[0]
    if n < 2:
        return np.empty(0, dtype=np.uint64), 0
    out_arr = np.empty(n - 1, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef uint64_t SIGN = (<uint64_t>1) << 63
    cdef uint64_t MAG = SIGN - 1
    cdef Py_ssize_t i
    cdef uint64_t a, b, mag, mag63
    cdef int64_t overflows = 0
    for i in range(n - 1):
        a = s[i]
        b = s[i + 1]
        if b >= a:
            mag = b - a
        else:
            mag = a - b
        if mag & SIGN:
            overflows += 1
        mag63 = mag & MAG
        if mag63 == 0:
            out[i] = 0
        elif b >= a:
            out[i] = mag63
        else:
            out[i] = SIGN | mag63
    return out_arr, int(overflows)


def fold_words(words, int alpha):
    """XOR-fold each 64-bit word into its ``alpha``-bit fields."""
    cdef const uint64_t[::1] w = np.ascontiguousarray(words, dtype=np.uint64)
    cdef Py_ssize_t n = w.shape[0]
    out_arr = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef uint64_t mask
    if alpha == 64:
        mask = <uint64_t>0xFFFFFFFFFFFFFFFF
    else:
        mask = ((<uint64_t>1) << alpha) - 1
    cdef Py_ssize_t i
    cdef int sh
    cdef uint64_t acc, v
    for i in range(n):
        v = w[i]
        acc = v
        sh = alpha
        while sh < 64:
            acc ^= v >> sh
            sh += alpha
        out[i] = acc & mask
    return out_arr


def pack_symbols(values, int alpha, int symbol_width):
    """Group ``alpha``-bit values into ``symbol_width``-bit symbols, MSB first."""
    cdef const uint64_t[::1] v = np.ascontiguousarray(values, dtype=np.uint64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, m
    cdef int chunks, per, j
    cdef uint64_t acc
    cdef uint64_t mask = ((<uint64_t>1) << symbol_width) - 1
    cdef uint8_t[::1] out
    if alpha >= symbol_width:
        chunks = alpha // symbol_width
        out_hi = np.empty(n * chunks, dtype=np.uint8)
        out = out_hi
        for i in range(n):
            for j in range(chunks):
                out[i * chunks + j] = <uint8_t>(
                    (v[i] >> (symbol_width * (chunks - 1 - j))) & mask
                )
        return out_hi
    per = symbol_width // alpha
    m = n // per
    out_lo = np.empty(m, dtype=np.uint8)
    out = out_lo
    for i in range(m):
        acc = 0
        for j in range(per):
            acc |= v[i * per + j] << (symbol_width - (j + 1) * alpha)
        out[i] = <uint8_t>acc
    return out_lo


def count_symbols(symbols, int alphabet_size):
    """Occurrence counts of each symbol value in ``[0, alphabet_size)``."""
    cdef const uint8_t[::1] s = np.ascontiguousarray(symbols, dtype=np.uint8)
    out_arr = np.zeros(alphabet_size, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int val
    for i in range(s.shape[0]):
        val = s[i]
        if val >= alphabet_size:
            raise ValueError(
                f"symbol {val} out of range for alphabet {alphabet_size}"
            )
        out[val] += 1
    return out_arr


def joint_counts16(x, y):
    """256-cell joint histogram of two aligned nibble streams."""
    cdef const uint8_t[::1] xs = np.ascontiguousarray(x, dtype=np.uint8)
    cdef const uint8_t[::1] ys = np.ascontiguousarray(y, dtype=np.uint8)
    if xs.shape[0] != ys.shape[0]:
        raise ValueError("length mismatch")
    out_arr = np.zeros(256, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int a, b
    for i in range(xs.shape[0]):
        a = xs[i]
        b = ys[i]
        if a >= 16 or b >= 16:
            raise ValueError("nibble value out of range")
        out[a * 16 + b] += 1
    return out_arr


def sliding_joint_counts16(x, y, Py_ssize_t window_len, Py_ssize_t step):
    """Joint nibble histograms over aligned sliding windows."""
    if window_len < 1 or step < 1:
        raise ValueError("window_len and step must be >= 1")
    cdef const uint8_t[::1] xs = np.ascontiguousarray(x, dtype=np.uint8)
    cdef const uint8_t[::1] ys = np.ascontiguousarray(y, dtype=np.uint8)
    cdef Py_ssize_t n = xs.shape[0]
    if n != ys.shape[0]:
        raise ValueError("length mismatch")
    cdef Py_ssize_t i
    for i in range(n):
        if xs[i] >= 16 or ys[i] >= 16:
            raise ValueError("nibble value out of range")
    cdef Py_ssize_t nw = 0
    if n >= window_len:
        nw = (n - window_len) // step + 1
    out_arr = np.zeros((nw, 256), dtype=np.int64)
    if nw == 0:
        return out_arr
    cdef int64_t[:, ::1] out = out_arr
    cdef int64_t[256] cnt
    cdef Py_ssize_t k, s_prev, s_cur
    memset(cnt, 0, sizeof(cnt))
    for i in range(window_len):
        cnt[xs[i] * 16 + ys[i]] += 1
    for i in range(256):
        out[0, i] = cnt[i]
    for k in range(1, nw):
        s_prev = (k - 1) * step
        s_cur = k * step
        if step < window_len:
            # Slide: retire the old prefix, absorb the new suffix.
            for i in range(s_prev, s_cur):
                cnt[xs[i] * 16 + ys[i]] -= 1
            for i in range(s_prev + window_len, s_cur + window_len):
                cnt[xs[i] * 16 + ys[i]] += 1
        else:
            memset(cnt, 0, sizeof(cnt))
            for i in range(s_cur, s_cur + window_len):
                cnt[xs[i] * 16 + ys[i]] += 1
        for i in range(256):
            out[k, i] = cnt[i]
    return out_arr
