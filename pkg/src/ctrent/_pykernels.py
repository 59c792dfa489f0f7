"""NumPy fallback for the integer hot-path kernels.

The compiled extension (``ctrent._ckernels``) implements the same six
functions; both backends must produce bit-identical arrays.
``tests/test_kernels.py`` cross-checks them on random inputs, so any
change here needs a matching change there.
"""

from __future__ import annotations

import numpy as np

_SIGN = np.uint64(1) << np.uint64(63)
_MAG = _SIGN - np.uint64(1)


def delta_signmag(samples):
    """Successive differences of a uint64 sequence, sign-magnitude encoded.

    The sign occupies the top bit, the magnitude the low 63 bits reduced
    modulo 2**63; the number of reduced (overflowed) magnitudes is
    returned alongside. Zero is always the all-zero word (no negative
    zero). Returns ``(words, overflow_count)`` with ``len(words) ==
    len(samples) - 1``.
    """
    s = np.ascontiguousarray(samples, dtype=np.uint64)
    if s.size < 2:
        return np.empty(0, dtype=np.uint64), 0
    a, b = s[:-1], s[1:]
    neg = a > b
    mag = np.where(neg, a - b, b - a)
    overflows = int(np.count_nonzero(mag & _SIGN))
    mag63 = mag & _MAG
    words = np.where(neg, mag63 | _SIGN, mag63)
    words = np.where(mag63 == np.uint64(0), np.uint64(0), words)
    return words, overflows


def fold_words(words, alpha):
    """XOR-fold each 64-bit word into its ``alpha``-bit fields."""
    w = np.ascontiguousarray(words, dtype=np.uint64)
    acc = w.copy()
    shift = alpha
    while shift < 64:
        acc ^= w >> np.uint64(shift)
        shift += alpha
    if alpha == 64:
        return acc
    return acc & np.uint64((1 << alpha) - 1)


def pack_symbols(values, alpha, symbol_width):
    """Group ``alpha``-bit values into ``symbol_width``-bit symbols, MSB first.

    For ``alpha >= symbol_width`` each value is split into
    ``alpha // symbol_width`` chunks, most significant chunk first; for
    ``alpha < symbol_width`` consecutive values fill each symbol from the
    most significant bits down, and a trailing partial symbol is
    discarded.
    """
    v = np.ascontiguousarray(values, dtype=np.uint64)
    if alpha >= symbol_width:
        chunks = alpha // symbol_width
        mask = np.uint64((1 << symbol_width) - 1)
        out = np.empty(v.size * chunks, dtype=np.uint8)
        for j in range(chunks):
            shift = np.uint64(symbol_width * (chunks - 1 - j))
            out[j::chunks] = ((v >> shift) & mask).astype(np.uint8)
        return out
    per = symbol_width // alpha
    n = v.size // per
    grid = v[: n * per].reshape(n, per)
    acc = np.zeros(n, dtype=np.uint64)
    for j in range(per):
        acc |= grid[:, j] << np.uint64(symbol_width - (j + 1) * alpha)
    return acc.astype(np.uint8)


def count_symbols(symbols, alphabet_size):
    """Occurrence counts of each symbol value in ``[0, alphabet_size)``."""
    s = np.ascontiguousarray(symbols, dtype=np.uint8)
    if s.size and int(s.max()) >= alphabet_size:
        raise ValueError(
            f"symbol {int(s.max())} out of range for alphabet {alphabet_size}"
        )
    return np.bincount(s, minlength=alphabet_size).astype(np.int64, copy=False)


def joint_counts16(x, y):
    """256-cell joint histogram of two aligned nibble streams."""
    xs = np.ascontiguousarray(x, dtype=np.uint8)
    ys = np.ascontiguousarray(y, dtype=np.uint8)
    if xs.size != ys.size:
        raise ValueError("length mismatch")
    if xs.size and (int(xs.max()) >= 16 or int(ys.max()) >= 16):
        raise ValueError("nibble value out of range")
    joint = xs.astype(np.int64) * 16 + ys
    return np.bincount(joint, minlength=256).astype(np.int64, copy=False)


def sliding_joint_counts16(x, y, window_len, step):
    """Joint nibble histograms over aligned sliding windows.

    One 256-cell histogram per window start ``0, step, 2*step, ...``
    while a full window fits; shape ``(n_windows, 256)``.
    """
    if window_len < 1 or step < 1:
        raise ValueError("window_len and step must be >= 1")
    xs = np.ascontiguousarray(x, dtype=np.uint8)
    ys = np.ascontiguousarray(y, dtype=np.uint8)
    if xs.size != ys.size:
        raise ValueError("length mismatch")
    if xs.size and (int(xs.max()) >= 16 or int(ys.max()) >= 16):
        raise ValueError("nibble value out of range")
    joint = xs.astype(np.int64) * 16 + ys
    starts = range(0, joint.size - window_len + 1, step)
    out = np.empty((len(starts), 256), dtype=np.int64)
    for k, s in enumerate(starts):
        out[k] = np.bincount(joint[s : s + window_len], minlength=256)
    return out
