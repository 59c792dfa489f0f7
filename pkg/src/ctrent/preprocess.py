"""Preprocessing transforms: successive differences, XOR-folding, and
symbol grouping.

The chain for one counter is: difference-encode the samples into
sign-magnitude words, XOR-fold each word down to ``alpha`` bits, then
pack the folded values MSB-first into fixed-width symbols (bytes here;
nibble splitting happens downstream for the dependence analysis).

Conventions that downstream numbers depend on:

* differences are computed exactly; magnitudes are stored modulo 2**63
  (the top bit holds the sign) and reductions are counted as overflow
  diagnostics;
* negative zero is normalized to the all-zero word so each delta has
  one encoding;
* packing is MSB-first (first folded value lands in the most
  significant bits) and trailing partial symbols are discarded rather
  than zero-padded.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataWarning
from .trace import U64_MAX, CounterTrace

FOLD_ALPHAS = (1, 2, 4, 8, 16, 32, 64)
PACK_ALPHAS = (1, 2, 4, 8, 16, 32)
SYMBOL_WIDTHS = (4, 8)

_SIGN = np.uint64(1) << np.uint64(63)
_MAG = _SIGN - np.uint64(1)


@dataclass(frozen=True, eq=False)
class DeltaSequence:
    """Sign-magnitude encoded successive differences of one trace."""

    deltas: np.ndarray
    overflow_count: int = 0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.deltas, dtype=np.uint64).view()
        arr.setflags(write=False)
        object.__setattr__(self, "deltas", arr)

    def __len__(self) -> int:
        return int(self.deltas.size)

    def decode(self) -> np.ndarray:
        """Decode back to signed integers (int64; magnitudes fit 63 bits)."""
        mag = (self.deltas & _MAG).astype(np.int64)
        return np.where((self.deltas & _SIGN) != 0, -mag, mag)


@dataclass(frozen=True, eq=False)
class SymbolStream:
    """A packed stream of fixed-width symbols derived from folded deltas.

    ``alpha`` records the fold width the stream was produced with;
    ``symbol_width`` is 8 for byte streams and 4 for nibble streams.
    """

    alpha: int
    symbol_width: int
    symbols: np.ndarray

    def __post_init__(self):
        if self.alpha not in PACK_ALPHAS:
            raise ValueError(f"alpha must be one of {PACK_ALPHAS}, got {self.alpha}")
        if self.symbol_width not in SYMBOL_WIDTHS:
            raise ValueError(
                f"symbol_width must be one of {SYMBOL_WIDTHS}, got {self.symbol_width}"
            )
        arr = np.ascontiguousarray(self.symbols, dtype=np.uint8).view()
        arr.setflags(write=False)
        if arr.size and int(arr.max()) >= (1 << self.symbol_width):
            raise ValueError(
                f"symbol values must be < 2**{self.symbol_width}"
            )
        object.__setattr__(self, "symbols", arr)

    def __len__(self) -> int:
        return int(self.symbols.size)


def delta(trace: CounterTrace) -> DeltaSequence:
    """Sign-magnitude encoded differences of consecutive samples.

    Output ``i`` encodes ``samples[i+1] - samples[i]``; output length is
    input length minus one. Magnitudes at or above 2**63 are reduced
    modulo 2**63 and reported via a :class:`DataWarning` plus the
    sequence's ``overflow_count``.
    """
    if len(trace) < 2:
        raise ValueError(
            f"counter '{trace.counter_id}': need at least 2 samples to "
            f"difference, got {len(trace)}"
        )
    words, overflows = kernels.delta_signmag(trace.samples)
    if overflows:
        warnings.warn(
            f"counter '{trace.counter_id}': {overflows} difference "
            "magnitude(s) exceeded 63 bits and were reduced modulo 2**63",
            DataWarning,
            stacklevel=2,
        )
    return DeltaSequence(words, overflows)


def fold(value: int, alpha: int) -> int:
    """XOR together the ``alpha``-bit fields of a 64-bit value.

    ``alpha`` must divide 64. ``fold(v, 64)`` is the identity; the fold
    is linear: ``fold(x ^ y, a) == fold(x, a) ^ fold(y, a)``.
    """
    if alpha not in FOLD_ALPHAS:
        raise ValueError(
            f"alpha does not divide 64: got {alpha} (valid: {FOLD_ALPHAS})"
        )
    if not 0 <= value <= U64_MAX:
        raise ValueError("value must be an unsigned 64-bit integer")
    acc = 0
    for shift in range(0, 64, alpha):
        acc ^= value >> shift
    return acc & ((1 << alpha) - 1)


def fold_stream(words, alpha: int) -> np.ndarray:
    """Vectorized :func:`fold` over an array of 64-bit words."""
    if alpha not in FOLD_ALPHAS:
        raise ValueError(
            f"alpha does not divide 64: got {alpha} (valid: {FOLD_ALPHAS})"
        )
    return kernels.fold_words(np.ascontiguousarray(words, dtype=np.uint64), alpha)


def pack(folded, alpha: int, symbol_width: int = 8) -> SymbolStream:
    """Pack folded ``alpha``-bit values into a fixed-width symbol stream.

    MSB-first: the first value fills the most significant bits of each
    symbol. For ``alpha`` larger than the symbol width each value is
    split into symbol-width chunks, most significant chunk first. A
    trailing partial symbol is discarded.
    """
    if alpha not in PACK_ALPHAS or symbol_width not in SYMBOL_WIDTHS:
        raise ValueError(
            f"invalid width combination: alpha={alpha}, "
            f"symbol_width={symbol_width}"
        )
    arr = np.ascontiguousarray(folded, dtype=np.uint64)
    if arr.size and alpha < 64 and int(arr.max()) >> alpha:
        raise ValueError(f"folded values must fit in {alpha} bits")
    return SymbolStream(alpha, symbol_width, kernels.pack_symbols(arr, alpha, symbol_width))


def unpack(stream: SymbolStream) -> np.ndarray:
    """Inverse of :func:`pack` (minus any discarded tail)."""
    a, sw = stream.alpha, stream.symbol_width
    s = stream.symbols.astype(np.uint64)
    if a >= sw:
        chunks = a // sw
        n = s.size // chunks
        grid = s[: n * chunks].reshape(n, chunks)
        acc = np.zeros(n, dtype=np.uint64)
        for j in range(chunks):
            acc |= grid[:, j] << np.uint64(sw * (chunks - 1 - j))
        return acc
    per = sw // a
    out = np.empty(s.size * per, dtype=np.uint64)
    mask = np.uint64((1 << a) - 1)
    for j in range(per):
        out[j::per] = (s >> np.uint64(sw - (j + 1) * a)) & mask
    return out


def to_nibbles(stream: SymbolStream) -> SymbolStream:
    """Split a byte stream into nibbles, high nibble first."""
    if stream.symbol_width != 8:
        raise ValueError("to_nibbles expects a byte stream (symbol_width=8)")
    b = stream.symbols
    out = np.empty(b.size * 2, dtype=np.uint8)
    out[0::2] = b >> 4
    out[1::2] = b & 0x0F
    return SymbolStream(stream.alpha, 4, out)


def preprocess_counter(
    trace: CounterTrace, alpha: int, symbol_width: int = 8
) -> SymbolStream:
    """Full chain for one counter: difference, fold to ``alpha`` bits, pack."""
    d = delta(trace)
    folded = fold_stream(d.deltas, alpha)
    return pack(folded, alpha, symbol_width)
