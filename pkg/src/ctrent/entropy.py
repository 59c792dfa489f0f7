"""Maximum-likelihood entropy estimation over symbol streams.

Shannon entropy and min-entropy are computed from exact occurrence
counts with probabilities taken as observed frequencies (no bias
correction; the raw counts are kept so corrected estimators could be
layered on later). Term accumulation uses ``math.fsum``, so results are
reproducible to the last bit and independent of symbol order.

A counter's assessment folds its delta stream at several widths,
measures byte-level entropy for each, and takes the minimum across the
widths 1, 2, 4 and 8 as the robust figure; per-bit values divide the
byte-level result by 8.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DataWarning
from .preprocess import SymbolStream, delta, fold_stream, pack
from .trace import CounterTrace

ROBUST_ALPHAS = (1, 2, 4, 8)


@dataclass(frozen=True, eq=False)
class SymbolDistribution:
    """Occurrence counts of symbols over a fixed alphabet."""

    alphabet_size: int
    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64).view()
        counts.setflags(write=False)
        if counts.size != self.alphabet_size:
            raise ValueError("counts must have one entry per alphabet symbol")
        if counts.size and int(counts.min()) < 0:
            raise ValueError("counts must be nonnegative")
        if int(counts.sum()) != self.total:
            raise ValueError("total must equal the sum of counts")
        if self.total <= 0:
            raise ValueError("distribution must contain at least one observation")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_counts(
        cls,
        counts: Mapping[int, int] | Sequence[int],
        alphabet_size: int | None = None,
    ) -> "SymbolDistribution":
        if isinstance(counts, Mapping):
            if alphabet_size is None:
                alphabet_size = max(counts) + 1 if counts else 0
            arr = np.zeros(alphabet_size, dtype=np.int64)
            for sym, c in counts.items():
                if not 0 <= sym < alphabet_size:
                    raise ValueError(
                        f"symbol {sym} out of range for alphabet {alphabet_size}"
                    )
                arr[sym] = c
        else:
            arr = np.asarray(counts, dtype=np.int64)
            if alphabet_size is None:
                alphabet_size = arr.size
            elif arr.size != alphabet_size:
                arr = np.pad(arr, (0, alphabet_size - arr.size))
        return cls(alphabet_size, arr, int(arr.sum()))


def estimate_distribution(stream: SymbolStream) -> SymbolDistribution:
    """Exact occurrence counts of a symbol stream."""
    if len(stream) == 0:
        raise ValueError("cannot estimate a distribution from an empty stream")
    alphabet = 1 << stream.symbol_width
    counts = kernels.count_symbols(stream.symbols, alphabet)
    return SymbolDistribution(alphabet, counts, len(stream))


def entropy_bits(counts, total: int) -> float:
    """Shannon entropy in bits of the frequency estimates ``count/total``.

    Zero counts contribute nothing (the 0*lg 0 == 0 convention).
    """
    c = np.asarray(counts, dtype=np.float64)
    nz = c[c > 0.0]
    if total <= 0 or nz.size == 0:
        raise ValueError("distribution has no observations")
    p = nz / total
    h = -math.fsum(p * np.log2(p))
    return 0.0 if h == 0.0 else h


def shannon_entropy(dist: SymbolDistribution) -> float:
    """Shannon entropy of the estimated distribution, in bits per symbol."""
    return entropy_bits(dist.counts, dist.total)


def min_entropy(dist: SymbolDistribution) -> float:
    """Min-entropy (negative lg of the largest estimated probability)."""
    m = int(dist.counts.max())
    h = -math.log2(m / dist.total)
    return 0.0 if h == 0.0 else h


@dataclass(frozen=True)
class AlphaEntropy:
    """Byte-level entropy figures for one fold width."""

    h1_bits: float
    hinf_bits: float


@dataclass(eq=False)
class EntropyAssessment:
    """Per-fold-width and robust entropy figures for one counter."""

    counter_id: str
    per_alpha: dict[int, AlphaEntropy]
    robust_h1_bits: float
    robust_hinf_bits: float
    h1_per_bit: float
    hinf_per_bit: float
    combined_per_bit: float


def assess_counter(
    trace: CounterTrace, alphas: Iterable[int] = ROBUST_ALPHAS
) -> EntropyAssessment:
    """Assess one counter across fold widths.

    Builds the byte stream for every requested ``alpha``, measures
    byte-level Shannon and min-entropy, then takes the robust minimum
    over the widths 1, 2, 4, 8 (only those; wider folds may be computed
    for diagnostics but never enter the minimum) and scales per bit by
    dividing by 8.
    """
    alphas = tuple(sorted(set(alphas)))
    if not alphas:
        raise ValueError("alphas must not be empty")
    d = delta(trace)
    per: dict[int, AlphaEntropy] = {}
    for a in alphas:
        stream = pack(fold_stream(d.deltas, a), a, 8)
        if len(stream) == 0:
            raise ValueError(
                f"counter '{trace.counter_id}': trace too short to produce "
                f"a byte at alpha={a}"
            )
        dist = estimate_distribution(stream)
        per[a] = AlphaEntropy(shannon_entropy(dist), min_entropy(dist))
    robust = [a for a in ROBUST_ALPHAS if a in per]
    if not robust:
        raise ValueError(
            f"no robust fold width computed; need at least one of {ROBUST_ALPHAS}"
        )
    if len(robust) < len(ROBUST_ALPHAS):
        warnings.warn(
            f"counter '{trace.counter_id}': robust minimum taken over "
            f"alphas {tuple(robust)} only",
            DataWarning,
            stacklevel=2,
        )
    robust_h1 = min(per[a].h1_bits for a in robust)
    robust_hinf = min(per[a].hinf_bits for a in robust)
    h1_per_bit = robust_h1 / 8.0
    hinf_per_bit = robust_hinf / 8.0
    return EntropyAssessment(
        counter_id=trace.counter_id,
        per_alpha=per,
        robust_h1_bits=robust_h1,
        robust_hinf_bits=robust_hinf,
        h1_per_bit=h1_per_bit,
        hinf_per_bit=hinf_per_bit,
        combined_per_bit=h1_per_bit + hinf_per_bit,
    )
