import math

import numpy as np
import pytest

from ctrent.entropy import (
    ROBUST_ALPHAS,
    SymbolDistribution,
    assess_counter,
    entropy_bits,
    estimate_distribution,
    min_entropy,
    shannon_entropy,
)
from ctrent.preprocess import SymbolStream
from ctrent.synth import SourceSpec, generate

from conftest import make_trace


def binary_entropy_oracle(count_a, count_b):
    """Closed-form two-point entropy at 50 significant digits."""
    import mpmath as mp

    with mp.workdps(50):
        total = count_a + count_b
        pa, pb = mp.mpf(count_a) / total, mp.mpf(count_b) / total
        return float(-(pa * mp.log(pa, 2) + pb * mp.log(pb, 2)))


class TestDistribution:
    def test_estimate_counts(self):
        stream = SymbolStream(1, 4, np.array([0, 0, 1, 1], dtype=np.uint8))
        dist = estimate_distribution(stream)
        assert dist.total == 4
        assert dist.counts[0] == 2 and dist.counts[1] == 2
        assert dist.alphabet_size == 16

    def test_empty_stream(self):
        stream = SymbolStream(1, 8, np.empty(0, dtype=np.uint8))
        with pytest.raises(ValueError, match="empty stream"):
            estimate_distribution(stream)

    def test_total_matches_length(self):
        stream = SymbolStream(8, 8, np.arange(256, dtype=np.uint8).repeat(4))
        assert estimate_distribution(stream).total == 1024

    def test_single_symbol(self):
        stream = SymbolStream(1, 8, np.full(10, 3, dtype=np.uint8))
        dist = estimate_distribution(stream)
        assert int(np.count_nonzero(dist.counts)) == 1

    def test_from_counts_mapping(self):
        dist = SymbolDistribution.from_counts({0: 1, 1: 127}, alphabet_size=2)
        assert dist.total == 128

    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="total"):
            SymbolDistribution(2, np.array([1, 1], dtype=np.int64), 3)
        with pytest.raises(ValueError, match="nonnegative"):
            SymbolDistribution(2, np.array([-1, 3], dtype=np.int64), 2)


class TestShannon:
    def test_fair_coin_exact(self):
        assert shannon_entropy(SymbolDistribution.from_counts([1, 1])) == 1.0

    def test_two_point_closed_forms(self):
        # The independent high-precision oracle fixes the digits; the
        # coarse 2-decimal figures are the documented reference points.
        h = shannon_entropy(SymbolDistribution.from_counts([1, 127]))
        assert h == pytest.approx(binary_entropy_oracle(1, 127), abs=1e-12)
        assert h == pytest.approx(0.06591441234324169, abs=1e-9)
        assert round(h, 2) == 0.07

        h = shannon_entropy(SymbolDistribution.from_counts([1, 15]))
        assert h == pytest.approx(binary_entropy_oracle(1, 15), abs=1e-12)
        assert h == pytest.approx(0.3372900666170139, abs=1e-9)
        assert round(h, 2) == 0.34

    def test_single_symbol_zero(self):
        h = shannon_entropy(SymbolDistribution.from_counts([10]))
        assert h == 0.0 and not math.copysign(1, h) < 0

    def test_uniform_maximizes(self):
        assert shannon_entropy(SymbolDistribution.from_counts([3] * 256)) == 8.0

    def test_bounded_by_alphabet(self, rng):
        for _ in range(200):
            counts = rng.integers(0, 50, size=16)
            if counts.sum() == 0:
                continue
            dist = SymbolDistribution.from_counts(counts.tolist())
            assert 0.0 <= shannon_entropy(dist) <= 4.0 + 1e-12


class TestMinEntropy:
    def test_uniform_256(self):
        assert min_entropy(SymbolDistribution.from_counts([1] * 256)) == 8.0

    def test_half_quarter_quarter(self):
        dist = SymbolDistribution.from_counts([2, 1, 1])
        assert min_entropy(dist) == 1.0
        assert shannon_entropy(dist) == 1.5

    def test_single_symbol_zero(self):
        assert min_entropy(SymbolDistribution.from_counts([5])) == 0.0

    def test_never_exceeds_shannon(self, rng):
        for _ in range(500):
            counts = rng.integers(0, 100, size=rng.integers(2, 32))
            if counts.sum() == 0:
                continue
            dist = SymbolDistribution.from_counts(counts.tolist())
            assert min_entropy(dist) <= shannon_entropy(dist) + 1e-12

    def test_permutation_invariance(self, rng):
        counts = rng.integers(0, 100, size=64)
        counts[0] += 1
        base = SymbolDistribution.from_counts(counts.tolist())
        perm = SymbolDistribution.from_counts(counts[rng.permutation(64)].tolist())
        assert shannon_entropy(base) == shannon_entropy(perm)
        assert min_entropy(base) == min_entropy(perm)

    def test_smoothing_moves_toward_uniform(self):
        counts = np.array([200, 17, 3, 1] + [0] * 12, dtype=np.int64)
        h1_prev, hinf_prev = -1.0, -1.0
        for k in (0, 1, 2, 4, 8, 16, 64):
            dist = SymbolDistribution.from_counts((counts + k).tolist())
            h1, hinf = shannon_entropy(dist), min_entropy(dist)
            assert h1 >= h1_prev and hinf >= hinf_prev
            h1_prev, hinf_prev = h1, hinf
        assert h1_prev <= 4.0


class TestAssess:
    def test_constant_counter_all_zero(self):
        a = assess_counter(make_trace([7] * 100))
        assert a.robust_h1_bits == 0.0
        assert a.robust_hinf_bits == 0.0
        assert a.combined_per_bit == 0.0
        assert set(a.per_alpha) == set(ROBUST_ALPHAS)

    def test_deterministic(self):
        trace = generate(SourceSpec("u", "uniform64", 5000, {"seed": 42}))
        a1, a2 = assess_counter(trace), assess_counter(trace)
        assert a1.per_alpha == a2.per_alpha
        assert a1.combined_per_bit == a2.combined_per_bit

    def test_uniform_counter_quality(self):
        trace = generate(SourceSpec("u", "uniform64", 100_001, {"seed": 7}))
        a = assess_counter(trace)
        assert a.h1_per_bit >= 0.995
        assert a.hinf_per_bit >= 0.90
        assert a.hinf_per_bit <= a.h1_per_bit <= 1.0

    def test_single_random_bit_shape(self):
        # Deltas of a fair-bit counter take values {0, +1, -1} with
        # probabilities {1/2, 1/4, 1/4}; at alpha=8 the byte stream maps
        # those to three symbols, so H1 converges to 1.5 bits and the
        # robust minimum lands there.
        trace = generate(SourceSpec("b", "single_random_bit", 100_001, {"seed": 3}))
        a = assess_counter(trace)
        assert a.per_alpha[8].h1_bits == pytest.approx(1.5, abs=0.02)
        for alpha in ROBUST_ALPHAS:
            assert a.per_alpha[alpha].h1_bits < 8.0
        assert a.robust_h1_bits == min(a.per_alpha[x].h1_bits for x in ROBUST_ALPHAS)
        assert a.robust_hinf_bits == min(a.per_alpha[x].hinf_bits for x in ROBUST_ALPHAS)

    def test_extra_alphas_do_not_enter_robust_min(self):
        trace = generate(SourceSpec("u", "uniform64", 20_001, {"seed": 9}))
        base = assess_counter(trace)
        extended = assess_counter(trace, alphas=(1, 2, 4, 8, 16, 32))
        assert extended.robust_h1_bits == base.robust_h1_bits
        assert extended.robust_hinf_bits == base.robust_hinf_bits
        assert 16 in extended.per_alpha and 32 in extended.per_alpha

    def test_too_short(self):
        with pytest.raises(ValueError, match="too short"):
            assess_counter(make_trace([1, 2, 3]))

    def test_per_bit_scaling(self):
        trace = generate(SourceSpec("u", "uniform64", 10_001, {"seed": 5}))
        a = assess_counter(trace)
        assert a.h1_per_bit == a.robust_h1_bits / 8.0
        assert a.hinf_per_bit == a.robust_hinf_bits / 8.0
        assert a.combined_per_bit == a.h1_per_bit + a.hinf_per_bit


class TestEntropyBits:
    def test_matches_direct_formula(self, rng):
        for _ in range(100):
            counts = rng.integers(0, 30, size=16)
            total = int(counts.sum())
            if total == 0:
                continue
            expected = -sum(
                (c / total) * math.log2(c / total) for c in counts if c > 0
            )
            assert entropy_bits(counts, total) == pytest.approx(expected, abs=1e-12)
