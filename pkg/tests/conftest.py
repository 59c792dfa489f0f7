"""Shared helpers for building small synthetic corpora in tests."""

import numpy as np
import pytest

from ctrent.synth import SourceSpec
from ctrent.trace import CounterTrace


def make_trace(values, counter_id="c", interval_ms=20):
    return CounterTrace(counter_id, np.asarray(values, dtype=np.uint64), interval_ms)


def uniform_spec(counter_id, length, seed=0, bits=64):
    return SourceSpec(counter_id, "uniform64", length, {"seed": seed, "bits": bits})


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
