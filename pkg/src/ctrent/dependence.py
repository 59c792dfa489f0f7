"""Pairwise dependence analysis via discrete mutual information, plus
cross-run robustness over a sliding window.

Mutual information is estimated on nibble streams so the 256-cell joint
histogram stays well populated even for modest sample counts; raw
values lie in [0, 4] bits and are reported normalized to [0, 1]
(divided by the 4-bit symbol width). Counters whose pairwise normalized
MI reaches the independence threshold are grouped; one representative
per group (the member with the best combined entropy metric) survives
selection.

Robustness compares three captures of the same counter: windowed MI is
computed for each of the three run pairs, and a counter is classified
``upper`` when every pair's window-averaged value sits at or above the
robustness threshold (the neighborhood where independent random
baselines land due to estimator bias), ``lower`` otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .entropy import entropy_bits
from .errors import DataWarning
from .preprocess import SymbolStream

MI_SYMBOL_WIDTH = 4
MI_MAX_BITS = 4.0
DEFAULT_MI_THRESHOLD = 0.10
DEFAULT_WINDOW_LEN = 1400
DEFAULT_WINDOW_STEP = 100
DEFAULT_ROBUST_THRESHOLD = 0.021

# Warn when a stream underfills the joint histogram by this coverage factor.
_MIN_COVERAGE = 10 * 256
# A window-averaged cross-run MI this high means the runs are near-copies.
_DEGENERATE_MEAN = 0.5


def _check_nibble_stream(stream: SymbolStream, name: str) -> None:
    if stream.symbol_width != MI_SYMBOL_WIDTH:
        raise ValueError(
            f"{name} must be a nibble stream (symbol_width={MI_SYMBOL_WIDTH}), "
            f"got symbol_width={stream.symbol_width}"
        )


def _mi_bits_from_counts(cx, cy, cxy, n: int) -> float:
    mi = entropy_bits(cx, n) + entropy_bits(cy, n) - entropy_bits(cxy, n)
    # The plug-in estimate is nonnegative; only fp cancellation goes below 0.
    return mi if mi > 0.0 else 0.0


def mutual_information(x: SymbolStream, y: SymbolStream) -> float:
    """Mutual information of two aligned nibble streams, in bits.

    Computed as H(X) + H(Y) - H(X,Y) over the 256-cell joint histogram;
    the result lies in [0, min(H(X), H(Y))] and never exceeds 4 bits.
    Tiny negative values from floating-point cancellation clamp to 0.
    """
    _check_nibble_stream(x, "x")
    _check_nibble_stream(y, "y")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 1:
        raise ValueError("streams must be non-empty")
    if n < _MIN_COVERAGE:
        warnings.warn(
            f"stream length {n} underfills the 256-cell joint histogram "
            f"(want >= {_MIN_COVERAGE}); MI estimates will be biased high",
            DataWarning,
            stacklevel=2,
        )
    cx = kernels.count_symbols(x.symbols, 16)
    cy = kernels.count_symbols(y.symbols, 16)
    cxy = kernels.joint_counts16(x.symbols, y.symbols)
    return _mi_bits_from_counts(cx, cy, cxy, n)


@dataclass(eq=False)
class MiMatrix:
    """Symmetric matrix of normalized pairwise mutual information.

    Diagonal entries hold each counter's nibble-stream Shannon entropy
    divided by 4 (the self-information ceiling); all entries lie in
    [0, 1]. ``clamp_count`` tallies negative estimates clamped to zero.
    """

    counter_ids: list[str]
    values: np.ndarray
    clamp_count: int = 0

    def __post_init__(self):
        k = len(self.counter_ids)
        if self.values.shape != (k, k):
            raise ValueError("values must be square over the counter ids")
        self._index = {cid: i for i, cid in enumerate(self.counter_ids)}

    def value(self, a: str, b: str) -> float:
        return float(self.values[self._index[a], self._index[b]])


def build_mi_matrix(streams: Mapping[str, SymbolStream]) -> MiMatrix:
    """Normalized MI between all pairs of equally long nibble streams."""
    ids = list(streams)
    if not ids:
        raise ValueError("no streams given")
    lengths = {len(streams[cid]) for cid in ids}
    if len(lengths) > 1:
        raise ValueError("all streams must have equal length")
    n = lengths.pop()
    if n < 1:
        raise ValueError("streams must be non-empty")
    for cid in ids:
        _check_nibble_stream(streams[cid], f"stream '{cid}'")
    if n < _MIN_COVERAGE:
        warnings.warn(
            f"stream length {n} underfills the 256-cell joint histogram "
            f"(want >= {_MIN_COVERAGE}); MI estimates will be biased high",
            DataWarning,
            stacklevel=2,
        )
    k = len(ids)
    symbols = [streams[cid].symbols for cid in ids]
    marginal = [kernels.count_symbols(s, 16) for s in symbols]
    h = [entropy_bits(c, n) for c in marginal]
    values = np.zeros((k, k), dtype=np.float64)
    clamps = 0
    for i in range(k):
        values[i, i] = h[i] / MI_MAX_BITS
        for j in range(i + 1, k):
            cxy = kernels.joint_counts16(symbols[i], symbols[j])
            mi = h[i] + h[j] - entropy_bits(cxy, n)
            if mi < 0.0:
                clamps += 1
                mi = 0.0
            values[i, j] = values[j, i] = mi / MI_MAX_BITS
    return MiMatrix(ids, values, clamps)


@dataclass(eq=False)
class DependencyReport:
    """Partition of counters into dependency groups plus representatives.

    ``groups[i]`` and ``representatives[i]`` line up; singleton groups
    are their own representative. Non-singleton representatives carry
    the maximal combined entropy metric in their group (ties break
    lexicographically by counter id).
    """

    matrix: MiMatrix
    threshold: float
    groups: list[list[str]]
    representatives: list[str]

    def selected_ids(self) -> list[str]:
        """Representatives (singletons included), in matrix order."""
        keep = set(self.representatives)
        return [cid for cid in self.matrix.counter_ids if cid in keep]


def dependency_groups(
    matrix: MiMatrix,
    threshold: float = DEFAULT_MI_THRESHOLD,
    metrics: Mapping[str, float] | None = None,
) -> DependencyReport:
    """Group counters by over-threshold pairwise MI.

    Groups are the connected components of the graph with an edge where
    normalized MI is at or above ``threshold``. ``metrics`` (combined
    per-bit entropy per counter) picks each non-singleton group's
    representative.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    metrics = dict(metrics or {})
    ids = matrix.counter_ids
    k = len(ids)
    parent = list(range(k))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(k):
        for j in range(i + 1, k):
            if matrix.values[i, j] >= threshold:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[rb] = ra

    members: dict[int, list[str]] = {}
    for i in range(k):
        members.setdefault(find(i), []).append(ids[i])
    groups = [members[r] for r in sorted(members, key=lambda r: ids.index(members[r][0]))]

    representatives: list[str] = []
    for group in groups:
        if len(group) == 1:
            representatives.append(group[0])
            continue
        missing = [cid for cid in group if cid not in metrics]
        if missing:
            raise ValueError(
                "missing combined metric for grouped counter(s): "
                + ", ".join(sorted(missing))
            )
        representatives.append(min(group, key=lambda cid: (-metrics[cid], cid)))
    return DependencyReport(matrix, threshold, groups, representatives)


def sliding_mi(
    x: SymbolStream,
    y: SymbolStream,
    window_len: int = DEFAULT_WINDOW_LEN,
    step: int = DEFAULT_WINDOW_STEP,
) -> np.ndarray:
    """Normalized MI of aligned windows at starts 0, step, 2*step, ...

    Only full windows are evaluated; a stream exactly one window long
    yields a single value.
    """
    _check_nibble_stream(x, "x")
    _check_nibble_stream(y, "y")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if window_len < 1 or step < 1:
        raise ValueError("window_len and step must be >= 1")
    if len(x) < window_len:
        raise ValueError(
            f"window of {window_len} nibbles exceeds stream length {len(x)}"
        )
    if window_len < 256:
        warnings.warn(
            f"window of {window_len} nibbles cannot cover the 256-cell "
            "joint histogram; window MI will be strongly biased",
            DataWarning,
            stacklevel=2,
        )
    joint = kernels.sliding_joint_counts16(x.symbols, y.symbols, window_len, step)
    out = np.empty(joint.shape[0], dtype=np.float64)
    for w in range(joint.shape[0]):
        grid = joint[w].reshape(16, 16)
        mi = _mi_bits_from_counts(
            grid.sum(axis=1), grid.sum(axis=0), joint[w], window_len
        )
        out[w] = mi / MI_MAX_BITS
    return out


@dataclass(eq=False)
class RobustnessSeries:
    """Cross-run windowed MI statistics for one counter.

    ``per_pair_series`` holds the normalized window series for run pairs
    (0,1), (0,2), (1,2); the min/avg/max series are pointwise across the
    pairs. ``classification`` is ``"upper"`` when every pair's mean sits
    at or above the threshold, else ``"lower"``.
    """

    counter_id: str
    window_len: int
    step: int
    threshold: float
    per_pair_series: list[np.ndarray]
    min_series: np.ndarray
    avg_series: np.ndarray
    max_series: np.ndarray
    pair_means: list[float]
    classification: str
    degenerate: bool = field(default=False)


_RUN_PAIRS = ((0, 1), (0, 2), (1, 2))


def classify_robustness(
    runs: Sequence[SymbolStream],
    counter_id: str = "",
    window_len: int = DEFAULT_WINDOW_LEN,
    step: int = DEFAULT_WINDOW_STEP,
    threshold: float = DEFAULT_ROBUST_THRESHOLD,
) -> RobustnessSeries:
    """Classify one counter's robustness from three aligned captures."""
    runs = list(runs)
    if len(runs) != 3:
        raise ValueError(f"exactly 3 runs required, got {len(runs)}")
    if len({len(r) for r in runs}) > 1:
        raise ValueError("all runs must have equal length")
    series = [
        sliding_mi(runs[i], runs[j], window_len=window_len, step=step)
        for i, j in _RUN_PAIRS
    ]
    pair_means = [float(np.mean(s)) for s in series]
    classification = "upper" if all(m >= threshold for m in pair_means) else "lower"
    degenerate = any(m >= _DEGENERATE_MEAN for m in pair_means)
    if degenerate:
        warnings.warn(
            f"counter '{counter_id}': cross-run MI near the self-information "
            "ceiling; the runs look like copies of each other",
            DataWarning,
            stacklevel=2,
        )
    stacked = np.vstack(series)
    return RobustnessSeries(
        counter_id=counter_id,
        window_len=window_len,
        step=step,
        threshold=threshold,
        per_pair_series=series,
        min_series=stacked.min(axis=0),
        avg_series=stacked.mean(axis=0),
        max_series=stacked.max(axis=0),
        pair_means=pair_means,
        classification=classification,
        degenerate=degenerate,
    )
