"""End-to-end assessment pipeline: staged constant elimination, ranking
by the combined per-bit metric, representative selection, and the
entropy throughput budget.

Elimination stages (applied in order, each to the previous survivors):

* ``short_constant``  - constant in the short calibration run
* ``long_constant``   - constant in the long run (catches counters that
  moved once during the short capture and then froze)
* ``delta_constant``  - constant difference sequence (steady ramps)
* ``fold_constant``   - constant folded byte stream at any fold width

"Constant" means literally all values equal; there is no near-constant
tolerance. Survivors are the green counters that proceed to assessment.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .dependence import DependencyReport
from .entropy import EntropyAssessment
from .errors import DataWarning
from .preprocess import PACK_ALPHAS, fold_stream, pack
from .trace import TraceRun

STAGE_INPUT = "input"
STAGE_SHORT = "short_constant"
STAGE_LONG = "long_constant"
STAGE_DELTA = "delta_constant"
STAGE_FOLD = "fold_constant"

BUDGET_ALPHAS = (1, 2, 4, 8)
ROUNDS_PER_BYTE = 8


@dataclass(eq=False)
class EliminationReport:
    """Outcome of the staged constant elimination.

    ``stage_counts`` is the surviving-count ladder (input first); every
    input counter is either a survivor or listed under exactly one
    stage of ``eliminated``.
    """

    stage_counts: list[tuple[str, int]]
    eliminated: dict[str, list[str]]
    survivors: list[str]


def _is_constant(values: np.ndarray) -> bool:
    return values.size == 0 or bool(np.all(values == values[0]))


def eliminate(
    run_short: TraceRun,
    run_long: TraceRun,
    alphas: Iterable[int] = BUDGET_ALPHAS,
) -> EliminationReport:
    """Drop constant counters stage by stage; survivors are green.

    Both runs must cover the same counter set. The short run is the
    cheap first pass; the long run feeds the delta and fold stages.
    """
    alphas = tuple(sorted(set(alphas)))
    for a in alphas:
        if a not in PACK_ALPHAS:
            raise ValueError(f"invalid fold width {a} (valid: {PACK_ALPHAS})")
    order = run_short.counter_ids
    if set(order) != set(run_long.counter_ids):
        only_short = sorted(set(order) - set(run_long.counter_ids))
        only_long = sorted(set(run_long.counter_ids) - set(order))
        raise ValueError(
            "runs cover different counter sets"
            + (f"; only in short: {', '.join(only_short)}" if only_short else "")
            + (f"; only in long: {', '.join(only_long)}" if only_long else "")
        )

    stage_counts = [(STAGE_INPUT, len(order))]
    eliminated: dict[str, list[str]] = {}
    survivors = list(order)

    def apply_stage(stage: str, dropped: list[str]) -> None:
        nonlocal survivors
        eliminated[stage] = dropped
        gone = set(dropped)
        survivors = [cid for cid in survivors if cid not in gone]
        stage_counts.append((stage, len(survivors)))

    apply_stage(
        STAGE_SHORT,
        [c for c in survivors if _is_constant(run_short.get(c).samples)],
    )
    apply_stage(
        STAGE_LONG,
        [c for c in survivors if _is_constant(run_long.get(c).samples)],
    )

    deltas = {
        c: kernels.delta_signmag(run_long.get(c).samples)[0] for c in survivors
    }
    apply_stage(STAGE_DELTA, [c for c in survivors if _is_constant(deltas[c])])

    dropped_fold = []
    for c in survivors:
        for a in alphas:
            stream = pack(fold_stream(deltas[c], a), a, 8)
            if _is_constant(stream.symbols):
                dropped_fold.append(c)
                break
    apply_stage(STAGE_FOLD, dropped_fold)

    return EliminationReport(stage_counts, eliminated, survivors)


@dataclass(frozen=True)
class RankEntry:
    rank: int
    counter_id: str
    h1_per_bit: float
    hinf_per_bit: float
    combined_per_bit: float


@dataclass(eq=False)
class RankingReport:
    """Top-k counters by combined per-bit entropy, descending."""

    entries: list[RankEntry]
    k: int


def rank(assessments: Sequence[EntropyAssessment], k: int) -> RankingReport:
    """Order assessments by combined per-bit metric and keep the top k.

    Ties break lexicographically by counter id; a k beyond the list
    length clamps with a diagnostic.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(assessments):
        warnings.warn(
            f"requested top {k} but only {len(assessments)} assessments "
            "are available",
            DataWarning,
            stacklevel=2,
        )
        k = len(assessments)
    ordered = sorted(assessments, key=lambda a: (-a.combined_per_bit, a.counter_id))
    entries = [
        RankEntry(i + 1, a.counter_id, a.h1_per_bit, a.hinf_per_bit, a.combined_per_bit)
        for i, a in enumerate(ordered[:k])
    ]
    return RankingReport(entries, k)


def select_final(ranking: RankingReport, dependency: DependencyReport) -> list[str]:
    """Independent counters plus one representative per dependent group.

    The dependency analysis must cover exactly the ranked counters;
    output preserves ranking order.
    """
    ranked = [e.counter_id for e in ranking.entries]
    if set(ranked) != set(dependency.matrix.counter_ids):
        raise ValueError(
            "dependency analysis does not cover exactly the ranked counters"
        )
    keep = set(dependency.representatives)
    return [cid for cid in ranked if cid in keep]


@dataclass(eq=False)
class EntropyBudget:
    """Entropy throughput of a counter selection at one fold width.

    One output byte per counter takes ``8/alpha`` sampling rounds, each
    costing ``sleep_ms + collect_ms``; ``bits_per_cycle`` sums the
    selected counters' byte-level Shannon entropy at that width.
    """

    selected: list[str]
    alpha: int
    bits_per_cycle: float
    cycle_ms: float
    bits_per_second: float
    sleep_ms: float
    collect_ms: float


def budget(
    assessments: Sequence[EntropyAssessment],
    alpha: int = 1,
    sleep_ms: float = 20.0,
    collect_ms: float = 13.0,
) -> EntropyBudget:
    """Entropy per byte-cycle for the given counters at one fold width."""
    if alpha not in BUDGET_ALPHAS:
        raise ValueError(f"alpha must be one of {BUDGET_ALPHAS}, got {alpha}")
    if sleep_ms <= 0 or collect_ms <= 0:
        raise ValueError("sleep_ms and collect_ms must be positive")
    terms = []
    for a in assessments:
        if alpha not in a.per_alpha:
            raise ValueError(
                f"counter '{a.counter_id}' lacks an alpha={alpha} assessment"
            )
        terms.append(a.per_alpha[alpha].h1_bits)
    bits_per_cycle = math.fsum(terms)
    cycle_ms = (ROUNDS_PER_BYTE / alpha) * (sleep_ms + collect_ms)
    return EntropyBudget(
        selected=[a.counter_id for a in assessments],
        alpha=alpha,
        bits_per_cycle=bits_per_cycle,
        cycle_ms=cycle_ms,
        bits_per_second=bits_per_cycle / cycle_ms * 1000.0,
        sleep_ms=sleep_ms,
        collect_ms=collect_ms,
    )
