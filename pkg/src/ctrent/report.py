"""Canonical JSON report files.

The writer is deliberately hand-rolled: object keys keep their
insertion order, every float prints as fixed six-decimal notation,
strings are ASCII-escaped, and output is LF/UTF-8 with two-space
indentation. Identical inputs therefore serialize to identical bytes,
which the golden-file tests depend on. ``loads(dumps(x))`` is the
identity on canonical reports (floats are canonicalized to six decimals
at dump time), and ``dumps(loads(b)) == b`` for files produced here.

Numeric field names carry their units (``*_bits``, ``*_per_bit``,
``*_ms``, ``*_normalized``); counts are plain integers.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .dependence import DependencyReport, MiMatrix, RobustnessSeries
from .entropy import EntropyAssessment
from .pipeline import EliminationReport, EntropyBudget, RankingReport
from .trace import TraceRun

SCHEMA_VERSION = 1


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"reports may not contain non-finite numbers: {x}")
    return f"{x:.6f}"


def _emit(obj, indent: int, out: list) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            out.append(inner + json.dumps(key) + ": ")
            _emit(value, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(inner)
            _emit(value, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dumps(report: dict) -> str:
    """Serialize a report dict to canonical JSON text."""
    out: list = []
    _emit(report, 0, out)
    out.append("\n")
    return "".join(out)


def loads(text: str | bytes) -> dict:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return json.loads(text)


def dump_report(report: dict, path) -> None:
    Path(path).write_bytes(dumps(report).encode("utf-8"))


def load_report(path) -> dict:
    return loads(Path(path).read_bytes())


def run_metadata(run: TraceRun) -> dict:
    interval = (
        run.counters[0].sample_interval_ms if run.counters else None
    )
    return {
        "run_id": run.run_id,
        "counters": len(run.counters),
        "rounds": run.n_rounds,
        "sample_interval_ms": interval,
    }


def assessment_record(a: EntropyAssessment) -> dict:
    return {
        "counter_id": a.counter_id,
        "per_alpha": [
            {
                "alpha": alpha,
                "h1_bits": a.per_alpha[alpha].h1_bits,
                "hinf_bits": a.per_alpha[alpha].hinf_bits,
            }
            for alpha in sorted(a.per_alpha)
        ],
        "robust_h1_bits": a.robust_h1_bits,
        "robust_hinf_bits": a.robust_hinf_bits,
        "h1_per_bit": a.h1_per_bit,
        "hinf_per_bit": a.hinf_per_bit,
        "combined_per_bit": a.combined_per_bit,
    }


def elimination_section(rep: EliminationReport) -> dict:
    return {
        "stages": [
            {"stage": name, "surviving": count} for name, count in rep.stage_counts
        ],
        "eliminated": {stage: list(ids) for stage, ids in rep.eliminated.items()},
        "survivors": list(rep.survivors),
    }


def ranking_section(rep: RankingReport) -> dict:
    return {
        "k": rep.k,
        "entries": [
            {
                "rank": e.rank,
                "counter_id": e.counter_id,
                "h1_per_bit": e.h1_per_bit,
                "hinf_per_bit": e.hinf_per_bit,
                "combined_per_bit": e.combined_per_bit,
            }
            for e in rep.entries
        ],
    }


def mi_matrix_section(matrix: MiMatrix) -> dict:
    return {
        "counter_ids": list(matrix.counter_ids),
        "normalized_mi": [list(map(float, row)) for row in matrix.values],
        "clamped_negative_mi": matrix.clamp_count,
    }


def dependency_section(dep: DependencyReport) -> dict:
    return {
        "threshold_normalized": dep.threshold,
        "matrix": mi_matrix_section(dep.matrix),
        "groups": [list(g) for g in dep.groups],
        "representatives": list(dep.representatives),
        "selected": dep.selected_ids(),
    }


def robustness_record(series: RobustnessSeries) -> dict:
    return {
        "counter_id": series.counter_id,
        "window_len_nibbles": series.window_len,
        "step_nibbles": series.step,
        "threshold_normalized": series.threshold,
        "classification": series.classification,
        "degenerate_runs": series.degenerate,
        "pair_means_normalized": [float(m) for m in series.pair_means],
        "pairs": [
            {
                "runs": list(pair),
                "normalized_mi": [float(v) for v in mi_series],
            }
            for pair, mi_series in zip(((0, 1), (0, 2), (1, 2)), series.per_pair_series)
        ],
        "min_series": [float(v) for v in series.min_series],
        "avg_series": [float(v) for v in series.avg_series],
        "max_series": [float(v) for v in series.max_series],
    }


def budget_section(b: EntropyBudget) -> dict:
    return {
        "selected": list(b.selected),
        "alpha": b.alpha,
        "bits_per_cycle": b.bits_per_cycle,
        "cycle_ms": b.cycle_ms,
        "bits_per_second": b.bits_per_second,
        "sleep_ms": b.sleep_ms,
        "collect_ms": b.collect_ms,
    }


def build_report(
    run_meta: dict | None = None,
    alphas: tuple | list | None = None,
    assessments=None,
    elimination: EliminationReport | None = None,
    ranking: RankingReport | None = None,
    dependency: DependencyReport | None = None,
    robustness=None,
    budget: EntropyBudget | None = None,
) -> dict:
    """Assemble a report dict with a fixed section order."""
    report: dict = {"schema_version": SCHEMA_VERSION}
    if run_meta is not None:
        report["run"] = run_meta
    if alphas is not None:
        report["alphas"] = [int(a) for a in alphas]
    if assessments is not None:
        report["assessments"] = [assessment_record(a) for a in assessments]
    if elimination is not None:
        report["elimination"] = elimination_section(elimination)
    if ranking is not None:
        report["ranking"] = ranking_section(ranking)
    if dependency is not None:
        report["dependency"] = dependency_section(dependency)
    if robustness is not None:
        report["robustness"] = [robustness_record(s) for s in robustness]
    if budget is not None:
        report["budget"] = budget_section(budget)
    return report


def mi_matrix_csv(matrix: MiMatrix) -> bytes:
    """Square CSV: header row/column of counter ids, six-decimal values."""
    lines = ["," + ",".join(matrix.counter_ids)]
    for cid, row in zip(matrix.counter_ids, matrix.values):
        lines.append(cid + "," + ",".join(_format_float(float(v)) for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")
