"""Counter trace data model and the wide-CSV interchange format.

A run is stored wide: one row per sampling round, one column per
counter, with the round timestamp in the leading ``t_ms`` column. Wide
layout keeps rounds aligned across counters, which the pairwise
dependence analysis relies on. Values are unsigned 64-bit decimal
integers; files are UTF-8 with LF newlines and no padding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataWarning, TraceCsvError

U64_MAX = 2**64 - 1
DEFAULT_INTERVAL_MS = 20


def _readonly_u64(values, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind == "f":
        raise ValueError(f"{what} must be integers, got floating-point data")
    arr = np.ascontiguousarray(arr, dtype=np.uint64).view()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CounterTrace:
    """A named sequence of unsigned 64-bit counter samples.

    Samples are held as a read-only uint64 array; analysis never mutates
    a trace. ``sample_interval_ms`` is the nominal wait between sampling
    rounds.
    """

    counter_id: str
    samples: np.ndarray
    sample_interval_ms: int = DEFAULT_INTERVAL_MS

    def __post_init__(self):
        if not self.counter_id:
            raise ValueError("counter_id must be non-empty")
        if self.sample_interval_ms < 0:
            raise ValueError("sample_interval_ms must be nonnegative")
        object.__setattr__(
            self, "samples", _readonly_u64(self.samples, "samples")
        )

    def __len__(self) -> int:
        return int(self.samples.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CounterTrace):
            return NotImplemented
        return (
            self.counter_id == other.counter_id
            and self.sample_interval_ms == other.sample_interval_ms
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None


@dataclass(eq=False)
class TraceRun:
    """An aligned collection of counter traces from one sampling run.

    All member traces have identical length. ``round_timestamps_ms`` is
    optional metadata; analysis is index-based, so non-monotone
    timestamps only raise a :class:`DataWarning`.
    """

    run_id: str
    counters: list[CounterTrace]
    round_timestamps_ms: np.ndarray | None = None

    def __post_init__(self):
        self.counters = list(self.counters)
        ids = [t.counter_id for t in self.counters]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate counter ids: {', '.join(dupes)}")
        lengths = {len(t) for t in self.counters}
        if len(lengths) > 1:
            raise ValueError("all traces in a run must have equal length")
        if self.round_timestamps_ms is not None:
            ts = _readonly_u64(self.round_timestamps_ms, "round_timestamps_ms")
            if self.counters and ts.size != len(self.counters[0]):
                raise ValueError(
                    "round_timestamps_ms length does not match trace length"
                )
            if ts.size >= 2 and not bool(np.all(ts[1:] > ts[:-1])):
                warnings.warn(
                    f"run '{self.run_id}': round timestamps are not strictly "
                    "increasing",
                    DataWarning,
                    stacklevel=2,
                )
            self.round_timestamps_ms = ts
        self._index = {t.counter_id: t for t in self.counters}

    @property
    def counter_ids(self) -> list[str]:
        return [t.counter_id for t in self.counters]

    @property
    def n_rounds(self) -> int:
        if self.counters:
            return len(self.counters[0])
        if self.round_timestamps_ms is not None:
            return int(self.round_timestamps_ms.size)
        return 0

    def get(self, counter_id: str) -> CounterTrace:
        try:
            return self._index[counter_id]
        except KeyError:
            raise KeyError(
                f"run '{self.run_id}' has no counter '{counter_id}'"
            ) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TraceRun):
            return NotImplemented
        if self.run_id != other.run_id or self.counters != other.counters:
            return False
        a, b = self.round_timestamps_ms, other.round_timestamps_ms
        if (a is None) != (b is None):
            return False
        return a is None or np.array_equal(a, b)

    __hash__ = None


def _parse_u64(text: str, row: int, column: str) -> int:
    if not (text.isascii() and text.isdecimal()):
        raise TraceCsvError(
            f"row {row}, column '{column}': {text!r} is not an unsigned "
            "decimal integer"
        )
    value = int(text)
    if value > U64_MAX:
        raise TraceCsvError(
            f"row {row}, column '{column}': {text} overflows 64 bits"
        )
    return value


def parse_wide_csv(
    data: bytes | str,
    run_id: str = "run",
    sample_interval_ms: int = DEFAULT_INTERVAL_MS,
) -> TraceRun:
    """Parse wide-CSV bytes (or text) into a :class:`TraceRun`.

    The first line must be ``t_ms,<id1>,<id2>,...``; every following row
    carries one unsigned 64-bit decimal value per column. A header with
    zero data rows parses to empty traces with a diagnostic warning.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceCsvError(f"input is not UTF-8: {exc}") from exc
    else:
        text = data
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TraceCsvError("empty input: missing header line")

    header = lines[0].rstrip("\r").split(",")
    if header[0] != "t_ms":
        raise TraceCsvError(
            f"malformed header: first column must be 't_ms', got {header[0]!r}"
        )
    ids = header[1:]
    if any(not cid for cid in ids):
        raise TraceCsvError("malformed header: empty counter id")
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise TraceCsvError(f"duplicate counter ids in header: {', '.join(dupes)}")

    rows = lines[1:]
    if not rows:
        warnings.warn(f"run '{run_id}': no data rows", DataWarning, stacklevel=2)
    n_cols = len(header)
    timestamps = np.empty(len(rows), dtype=np.uint64)
    columns = np.empty((len(ids), len(rows)), dtype=np.uint64)
    for r, line in enumerate(rows):
        parts = line.rstrip("\r").split(",")
        if len(parts) != n_cols:
            raise TraceCsvError(
                f"row {r + 1}: expected {n_cols} fields, got {len(parts)}"
            )
        timestamps[r] = _parse_u64(parts[0], r + 1, "t_ms")
        for c, cid in enumerate(ids):
            columns[c, r] = _parse_u64(parts[c + 1], r + 1, cid)

    traces = [
        CounterTrace(cid, columns[c], sample_interval_ms)
        for c, cid in enumerate(ids)
    ]
    return TraceRun(run_id, traces, timestamps)


def write_wide_csv(run: TraceRun) -> bytes:
    """Serialize a run to canonical wide-CSV bytes.

    Canonical form: LF newlines, no trailing whitespace, decimal values,
    trailing final newline. If the run carries no timestamps, nominal
    ones (index times the sampling interval) are materialized.
    """
    lengths = {len(t) for t in run.counters}
    if len(lengths) > 1:
        raise ValueError("all traces in a run must have equal length")
    ids = run.counter_ids
    n = run.n_rounds
    ts = run.round_timestamps_ms
    if ts is None:
        interval = (
            run.counters[0].sample_interval_ms if run.counters
            else DEFAULT_INTERVAL_MS
        )
        ts = np.arange(n, dtype=np.uint64) * np.uint64(interval)
    lines = ["t_ms" + "".join("," + cid for cid in ids)]
    columns = [ts] + [t.samples for t in run.counters]
    for r in range(n):
        lines.append(",".join(str(int(col[r])) for col in columns))
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_wide_csv(
    path,
    run_id: str | None = None,
    sample_interval_ms: int = DEFAULT_INTERVAL_MS,
) -> TraceRun:
    """Read a wide-CSV file; the run id defaults to the file stem."""
    p = Path(path)
    return parse_wide_csv(
        p.read_bytes(),
        run_id=run_id if run_id is not None else p.stem,
        sample_interval_ms=sample_interval_ms,
    )


def write_wide_csv_file(run: TraceRun, path) -> None:
    Path(path).write_bytes(write_wide_csv(run))
