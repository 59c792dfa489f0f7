"""Optional host counter sampling (Linux /proc backend).

The analysis pipeline never requires this module; it exists so real
traces can be captured on machines that expose numeric system counters.
On hosts without such a facility :func:`default_source` raises
:class:`UnsupportedPlatformError` and the CLI exits with a dedicated
status code.

Read-failure policy: a counter that cannot be read in some round
repeats its previous value and the failure is tallied in the run
metadata.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from .errors import UnsupportedPlatformError
from .trace import CounterTrace, TraceRun

_STAT_SCALARS = (
    "ctxt", "intr", "softirq", "processes", "procs_running", "procs_blocked",
)
_STAT_CPU_FIELDS = ("user", "nice", "system", "idle", "iowait", "irq", "softirq")


class ProcCounterSource:
    """Enumerates numeric counters from /proc (vmstat, stat, meminfo)."""

    def __init__(self, proc_root: str = "/proc"):
        self._root = Path(proc_root)
        if not any(
            (self._root / name).is_file() for name in ("vmstat", "stat", "meminfo")
        ):
            raise UnsupportedPlatformError(
                f"no readable counter facility under {proc_root}"
            )
        self._ids = sorted(self.read_values())
        if not self._ids:
            raise UnsupportedPlatformError(
                f"counter facility under {proc_root} exposes no numeric counters"
            )

    def counter_ids(self) -> list[str]:
        return list(self._ids)

    def read_values(self) -> dict[str, int]:
        """One snapshot of every available counter; missing keys are allowed."""
        values: dict[str, int] = {}
        try:
            for line in (self._root / "vmstat").read_text().splitlines():
                parts = line.split()
                if len(parts) == 2 and parts[1].isdigit():
                    values[f"vmstat.{parts[0]}"] = int(parts[1])
        except OSError:
            pass
        try:
            for line in (self._root / "stat").read_text().splitlines():
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "cpu":
                    for name, field in zip(_STAT_CPU_FIELDS, parts[1:]):
                        if field.isdigit():
                            values[f"stat.cpu.{name}"] = int(field)
                elif parts[0] in _STAT_SCALARS and len(parts) >= 2 and parts[1].isdigit():
                    values[f"stat.{parts[0]}"] = int(parts[1])
        except OSError:
            pass
        try:
            for line in (self._root / "meminfo").read_text().splitlines():
                parts = line.split()
                if len(parts) >= 2 and parts[0].endswith(":") and parts[1].isdigit():
                    values[f"meminfo.{parts[0][:-1]}"] = int(parts[1])
        except OSError:
            pass
        return values


def default_source(proc_root: str = "/proc") -> ProcCounterSource:
    """The host's counter source, or UnsupportedPlatformError."""
    return ProcCounterSource(proc_root)


def sample_run(
    source,
    rounds: int,
    interval_ms: int,
    run_id: str = "sampled",
) -> tuple[TraceRun, dict]:
    """Sample all counters once per round, sleeping the interval between.

    Sleeps on the monotonic clock after each collection; per-round
    collection time is measured and summarized in the returned metadata
    (it feeds the budget's collect_ms). Returns ``(run, metadata)``.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if interval_ms < 0:
        raise ValueError("interval_ms must be nonnegative")
    ids = source.counter_ids()
    columns = np.zeros((len(ids), rounds), dtype=np.uint64)
    timestamps = np.zeros(rounds, dtype=np.uint64)
    previous: dict[str, int] = {}
    failures = 0
    collect_ms: list[float] = []
    start_ns = time.monotonic_ns()
    for r in range(rounds):
        t0 = time.monotonic_ns()
        timestamps[r] = (t0 - start_ns) // 1_000_000
        try:
            snapshot = source.read_values()
        except OSError:
            snapshot = {}
        for c, cid in enumerate(ids):
            if cid in snapshot:
                previous[cid] = snapshot[cid]
            else:
                failures += 1
            columns[c, r] = previous.get(cid, 0)
        t1 = time.monotonic_ns()
        collect_ms.append((t1 - t0) / 1e6)
        remaining_s = interval_ms / 1000.0 - (t1 - t0) / 1e9
        if remaining_s > 0 and r < rounds - 1:
            time.sleep(remaining_s)
    traces = [
        CounterTrace(cid, columns[c], interval_ms) for c, cid in enumerate(ids)
    ]
    run = TraceRun(run_id, traces, timestamps)
    meta = {
        "rounds": rounds,
        "interval_ms": interval_ms,
        "collect_ms_mean": sum(collect_ms) / len(collect_ms),
        "collect_ms_max": max(collect_ms),
        "read_failures": failures,
    }
    return run, meta
