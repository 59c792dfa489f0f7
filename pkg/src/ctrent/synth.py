"""Deterministic synthetic counter generators.

Seeded kinds draw from SplitMix64, a fixed, widely documented 64-bit
generator, evaluated in counter mode: output ``i`` is the finalizer
applied to ``seed + (i+1) * GOLDEN``. That makes any sample index
reachable without generating its predecessors and keeps identical specs
byte-identical across runs, platforms and implementations (the seed-0
test vectors are pinned in the test suite).

Kinds
-----
``constant``              fixed value
``incremental``           start + i*step (mod 2**64)
``uniform64``             independent uniform values; ``bits`` keeps the
                          top n bits for bounded-magnitude sources
``single_random_bit``     values in {0, 1}, one fair random bit
``oscillate_then_freeze`` uniform in [lo, hi] until switch_index, then
                          pinned at hi
``derived_copy``          elementwise scaled copy of an earlier counter
``sparse_event``          running count of rare events (probability p
                          per round)

``sparse_event`` extends the archetype set so depressed low-activity
sources can be exercised in robustness tests.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import SourceSpecError
from .trace import DEFAULT_INTERVAL_MS, U64_MAX, CounterTrace, TraceRun

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(x: int) -> int:
    """SplitMix64 finalizer on one 64-bit integer."""
    z = x & U64_MAX
    z = ((z ^ (z >> 30)) * _MIX1) & U64_MAX
    z = ((z ^ (z >> 27)) * _MIX2) & U64_MAX
    return z ^ (z >> 31)


def splitmix64(seed: int, n: int, start: int = 0) -> np.ndarray:
    """``n`` SplitMix64 outputs for ``seed``, beginning at stream index ``start``."""
    idx = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & U64_MAX) + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z ^= z >> np.uint64(31)
    return z


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of a string (UTF-8)."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & U64_MAX
    return h


def counter_seed(run_seed: int, counter_id: str, spec_seed: int = 0) -> int:
    """Per-counter stream seed used by :func:`generate_run`.

    Mixing rule: ``mix64(mix64(run_seed ^ fnv1a64(counter_id)) ^ spec_seed)``.
    Distinct run seeds therefore yield statistically independent streams
    for every counter, which models independent capture sessions.
    """
    return mix64(mix64((run_seed & U64_MAX) ^ fnv1a64(counter_id)) ^ (spec_seed & U64_MAX))


KINDS = (
    "constant",
    "incremental",
    "uniform64",
    "single_random_bit",
    "oscillate_then_freeze",
    "derived_copy",
    "sparse_event",
)

# kind -> {param: (type, required, default)}
_KIND_PARAMS: dict[str, dict[str, tuple]] = {
    "constant": {"value": (int, True, None)},
    "incremental": {"start": (int, False, 0), "step": (int, False, 1)},
    "uniform64": {"seed": (int, False, 0), "bits": (int, False, 64)},
    "single_random_bit": {"seed": (int, False, 0)},
    "oscillate_then_freeze": {
        "lo": (int, True, None),
        "hi": (int, True, None),
        "switch_index": (int, True, None),
        "seed": (int, False, 0),
    },
    "derived_copy": {"source": (str, True, None), "scale": (int, False, 1)},
    "sparse_event": {"event_probability": (float, True, None), "seed": (int, False, 0)},
}


@dataclass
class SourceSpec:
    """One synthetic counter: kind, kind-specific parameters, length."""

    counter_id: str
    kind: str
    length: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.counter_id:
            raise SourceSpecError("counter_id must be non-empty")
        if self.kind not in KINDS:
            raise SourceSpecError(
                f"counter '{self.counter_id}': unknown kind '{self.kind}' "
                f"(valid: {', '.join(KINDS)})"
            )
        if self.length < 2:
            raise SourceSpecError(
                f"counter '{self.counter_id}': length must be >= 2, got {self.length}"
            )
        schema = _KIND_PARAMS[self.kind]
        unknown = set(self.params) - set(schema)
        if unknown:
            raise SourceSpecError(
                f"counter '{self.counter_id}': unknown parameter(s) for "
                f"{self.kind}: {', '.join(sorted(unknown))}"
            )
        clean = {}
        for name, (typ, required, default) in schema.items():
            if name in self.params:
                try:
                    clean[name] = typ(self.params[name])
                except (TypeError, ValueError) as exc:
                    raise SourceSpecError(
                        f"counter '{self.counter_id}': parameter '{name}' "
                        f"must be {typ.__name__}: {exc}"
                    ) from exc
            elif required:
                raise SourceSpecError(
                    f"counter '{self.counter_id}': {self.kind} requires "
                    f"parameter '{name}'"
                )
            else:
                clean[name] = default
        self.params = clean
        self._validate_ranges()

    def _validate_ranges(self):
        p = self.params
        cid = self.counter_id
        if self.kind == "constant" and not 0 <= p["value"] <= U64_MAX:
            raise SourceSpecError(f"counter '{cid}': value must fit in 64 bits")
        if self.kind == "uniform64" and not 1 <= p["bits"] <= 64:
            raise SourceSpecError(f"counter '{cid}': bits must lie in [1, 64]")
        if self.kind == "oscillate_then_freeze":
            if not 0 <= p["lo"] <= U64_MAX or not 0 <= p["hi"] <= U64_MAX:
                raise SourceSpecError(f"counter '{cid}': lo/hi must fit in 64 bits")
            if p["lo"] > p["hi"]:
                raise SourceSpecError(f"counter '{cid}': lo must not exceed hi")
            if p["switch_index"] < 0:
                raise SourceSpecError(f"counter '{cid}': switch_index must be >= 0")
        if self.kind == "sparse_event" and not 0.0 <= p["event_probability"] <= 1.0:
            raise SourceSpecError(
                f"counter '{cid}': event_probability must lie in [0, 1]"
            )

    @property
    def seed(self) -> int:
        return int(self.params.get("seed", 0))


def _generate_samples(
    spec: SourceSpec,
    seed: int,
    start_index: int,
    source_samples: np.ndarray | None,
) -> np.ndarray:
    n = spec.length
    p = spec.params
    kind = spec.kind
    if kind == "constant":
        return np.full(n, np.uint64(p["value"]), dtype=np.uint64)
    if kind == "incremental":
        idx = np.arange(start_index, start_index + n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return np.uint64(p["start"] & U64_MAX) + idx * np.uint64(p["step"] & U64_MAX)
    if kind == "uniform64":
        return splitmix64(seed, n, start_index) >> np.uint64(64 - p["bits"])
    if kind == "single_random_bit":
        return splitmix64(seed, n, start_index) >> np.uint64(63)
    if kind == "oscillate_then_freeze":
        lo, hi, switch = p["lo"], p["hi"], p["switch_index"]
        span = hi - lo + 1
        u = splitmix64(seed, n, start_index)
        if span > U64_MAX:
            vals = u
        else:
            vals = np.uint64(lo) + u % np.uint64(span)
        idx = np.arange(start_index, start_index + n, dtype=np.int64)
        return np.where(idx < switch, vals, np.uint64(hi))
    if kind == "derived_copy":
        with np.errstate(over="ignore"):
            return source_samples * np.uint64(p["scale"] & U64_MAX)
    if kind == "sparse_event":
        # The value is the number of events since stream index 0, so a
        # resumed window (start_index > 0) continues the same history.
        prob = p["event_probability"]
        total = start_index + n
        u = splitmix64(seed, total, 0)
        if prob >= 1.0:
            events = np.ones(total, dtype=np.uint64)
        else:
            events = (u < np.uint64(int(prob * 2.0**64))).astype(np.uint64)
        events[0] = 0
        return np.cumsum(events, dtype=np.uint64)[start_index:]
    raise SourceSpecError(f"unknown kind '{kind}'")


def generate(spec: SourceSpec, start_index: int = 0) -> CounterTrace:
    """Generate one trace; seeded kinds use the spec's own seed directly."""
    if spec.kind == "derived_copy":
        raise SourceSpecError(
            f"counter '{spec.counter_id}': derived_copy needs a run context "
            "(use generate_run)"
        )
    samples = _generate_samples(spec, spec.seed, start_index, None)
    return CounterTrace(spec.counter_id, samples)


def generate_run(
    specs: Sequence[SourceSpec],
    run_seed: int = 0,
    run_id: str = "synth",
    start_index: int = 0,
    sample_interval_ms: int = DEFAULT_INTERVAL_MS,
) -> TraceRun:
    """Generate an aligned run; per-counter seeds derive from ``run_seed``.

    ``derived_copy`` counters must name a source declared earlier in
    ``specs``. ``start_index`` shifts every generator to a later window
    of its sample stream, which models re-sampling the same sources.
    """
    specs = list(specs)
    if not specs:
        raise SourceSpecError("no counter specs given")
    ids = [s.counter_id for s in specs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise SourceSpecError(f"duplicate counter ids: {', '.join(dupes)}")
    if len({s.length for s in specs}) > 1:
        raise SourceSpecError("all counters in a run must have equal length")

    built: dict[str, np.ndarray] = {}
    traces = []
    for spec in specs:
        if spec.kind == "derived_copy":
            source = spec.params["source"]
            if source not in built:
                raise SourceSpecError(
                    f"counter '{spec.counter_id}': derived_copy source "
                    f"'{source}' must be declared earlier in the run"
                )
            samples = _generate_samples(spec, 0, start_index, built[source])
        else:
            seed = counter_seed(run_seed, spec.counter_id, spec.seed)
            samples = _generate_samples(spec, seed, start_index, None)
        built[spec.counter_id] = samples
        traces.append(CounterTrace(spec.counter_id, samples, sample_interval_ms))

    n = specs[0].length
    timestamps = (
        np.arange(start_index, start_index + n, dtype=np.uint64)
        * np.uint64(sample_interval_ms)
    )
    return TraceRun(run_id, traces, timestamps)


_RUN_KEYS = {
    "run_id": str,
    "length": int,
    "run_seed": int,
    "start_index": int,
    "sample_interval_ms": int,
}


def load_spec_file(path) -> tuple[list[SourceSpec], dict]:
    """Parse a key-value spec file into source specs plus run settings.

    Layout: a ``[run]`` section with run-level settings (run_id, length,
    run_seed, start_index, sample_interval_ms) and one
    ``[counter:<id>]`` section per counter carrying ``kind`` plus its
    parameters. ``length`` may be set per counter or inherited from
    ``[run]``.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh, source=str(path))
    except configparser.Error as exc:
        raise SourceSpecError(f"cannot parse spec file: {exc}") from exc

    run_cfg: dict = {}
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key not in _RUN_KEYS:
                raise SourceSpecError(f"[run]: unknown setting '{key}'")
            try:
                run_cfg[key] = _RUN_KEYS[key](raw)
            except ValueError as exc:
                raise SourceSpecError(f"[run]: bad value for '{key}': {exc}") from exc

    specs = []
    for section in parser.sections():
        if section == "run":
            continue
        if not section.startswith("counter:"):
            raise SourceSpecError(
                f"unexpected section [{section}] (expected [run] or [counter:<id>])"
            )
        cid = section[len("counter:"):].strip()
        if not cid:
            raise SourceSpecError("counter section with empty id")
        items = dict(parser.items(section))
        kind = items.pop("kind", None)
        if kind is None:
            raise SourceSpecError(f"counter '{cid}': missing 'kind'")
        length = items.pop("length", None)
        if length is None:
            length = run_cfg.get("length")
        if length is None:
            raise SourceSpecError(
                f"counter '{cid}': no length given (set it here or in [run])"
            )
        try:
            length = int(length)
        except ValueError as exc:
            raise SourceSpecError(f"counter '{cid}': bad length: {exc}") from exc
        specs.append(SourceSpec(cid, kind, length, items))
    if not specs:
        raise SourceSpecError("spec file declares no counters")
    return specs, run_cfg
