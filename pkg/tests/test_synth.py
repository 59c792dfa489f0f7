import warnings

import numpy as np
import pytest

from ctrent.dependence import mutual_information
from ctrent.entropy import entropy_bits
from ctrent.errors import DataWarning, SourceSpecError
from ctrent.preprocess import preprocess_counter, to_nibbles
from ctrent.synth import (
    SourceSpec,
    counter_seed,
    fnv1a64,
    generate,
    generate_run,
    load_spec_file,
    mix64,
    splitmix64,
)


class TestSplitMix64:
    def test_published_seed0_vectors(self):
        out = splitmix64(0, 5)
        assert [int(v) for v in out] == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
            0xF88BB8A8724C81EC,
            0x1B39896A51A8749B,
        ]

    def test_counter_mode_matches_sequential_reference(self):
        def reference(seed, n):
            out, state = [], seed
            for _ in range(n):
                state = (state + 0x9E3779B97F4A7C15) & (2**64 - 1)
                z = state
                z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (2**64 - 1)
                z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (2**64 - 1)
                out.append(z ^ (z >> 31))
            return out

        ref = reference(987654321, 20)
        assert [int(v) for v in splitmix64(987654321, 20)] == ref
        assert [int(v) for v in splitmix64(987654321, 5, start=15)] == ref[15:]

    def test_mix64_matches_finalizer(self):
        assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF

    def test_fnv1a64_reference(self):
        # Standard FNV-1a test vectors.
        assert fnv1a64("") == 0xCBF29CE484222325
        assert fnv1a64("a") == 0xAF63DC4C8601EC8C


class TestGenerate:
    def test_constant(self):
        trace = generate(SourceSpec("c", "constant", 5, {"value": 7}))
        assert list(trace.samples) == [7, 7, 7, 7, 7]

    def test_incremental(self):
        trace = generate(SourceSpec("c", "incremental", 4, {"start": 0, "step": 3}))
        assert list(trace.samples) == [0, 3, 6, 9]

    def test_incremental_wraps(self):
        trace = generate(
            SourceSpec("c", "incremental", 3, {"start": 2**64 - 2, "step": 1})
        )
        assert list(trace.samples) == [2**64 - 2, 2**64 - 1, 0]

    def test_oscillate_then_freeze(self):
        spec = SourceSpec(
            "osc",
            "oscillate_then_freeze",
            10_000,
            {"lo": 2_527_232, "hi": 2_576_384, "switch_index": 1_643, "seed": 1},
        )
        trace = generate(spec)
        head = trace.samples[:1_643].astype(np.int64)
        assert head.min() >= 2_527_232 and head.max() <= 2_576_384
        assert len(np.unique(head)) > 1
        assert (trace.samples[1_643:] == 2_576_384).all()

    def test_single_random_bit_values_and_entropy(self):
        trace = generate(SourceSpec("b", "single_random_bit", 50_000, {"seed": 5}))
        values = set(np.unique(trace.samples).tolist())
        assert values == {0, 1}
        counts = np.bincount(trace.samples.astype(np.int64), minlength=2)
        h1 = entropy_bits(counts, len(trace))
        assert h1 == pytest.approx(1.0, abs=0.01)

    def test_determinism(self):
        spec = SourceSpec("u", "uniform64", 1000, {"seed": 9})
        assert generate(spec) == generate(spec)

    def test_uniform_bits_bound(self):
        trace = generate(SourceSpec("u", "uniform64", 1000, {"seed": 1, "bits": 12}))
        assert int(trace.samples.max()) < 2**12

    def test_derived_copy_needs_run(self):
        spec = SourceSpec("d", "derived_copy", 10, {"source": "x"})
        with pytest.raises(SourceSpecError, match="run context"):
            generate(spec)

    def test_validation(self):
        with pytest.raises(SourceSpecError, match="unknown kind"):
            SourceSpec("c", "nope", 10, {})
        with pytest.raises(SourceSpecError, match="length"):
            SourceSpec("c", "constant", 1, {"value": 1})
        with pytest.raises(SourceSpecError, match="lo must not exceed hi"):
            SourceSpec("c", "oscillate_then_freeze", 10,
                       {"lo": 5, "hi": 4, "switch_index": 1})
        with pytest.raises(SourceSpecError, match="requires parameter"):
            SourceSpec("c", "constant", 10, {})
        with pytest.raises(SourceSpecError, match="unknown parameter"):
            SourceSpec("c", "constant", 10, {"value": 1, "extra": 2})
        with pytest.raises(SourceSpecError, match="event_probability"):
            SourceSpec("c", "sparse_event", 10, {"event_probability": 1.5})


class TestGenerateRun:
    def test_determinism(self):
        specs = [
            SourceSpec("a", "uniform64", 100, {"seed": 1}),
            SourceSpec("b", "single_random_bit", 100, {"seed": 2}),
        ]
        assert generate_run(specs, run_seed=5) == generate_run(specs, run_seed=5)

    def test_distinct_run_seeds_decorrelate(self):
        spec = [SourceSpec("u", "uniform64", 200_001, {})]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DataWarning)
            run_a = generate_run(spec, run_seed=1)
            run_b = generate_run(spec, run_seed=2)
            x = to_nibbles(preprocess_counter(run_a.get("u"), 4))
            y = to_nibbles(preprocess_counter(run_b.get("u"), 4))
            x = type(x)(x.alpha, 4, x.symbols[:100_000])
            y = type(y)(y.alpha, 4, y.symbols[:100_000])
            assert mutual_information(x, y) / 4.0 < 0.005

    def test_derived_copy_scales_elementwise(self):
        specs = [
            SourceSpec("base", "uniform64", 500, {"seed": 3, "bits": 32}),
            SourceSpec("kb", "derived_copy", 500, {"source": "base", "scale": 1024}),
        ]
        run = generate_run(specs, run_seed=1)
        assert (run.get("kb").samples == run.get("base").samples * np.uint64(1024)).all()

    def test_derived_copy_identity_mi_equals_h1(self):
        specs = [
            SourceSpec("base", "uniform64", 40_001, {"seed": 3, "bits": 32}),
            SourceSpec("copy", "derived_copy", 40_001, {"source": "base", "scale": 1}),
        ]
        run = generate_run(specs, run_seed=2)
        x = to_nibbles(preprocess_counter(run.get("base"), 1))
        y = to_nibbles(preprocess_counter(run.get("copy"), 1))
        hx = entropy_bits(np.bincount(x.symbols, minlength=16), len(x))
        assert mutual_information(x, y) == hx

    def test_derived_copy_requires_earlier_source(self):
        specs = [
            SourceSpec("kb", "derived_copy", 100, {"source": "base"}),
            SourceSpec("base", "uniform64", 100, {}),
        ]
        with pytest.raises(SourceSpecError, match="declared earlier"):
            generate_run(specs)

    def test_duplicate_ids_rejected(self):
        specs = [
            SourceSpec("a", "constant", 10, {"value": 1}),
            SourceSpec("a", "constant", 10, {"value": 2}),
        ]
        with pytest.raises(SourceSpecError, match="duplicate"):
            generate_run(specs)

    def test_length_mismatch_rejected(self):
        specs = [
            SourceSpec("a", "constant", 10, {"value": 1}),
            SourceSpec("b", "constant", 11, {"value": 2}),
        ]
        with pytest.raises(SourceSpecError, match="equal length"):
            generate_run(specs)

    def test_start_index_continues_streams(self):
        spec_full = [SourceSpec("u", "uniform64", 300, {"seed": 4})]
        spec_tail = [SourceSpec("u", "uniform64", 100, {"seed": 4})]
        full = generate_run(spec_full, run_seed=9)
        tail = generate_run(spec_tail, run_seed=9, start_index=200)
        assert (tail.get("u").samples == full.get("u").samples[200:]).all()

    def test_start_index_continues_sparse_history(self):
        spec_full = [SourceSpec("s", "sparse_event", 400, {"event_probability": 0.2})]
        spec_tail = [SourceSpec("s", "sparse_event", 150, {"event_probability": 0.2})]
        full = generate_run(spec_full, run_seed=3)
        tail = generate_run(spec_tail, run_seed=3, start_index=250)
        assert (tail.get("s").samples == full.get("s").samples[250:]).all()

    def test_counter_seed_mixing_is_stable(self):
        assert counter_seed(1, "a") != counter_seed(2, "a")
        assert counter_seed(1, "a") != counter_seed(1, "b")
        assert counter_seed(1, "a", 7) != counter_seed(1, "a", 8)
        assert counter_seed(1, "a", 7) == counter_seed(1, "a", 7)

    def test_timestamps_reflect_interval_and_start(self):
        specs = [SourceSpec("a", "constant", 3, {"value": 1})]
        run = generate_run(specs, start_index=10, sample_interval_ms=20)
        assert list(run.round_timestamps_ms) == [200, 220, 240]


class TestSpecFile:
    def test_roundtrip_parse(self, tmp_path):
        spec_text = """\
[run]
run_id = demo
length = 50
run_seed = 3
sample_interval_ms = 20

[counter:cpu]
kind = uniform64
seed = 7

[counter:mem]
kind = derived_copy
source = cpu
scale = 1024

[counter:flat]
kind = constant
value = 9
length = 50
"""
        path = tmp_path / "demo.spec"
        path.write_text(spec_text)
        specs, run_cfg = load_spec_file(path)
        assert [s.counter_id for s in specs] == ["cpu", "mem", "flat"]
        assert run_cfg == {
            "run_id": "demo", "length": 50, "run_seed": 3, "sample_interval_ms": 20,
        }
        run = generate_run(specs, run_seed=run_cfg["run_seed"], run_id=run_cfg["run_id"])
        assert run.n_rounds == 50

    def test_missing_kind(self, tmp_path):
        path = tmp_path / "bad.spec"
        path.write_text("[run]\nlength = 10\n\n[counter:x]\nseed = 1\n")
        with pytest.raises(SourceSpecError, match="missing 'kind'"):
            load_spec_file(path)

    def test_missing_length(self, tmp_path):
        path = tmp_path / "bad.spec"
        path.write_text("[counter:x]\nkind = uniform64\n")
        with pytest.raises(SourceSpecError, match="no length"):
            load_spec_file(path)

    def test_unknown_section(self, tmp_path):
        path = tmp_path / "bad.spec"
        path.write_text("[extra]\nfoo = 1\n")
        with pytest.raises(SourceSpecError, match="unexpected section"):
            load_spec_file(path)

    def test_no_counters(self, tmp_path):
        path = tmp_path / "bad.spec"
        path.write_text("[run]\nlength = 10\n")
        with pytest.raises(SourceSpecError, match="no counters"):
            load_spec_file(path)

    def test_unknown_run_key(self, tmp_path):
        path = tmp_path / "bad.spec"
        path.write_text("[run]\nbogus = 1\n\n[counter:x]\nkind = uniform64\nlength = 10\n")
        with pytest.raises(SourceSpecError, match="unknown setting"):
            load_spec_file(path)
