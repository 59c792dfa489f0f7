"""Command-line interface.

Subcommands cover the whole pipeline: ``synth`` (generate a corpus),
``assess`` (per-counter entropy), ``eliminate`` (constant-stage
ladder), ``rank`` (top-k by combined metric), ``mi`` (pairwise
dependence and representative selection), ``robust`` (cross-run
windowed MI), ``budget`` (entropy throughput), ``plot`` (SVG scatter)
and ``sample`` (host counter capture, where supported).

Exit codes: 0 success, 2 usage error, 3 input/contract error, 4 I/O
failure, 5 unsupported platform.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dependence, pipeline, report, synth
from .entropy import ROBUST_ALPHAS, assess_counter
from .errors import SourceSpecError, TraceCsvError, UnsupportedPlatformError
from .preprocess import PACK_ALPHAS, preprocess_counter, to_nibbles
from .svgplot import entropy_scatter_svg
from .trace import read_wide_csv, write_wide_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4
EXIT_PLATFORM = 5

_EPILOG = """\
exit codes:
  0  success
  2  usage error (bad flags or arguments)
  3  input or contract error (malformed CSV, invalid spec, bad data)
  4  I/O failure
  5  unsupported platform (sample only)
"""


def _alpha_set(text: str) -> tuple[int, ...]:
    try:
        alphas = tuple(sorted({int(part) for part in text.split(",") if part}))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad alpha set {text!r}: expected comma-separated integers"
        ) from None
    if not alphas or any(a not in PACK_ALPHAS for a in alphas):
        raise argparse.ArgumentTypeError(
            f"bad alpha set {text!r}: values must come from {PACK_ALPHAS}"
        )
    return alphas


def _id_list(text: str) -> list[str]:
    ids = [part for part in text.split(",") if part]
    if not ids:
        raise argparse.ArgumentTypeError("expected a comma-separated id list")
    return ids


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctrent",
        description="Entropy assessment for system counter traces.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic counter run as wide CSV")
    p.add_argument("spec_file", help="key-value source spec file")
    p.add_argument("out_csv", help="output wide-CSV path")
    p.add_argument("--run-seed", type=int, default=None, help="override the run seed")
    p.add_argument("--run-id", default=None, help="override the run id")
    p.add_argument(
        "--start-index", type=int, default=None,
        help="sample the sources from this stream index (models re-sampling)",
    )
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("assess", help="per-counter entropy assessment")
    p.add_argument("in_csv")
    p.add_argument("--alpha-set", type=_alpha_set, default=ROBUST_ALPHAS)
    p.add_argument("--json", dest="json_out", default=None, help="write a JSON report")
    p.add_argument("--run-id", default=None)
    p.set_defaults(func=_cmd_assess)

    p = sub.add_parser("eliminate", help="drop constant counters stage by stage")
    p.add_argument("short_csv")
    p.add_argument("long_csv")
    p.add_argument("--alpha-set", type=_alpha_set, default=ROBUST_ALPHAS)
    p.add_argument("--json", dest="json_out", default=None)
    p.set_defaults(func=_cmd_eliminate)

    p = sub.add_parser("rank", help="top-k counters by combined entropy metric")
    p.add_argument("in_csv")
    p.add_argument("--top", type=int, default=19)
    p.add_argument("--alpha-set", type=_alpha_set, default=ROBUST_ALPHAS)
    p.add_argument("--json", dest="json_out", default=None)
    p.add_argument("--csv", dest="csv_out", default=None, help="write the table as CSV")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("mi", help="pairwise dependence and representative selection")
    p.add_argument("in_csv")
    p.add_argument("--alpha", type=int, choices=PACK_ALPHAS, default=1)
    p.add_argument("--mi-threshold", type=float, default=dependence.DEFAULT_MI_THRESHOLD)
    p.add_argument("--matrix-csv", default=None, help="write the square MI matrix CSV")
    p.add_argument("--json", dest="json_out", default=None)
    p.set_defaults(func=_cmd_mi)

    p = sub.add_parser("robust", help="cross-run robustness from 3 captures")
    p.add_argument("run_csv", nargs="+", help="exactly 3 run CSVs")
    p.add_argument("--counters", type=_id_list, default=None, help="restrict to these ids")
    p.add_argument("--alpha", type=int, choices=PACK_ALPHAS, default=1)
    p.add_argument("--window", type=int, default=dependence.DEFAULT_WINDOW_LEN)
    p.add_argument("--step", type=int, default=dependence.DEFAULT_WINDOW_STEP)
    p.add_argument(
        "--robust-threshold", type=float, default=dependence.DEFAULT_ROBUST_THRESHOLD
    )
    p.add_argument("--json", dest="json_out", default=None)
    p.set_defaults(func=_cmd_robust)

    p = sub.add_parser("budget", help="entropy throughput for the given counters")
    p.add_argument("in_csv")
    p.add_argument("--alpha", type=int, choices=pipeline.BUDGET_ALPHAS, default=1)
    p.add_argument("--sleep-ms", type=float, default=20.0)
    p.add_argument("--collect-ms", type=float, default=13.0)
    p.add_argument("--counters", type=_id_list, default=None)
    p.add_argument("--json", dest="json_out", default=None)
    p.set_defaults(func=_cmd_budget)

    p = sub.add_parser("plot", help="SVG scatter of per-bit entropy metrics")
    p.add_argument("report_json")
    p.add_argument("out_svg")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("sample", help="capture host counters (where supported)")
    p.add_argument("out_csv")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--interval-ms", type=int, default=20)
    p.add_argument("--run-id", default="sampled")
    p.set_defaults(func=_cmd_sample)

    return parser


def _load_run(path, run_id=None):
    run = read_wide_csv(path, run_id=run_id)
    if not run.counters or run.n_rounds == 0:
        raise TraceCsvError(f"{path}: no counter data")
    return run


def _assess_all(run, alphas):
    return [assess_counter(trace, alphas) for trace in run.counters]


def _nibble_streams(run, alpha, counter_ids=None):
    ids = counter_ids if counter_ids is not None else run.counter_ids
    return {
        cid: to_nibbles(preprocess_counter(run.get(cid), alpha)) for cid in ids
    }


def _write_json(report_dict, path) -> None:
    report.dump_report(report_dict, path)
    print(f"wrote {path}")


def _cmd_synth(args) -> int:
    specs, run_cfg = synth.load_spec_file(args.spec_file)
    run_seed = args.run_seed if args.run_seed is not None else run_cfg.get("run_seed", 0)
    run_id = args.run_id if args.run_id is not None else run_cfg.get("run_id", "synth")
    start = (
        args.start_index if args.start_index is not None
        else run_cfg.get("start_index", 0)
    )
    run = synth.generate_run(
        specs,
        run_seed=run_seed,
        run_id=run_id,
        start_index=start,
        sample_interval_ms=run_cfg.get("sample_interval_ms", 20),
    )
    Path(args.out_csv).write_bytes(write_wide_csv(run))
    print(f"wrote {args.out_csv}: {len(run.counters)} counters x {run.n_rounds} rounds")
    return EXIT_OK


def _cmd_assess(args) -> int:
    run = _load_run(args.in_csv, args.run_id)
    assessments = _assess_all(run, args.alpha_set)
    print(f"{'counter':<24} {'H1/bit':>9} {'Hmin/bit':>9} {'combined':>9}")
    for a in assessments:
        print(
            f"{a.counter_id:<24} {a.h1_per_bit:>9.6f} {a.hinf_per_bit:>9.6f} "
            f"{a.combined_per_bit:>9.6f}"
        )
    if args.json_out:
        doc = report.build_report(
            run_meta=report.run_metadata(run),
            alphas=args.alpha_set,
            assessments=assessments,
        )
        _write_json(doc, args.json_out)
    return EXIT_OK


def _cmd_eliminate(args) -> int:
    run_short = _load_run(args.short_csv)
    run_long = _load_run(args.long_csv)
    rep = pipeline.eliminate(run_short, run_long, args.alpha_set)
    for stage, count in rep.stage_counts:
        print(f"{stage:<16} {count}")
    print(f"green counters: {', '.join(rep.survivors) if rep.survivors else '(none)'}")
    if args.json_out:
        doc = report.build_report(
            run_meta=report.run_metadata(run_long),
            alphas=args.alpha_set,
            elimination=rep,
        )
        _write_json(doc, args.json_out)
    return EXIT_OK


def _cmd_rank(args) -> int:
    run = _load_run(args.in_csv)
    assessments = _assess_all(run, args.alpha_set)
    ranking = pipeline.rank(assessments, args.top)
    print(f"{'rank':<5} {'counter':<24} {'H1/bit':>9} {'Hmin/bit':>9} {'combined':>9}")
    for e in ranking.entries:
        print(
            f"{e.rank:<5} {e.counter_id:<24} {e.h1_per_bit:>9.6f} "
            f"{e.hinf_per_bit:>9.6f} {e.combined_per_bit:>9.6f}"
        )
    if args.csv_out:
        lines = ["rank,counter_id,h1_per_bit,hinf_per_bit,combined_per_bit"]
        lines += [
            f"{e.rank},{e.counter_id},{e.h1_per_bit:.6f},"
            f"{e.hinf_per_bit:.6f},{e.combined_per_bit:.6f}"
            for e in ranking.entries
        ]
        Path(args.csv_out).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
        print(f"wrote {args.csv_out}")
    if args.json_out:
        doc = report.build_report(
            run_meta=report.run_metadata(run),
            alphas=args.alpha_set,
            ranking=ranking,
        )
        _write_json(doc, args.json_out)
    return EXIT_OK


def _cmd_mi(args) -> int:
    run = _load_run(args.in_csv)
    streams = _nibble_streams(run, args.alpha)
    matrix = dependence.build_mi_matrix(streams)
    assessments = _assess_all(run, ROBUST_ALPHAS)
    metrics = {a.counter_id: a.combined_per_bit for a in assessments}
    dep = dependence.dependency_groups(matrix, args.mi_threshold, metrics)
    for group, representative in zip(dep.groups, dep.representatives):
        if len(group) > 1:
            print(f"group: {', '.join(group)} -> {representative}")
    selected = dep.selected_ids()
    print(f"selected {len(selected)} of {len(run.counters)}: {', '.join(selected)}")
    if args.matrix_csv:
        Path(args.matrix_csv).write_bytes(report.mi_matrix_csv(matrix))
        print(f"wrote {args.matrix_csv}")
    if args.json_out:
        doc = report.build_report(
            run_meta=report.run_metadata(run),
            alphas=(args.alpha,),
            assessments=assessments,
            dependency=dep,
        )
        _write_json(doc, args.json_out)
    return EXIT_OK


def _cmd_robust(args) -> int:
    if len(args.run_csv) != 3:
        print(
            f"error: exactly 3 runs required, got {len(args.run_csv)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    runs = [_load_run(path) for path in args.run_csv]
    common = [cid for cid in runs[0].counter_ids
              if all(cid in r.counter_ids for r in runs)]
    ids = args.counters if args.counters is not None else common
    missing = [cid for cid in ids if cid not in common]
    if missing:
        raise TraceCsvError(
            f"counter(s) not present in all 3 runs: {', '.join(missing)}"
        )
    if not ids:
        raise TraceCsvError("no common counters across the 3 runs")
    all_series = []
    for cid in ids:
        nibbles = [
            to_nibbles(preprocess_counter(r.get(cid), args.alpha)) for r in runs
        ]
        series = dependence.classify_robustness(
            nibbles,
            counter_id=cid,
            window_len=args.window,
            step=args.step,
            threshold=args.robust_threshold,
        )
        means = " ".join(f"{m:.4f}" for m in series.pair_means)
        print(f"{cid:<24} {series.classification:<6} pair means: {means}")
        all_series.append(series)
    if args.json_out:
        doc = report.build_report(
            run_meta=report.run_metadata(runs[0]),
            alphas=(args.alpha,),
            robustness=all_series,
        )
        _write_json(doc, args.json_out)
    return EXIT_OK


def _cmd_budget(args) -> int:
    run = _load_run(args.in_csv)
    ids = args.counters if args.counters is not None else run.counter_ids
    assessments = [assess_counter(run.get(cid), ROBUST_ALPHAS) for cid in ids]
    b = pipeline.budget(
        assessments,
        alpha=args.alpha,
        sleep_ms=args.sleep_ms,
        collect_ms=args.collect_ms,
    )
    print(
        f"{len(b.selected)} counters: {b.bits_per_cycle:.2f} bits per "
        f"{b.cycle_ms:.0f} ms cycle ({b.bits_per_second:.2f} bits/s)"
    )
    if args.json_out:
        doc = report.build_report(
            run_meta=report.run_metadata(run),
            alphas=(args.alpha,),
            budget=b,
        )
        _write_json(doc, args.json_out)
    return EXIT_OK


def _cmd_plot(args) -> int:
    doc = report.load_report(args.report_json)
    records = doc.get("assessments")
    if not records:
        raise ValueError(f"{args.report_json}: report has no assessments section")
    try:
        points = [
            (r["counter_id"], r["h1_per_bit"], r["hinf_per_bit"]) for r in records
        ]
    except KeyError as exc:
        raise ValueError(
            f"{args.report_json}: assessment record lacks field {exc}"
        ) from None
    Path(args.out_svg).write_text(
        entropy_scatter_svg(points), encoding="utf-8"
    )
    print(f"wrote {args.out_svg}: {len(points)} markers")
    return EXIT_OK


def _cmd_sample(args) -> int:
    from . import sampler

    source = sampler.default_source()
    run, meta = sampler.sample_run(
        source, args.rounds, args.interval_ms, run_id=args.run_id
    )
    Path(args.out_csv).write_bytes(write_wide_csv(run))
    report.dump_report(meta, args.out_csv + ".meta.json")
    print(
        f"wrote {args.out_csv}: {len(run.counters)} counters x {run.n_rounds} "
        f"rounds (mean collect {meta['collect_ms_mean']:.2f} ms, "
        f"{meta['read_failures']} read failures)"
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TraceCsvError, SourceSpecError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except UnsupportedPlatformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PLATFORM
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
