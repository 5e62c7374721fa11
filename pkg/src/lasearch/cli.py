"""Command-line benchmark harness.

Subcommands mirror the experiments: ``gen-zipf`` writes a frequency
vector, ``bench-skiplist``/``bench-kdtree``/``bench-robustness`` run the
comparisons, ``analyze-trace`` emits the window-overlap matrix, and
``bin-points`` converts raw point clouds to weighted grid points.  All
runs are seeded and reproducible; ``--plot`` additionally renders a PNG
figure next to the delimited output.

Exit codes: 0 on success, 1 on configuration errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import bench, kdtree
from .bench import ConfigError, emit_report, load_config_file, make_config
from .distributions import ZipfSpec, zipf_pmf
from .oracle import normalize
from .workload import bin_points, load_trace

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 1
        raise ConfigError(message)


def _add_common(parser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seed", type=int, default=None, help="base RNG seed")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument(
        "--plot",
        action="store_true",
        help="also render a PNG figure next to --out",
    )


def _write_output(data: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
    else:
        Path(out).write_bytes(data)


def _plot_path(out: str) -> str:
    return str(Path(out).with_suffix(".png"))


def _maybe_plot_report(args, report) -> None:
    if not args.plot:
        return
    if args.out is None:
        raise ConfigError("--plot requires --out to name the figure file")
    from . import plots

    plots.save_figure(plots.plot_report(report), _plot_path(args.out))


def _run_bench(args, experiment: str, extra: dict) -> int:
    values = load_config_file(args.config) if args.config else {}
    overrides = {
        "experiment": experiment,
        "rng_seed": args.seed,
        "trials": args.trials,
        "output_path": args.out,
        **extra,
    }
    config = make_config(values, **overrides)
    runner = {
        "skiplist-zipf": bench.run_skiplist_bench,
        "skiplist-trace": bench.run_skiplist_bench,
        "skiplist-robustness": bench.run_robustness_bench,
        "kdtree-zipf": bench.run_kdtree_bench,
        "kdtree-noise": bench.run_kdtree_bench,
        "kdtree-points": bench.run_kdtree_bench,
    }[config.experiment]
    report = runner(config)
    _write_output(emit_report(report, args.format), args.out)
    _maybe_plot_report(args, report)
    return 0


def _noise_overrides(args) -> dict:
    return {
        "noise_kind": args.noise,
        "noise_alpha": args.alpha,
        "noise_contaminant": args.contaminant,
        "noise_m_max": args.m_max,
        "noise_a_max": args.a_max,
    }


def _cmd_gen_zipf(args) -> int:
    spec = ZipfSpec(n=args.n, a=args.a, b=args.b)
    pv = zipf_pmf(spec)
    buf = io.StringIO()
    pv.to_csv(buf)
    _write_output(buf.getvalue().encode("utf-8"), args.out)
    if args.plot:
        if args.out is None:
            raise ConfigError("--plot requires --out to name the figure file")
        from . import plots

        plots.save_figure(plots.plot_probability_vector(pv), _plot_path(args.out))
    return 0


def _cmd_bench_skiplist(args) -> int:
    experiment = "skiplist-trace" if args.trace else "skiplist-zipf"
    extra = {
        "n": args.n,
        "query_count": args.queries,
        "zipf_a": args.a,
        "zipf_b": args.b,
        "promote_p": args.promote_p,
        "trace_path": args.trace,
        "trace_format": args.trace_format,
        **_noise_overrides(args),
    }
    return _run_bench(args, experiment, extra)


def _cmd_bench_kdtree(args) -> int:
    if args.points:
        experiment = "kdtree-points"
    elif args.noise not in (None, "perfect"):
        experiment = "kdtree-noise"
    else:
        experiment = "kdtree-zipf"
    extra = {
        "n": args.n,
        "query_count": args.queries,
        "zipf_a": args.a,
        "zipf_b": args.b,
        "dim": args.dim,
        "delta": args.delta,
        "weight_assignment": args.assignment,
        "points_path": args.points,
        **_noise_overrides(args),
    }
    return _run_bench(args, experiment, extra)


def _cmd_bench_robustness(args) -> int:
    extra = {
        "n": args.n,
        "zipf_a": args.a,
        "zipf_b": args.b,
        "minutes": args.minutes,
        "queries_per_minute": args.per_minute,
        "trace_path": args.trace,
        "trace_format": args.trace_format,
        "promote_p": args.promote_p,
    }
    if args.window:
        extra["windows"] = args.window
        extra["window_unit"] = args.window_unit
    return _run_bench(args, "skiplist-robustness", extra)


def _cmd_analyze_trace(args) -> int:
    trace = load_trace(args.input, args.trace_format)
    labels, matrix = bench.intersection_matrix(trace, chunks=args.chunks)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["window"] + labels)
    for label, row in zip(labels, matrix):
        writer.writerow([label] + [repr(v) for v in row])
    _write_output(buf.getvalue().encode("utf-8"), args.out)
    if args.plot:
        if args.out is None:
            raise ConfigError("--plot requires --out to name the figure file")
        from . import plots

        plots.save_figure(
            plots.plot_intersection_matrix(labels, matrix), _plot_path(args.out)
        )
    return 0


def _cmd_bin_points(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    start = 1 if rows and not _is_numeric_row(rows[0]) else 0
    points = [[float(v) for v in row] for row in rows[start:] if row]
    if not points:
        raise ConfigError(f"no points in {args.input}")
    bins = bin_points(points, args.resolution)
    weights = normalize([count for _, count in bins])
    weighted = [
        kdtree.WeightedPoint(coords, float(weights.probs[i]))
        for i, (coords, _) in enumerate(bins)
    ]
    buf = io.StringIO()
    kdtree.save_points(weighted, buf)
    _write_output(buf.getvalue().encode("utf-8"), args.out)
    return 0


def _is_numeric_row(row) -> bool:
    try:
        [float(v) for v in row]
        return True
    except ValueError:
        return False


def build_parser() -> _Parser:
    parser = _Parser(prog="lasearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-zipf", help="write a Zipf frequency vector as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=_cmd_gen_zipf)

    p = sub.add_parser("bench-skiplist", help="learned vs classic skip list")
    _add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--a", type=float, default=None, help="Zipf exponent (0 = uniform)")
    p.add_argument("--b", type=float, default=None, help="Zipf rank shift")
    p.add_argument("--queries", type=int, default=None)
    p.add_argument("--promote-p", dest="promote_p", type=float, default=None)
    p.add_argument("--trace", default=None, help="replay this trace instead of Zipf data")
    p.add_argument("--trace-format", choices=("lines", "csv"), default=None)
    p.add_argument("--noise", choices=("perfect", "mix", "scale", "adversarial"), default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--contaminant", choices=("uniform", "reversed"), default=None)
    p.add_argument("--m-max", dest="m_max", type=float, default=None)
    p.add_argument("--a-max", dest="a_max", type=float, default=None)
    p.set_defaults(func=_cmd_bench_skiplist)

    p = sub.add_parser("bench-kdtree", help="learned vs classic KD tree")
    _add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--queries", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--delta", type=int, default=None, help="grid side (default auto)")
    p.add_argument("--assignment", choices=("random", "coherent"), default=None)
    p.add_argument("--points", default=None, help="weighted point CSV (skips Zipf synthesis)")
    p.add_argument("--noise", choices=("perfect", "mix", "scale", "adversarial"), default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--contaminant", choices=("uniform", "reversed"), default=None)
    p.add_argument("--m-max", dest="m_max", type=float, default=None)
    p.add_argument("--a-max", dest="a_max", type=float, default=None)
    p.set_defaults(func=_cmd_bench_kdtree)

    p = sub.add_parser(
        "bench-robustness", help="history-based oracle over temporal windows"
    )
    _add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--minutes", type=int, default=None)
    p.add_argument("--per-minute", dest="per_minute", type=int, default=None)
    p.add_argument("--promote-p", dest="promote_p", type=float, default=None)
    p.add_argument("--trace", default=None)
    p.add_argument("--trace-format", choices=("lines", "csv"), default=None)
    p.add_argument(
        "--window",
        action="append",
        default=None,
        help="label:trainLo-trainHi:testLo-testHi (repeatable)",
    )
    p.add_argument("--window-unit", choices=("minute", "second", "index"), default="minute")
    p.set_defaults(func=_cmd_bench_robustness)

    p = sub.add_parser("analyze-trace", help="intersection-index matrix over windows")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trace-format", choices=("lines", "csv"), default="lines")
    p.add_argument("--chunks", type=int, default=12, help="window count for untimed traces")
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=_cmd_analyze_trace)

    p = sub.add_parser("bin-points", help="bin raw points into weighted grid cells")
    p.add_argument("--in", dest="input", required=True, help="CSV of real coordinates")
    p.add_argument("--resolution", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bin_points)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # every domain validation error (ConfigError, trace/window/spec
        # errors) is a ValueError: bad inputs exit 1, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
