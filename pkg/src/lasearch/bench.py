"""Benchmark orchestration: seeded experiment runners and report emission.

Every runner compares a frequency-augmented structure against its oblivious
baseline on the same items and the same query stream, using deterministic
operation counts (search steps, query depth) as the primary metric.  Wall
clock is recorded alongside for qualitative comparison only; speed-up
factors are always ratios of operation counts.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kdtree, skiplist
from .distributions import (
    ZipfSpec,
    entropy,
    huffman_expected_length,
    sample_queries,
    zipf_pmf,
)
from .oracle import NoiseSpec, ProbabilityVector, apply_noise, empirical_frequencies, normalize
from .workload import QueryTrace, WindowSpec, intersection_index, load_trace, split_windows

__all__ = [
    "BenchConfig",
    "BenchReport",
    "ConfigError",
    "EXPERIMENTS",
    "WALL_CLOCK_FIELDS",
    "default_windows",
    "emit_report",
    "intersection_matrix",
    "load_config_file",
    "make_config",
    "parse_window",
    "run_kdtree_bench",
    "run_robustness_bench",
    "run_skiplist_bench",
    "synthetic_minutes_trace",
]


class ConfigError(ValueError):
    """Invalid or incomplete benchmark configuration."""


EXPERIMENTS = (
    "skiplist-zipf",
    "skiplist-trace",
    "skiplist-robustness",
    "kdtree-zipf",
    "kdtree-noise",
    "kdtree-points",
)

#: report fields that legitimately differ between identical runs
WALL_CLOCK_FIELDS = frozenset(
    {
        "wall_clock_insert_s",
        "wall_clock_query_s",
        "classic_wall_clock_insert_s",
        "classic_wall_clock_query_s",
    }
)


@dataclass
class BenchConfig:
    """Flat experiment description; see ``validate`` for per-experiment needs."""

    experiment: str
    n: int = 4096
    query_count: int = 100_000
    trials: int = 9
    rng_seed: int = 0
    zipf: ZipfSpec | None = None
    noise: NoiseSpec | None = None
    windows: list[WindowSpec] | None = None
    dim: int = 3
    delta: int = 0  # 0 = auto-size the grid to the dataset
    weight_assignment: str = "random"
    promote_p: float = 0.5
    trace_path: str | None = None
    trace_format: str = "lines"
    points_path: str | None = None
    minutes: int = 12
    queries_per_minute: int = 10_000
    output_path: str | None = None

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.query_count < 1:
            raise ConfigError("query_count must be >= 1")
        if not 0.0 < self.promote_p < 1.0:
            raise ConfigError("promote_p must be in (0, 1)")
        if self.weight_assignment not in ("random", "coherent"):
            raise ConfigError(
                f"unknown weight_assignment {self.weight_assignment!r}"
            )
        needs_zipf = {
            "skiplist-zipf",
            "kdtree-zipf",
            "kdtree-noise",
        }
        if self.experiment in needs_zipf and self.zipf is None:
            raise ConfigError(f"{self.experiment} requires zipf_a (and optional zipf_b)")
        if self.experiment == "skiplist-trace" and self.trace_path is None:
            raise ConfigError("skiplist-trace requires trace_path")
        if self.experiment == "kdtree-noise" and self.noise is None:
            raise ConfigError("kdtree-noise requires a noise spec")
        if self.experiment == "kdtree-points" and self.points_path is None:
            raise ConfigError("kdtree-points requires points_path")
        if self.experiment == "skiplist-robustness":
            if self.trace_path is None and self.zipf is None:
                raise ConfigError(
                    "skiplist-robustness needs trace_path or zipf_a for a synthetic trace"
                )
        if self.experiment.startswith("kdtree") and self.dim < 1:
            raise ConfigError("dim must be >= 1")

    def to_dict(self) -> dict:
        out: dict = {
            "experiment": self.experiment,
            "n": self.n,
            "query_count": self.query_count,
            "trials": self.trials,
            "rng_seed": self.rng_seed,
            "dim": self.dim,
            "delta": self.delta,
            "weight_assignment": self.weight_assignment,
            "promote_p": self.promote_p,
            "trace_path": self.trace_path,
            "trace_format": self.trace_format,
            "points_path": self.points_path,
            "minutes": self.minutes,
            "queries_per_minute": self.queries_per_minute,
            "output_path": self.output_path,
        }
        if self.zipf is not None:
            out["zipf_a"] = self.zipf.a
            out["zipf_b"] = self.zipf.b
        if self.noise is not None:
            out["noise_kind"] = self.noise.kind
            out["noise_alpha"] = self.noise.alpha
            out["noise_contaminant"] = self.noise.contaminant
            out["noise_m_max"] = self.noise.m_max
            out["noise_a_max"] = self.noise.a_max
        if self.windows is not None:
            out["windows"] = [
                f"{w.label}:{w.train[0]}-{w.train[1]}:{w.test[0]}-{w.test[1]}:{w.by}"
                for w in self.windows
            ]
        return out


# -- configuration ----------------------------------------------------------

_CONFIG_KEYS = {
    "experiment": str,
    "n": int,
    "query_count": int,
    "trials": int,
    "rng_seed": int,
    "zipf_a": float,
    "zipf_b": float,
    "noise_kind": str,
    "noise_alpha": float,
    "noise_contaminant": str,
    "noise_m_max": float,
    "noise_a_max": float,
    "windows": str,
    "window_unit": str,
    "dim": int,
    "delta": int,
    "weight_assignment": str,
    "promote_p": float,
    "trace_path": str,
    "trace_format": str,
    "points_path": str,
    "minutes": int,
    "queries_per_minute": int,
    "output_path": str,
}


def load_config_file(path) -> dict:
    """Parse a flat ``key = value`` config document (UTF-8, # comments)."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONFIG_KEYS[key](value)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: bad value {value!r} for {key}"
                ) from None
    return values


def parse_window(token: str, unit: str = "minute") -> WindowSpec:
    """Parse ``label:trainLo-trainHi:testLo-testHi`` into a WindowSpec.

    ``unit`` scales the numbers: "minute" and "second" give timestamp
    windows, "index" gives entry-position windows.
    """
    parts = token.strip().split(":")
    if len(parts) == 4:
        unit = parts[3]
        parts = parts[:3]
    if len(parts) != 3:
        raise ConfigError(f"bad window {token!r}; want label:lo-hi:lo-hi")
    label, train_s, test_s = parts
    scale = {"minute": 60, "second": 1, "index": 1, "time": 1}.get(unit)
    if scale is None:
        raise ConfigError(f"unknown window unit {unit!r}")
    by = "index" if unit == "index" else "time"

    def parse_range(text: str) -> tuple[int, int]:
        lo, sep, hi = text.partition("-")
        if not sep:
            raise ConfigError(f"bad range {text!r} in window {token!r}")
        return int(lo) * scale, int(hi) * scale

    try:
        return WindowSpec(label, parse_range(train_s), parse_range(test_s), by=by)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def make_config(values: dict | None = None, **overrides) -> BenchConfig:
    """Assemble a validated BenchConfig from file values and CLI overrides."""
    merged = dict(values or {})
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    if "experiment" not in merged:
        raise ConfigError("experiment is required")

    unit = merged.pop("window_unit", "minute")
    zipf = None
    if "zipf_a" in merged:
        zipf_kwargs = {"a": float(merged.pop("zipf_a"))}
        zipf_kwargs["b"] = float(merged.pop("zipf_b", 0.0))
        zipf = ("pending", zipf_kwargs)
    else:
        merged.pop("zipf_b", None)

    noise = None
    if "noise_kind" in merged:
        try:
            noise = NoiseSpec(
                kind=merged.pop("noise_kind"),
                alpha=merged.pop("noise_alpha", None),
                contaminant=merged.pop("noise_contaminant", "uniform"),
                m_max=merged.pop("noise_m_max", None),
                a_max=merged.pop("noise_a_max", None),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    else:
        for key in ("noise_alpha", "noise_contaminant", "noise_m_max", "noise_a_max"):
            merged.pop(key, None)

    windows = None
    if "windows" in merged:
        raw = merged.pop("windows")
        tokens = raw.split(",") if isinstance(raw, str) else list(raw)
        windows = [parse_window(tok, unit) for tok in tokens if str(tok).strip()]

    try:
        config = BenchConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if zipf is not None:
        try:
            config.zipf = ZipfSpec(n=config.n, **zipf[1])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    config.noise = noise
    config.windows = windows
    config.validate()
    return config


# -- reports ----------------------------------------------------------------


@dataclass
class BenchReport:
    """Per-trial rows plus median aggregates, with a stable column order."""

    experiment: str
    config: dict
    trials: list[dict]
    aggregate: list[dict]
    columns: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.columns and self.trials:
            self.columns = list(self.trials[0].keys())


def _aggregate_rows(rows: list[dict], group_by: str | None = None) -> list[dict]:
    """Median of every numeric column, optionally per group label."""
    groups: dict = {}
    for row in rows:
        groups.setdefault(row.get(group_by) if group_by else None, []).append(row)
    out = []
    for label, members in groups.items():
        agg: dict = {}
        for col in members[0]:
            values = [r[col] for r in members]
            if col == "trial":
                agg[col] = "median"
            elif group_by and col == group_by:
                agg[col] = label
            elif all(isinstance(v, (int, float)) and v is not None for v in values):
                agg[col] = statistics.median(values)
            else:
                agg[col] = ""
        out.append(agg)
    return out


def emit_report(report: BenchReport, format: str = "json") -> bytes:
    """Serialize a report; json is the full nested document, csv is one
    row per trial with a header and empty cells for missing fields."""
    if format == "json":
        doc = {
            "experiment": report.experiment,
            "config": report.config,
            "trials": report.trials,
            "aggregate": report.aggregate,
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.trials:
            writer.writerow(
                ["" if row.get(col) is None else row.get(col, "") for col in report.columns]
            )
        return buf.getvalue().encode("utf-8")
    raise ConfigError(f"unknown report format {format!r}")


# -- shared helpers ----------------------------------------------------------


def _mean_search_cost(lst: skiplist.LearnedSkipList, queries: Sequence):
    search = lst.search
    steps = 0
    comparisons = 0
    t0 = time.perf_counter()
    for key in queries:
        result = search(key)
        steps += result.steps
        comparisons += result.comparisons
    elapsed = time.perf_counter() - t0
    count = len(queries)
    return steps / count, comparisons / count, elapsed


def _skiplist_bound(f: ProbabilityVector, p: ProbabilityVector, n: int) -> float:
    """Reference ceiling 20 + 2 * sum f_i * min(log2(1/p_i), log2 n)."""
    with np.errstate(divide="ignore"):
        inv = np.where(p.probs > 0.0, -np.log2(p.probs), np.inf)
    capped = np.minimum(inv, np.log2(n))
    return 20.0 + 2.0 * float((f.probs * capped).sum())


def _shuffled_zipf(n: int, spec: ZipfSpec, rng: np.random.Generator) -> ProbabilityVector:
    """Zipf masses dealt to keys 0..n-1 in seeded random rank order, so key
    order carries no information about frequency (as in real key spaces)."""
    pmf = zipf_pmf(ZipfSpec(n=n, a=spec.a, b=spec.b)).probs
    probs = np.empty(n)
    probs[rng.permutation(n)] = pmf
    return ProbabilityVector(range(n), probs)




# -- skip list benchmarks ----------------------------------------------------


def run_skiplist_bench(config: BenchConfig) -> BenchReport:
    """Learned vs classic skip list on a synthetic Zipf workload or a trace.

    Per trial: draw the ground-truth vector, corrupt it per the configured
    noise, build both structures over the same sorted items, replay the
    query stream against each, and record step counts next to the entropy
    and Huffman references.  Deterministic given (config, rng_seed).
    """
    config.validate()
    if config.experiment not in ("skiplist-zipf", "skiplist-trace"):
        raise ConfigError(f"not a skip-list experiment: {config.experiment}")
    noise = config.noise or NoiseSpec.perfect()

    trace = None
    if config.experiment == "skiplist-trace":
        trace = load_trace(config.trace_path, config.trace_format)

    rows = []
    for trial in range(config.trials):
        seed = config.rng_seed + trial
        if trace is None:
            n = config.n
            items = list(range(n))
            f = _shuffled_zipf(n, config.zipf, np.random.default_rng(seed))
            queries = sample_queries(f, config.query_count, seed + 0x5EED).entries
        else:
            items = sorted(trace.key_set())
            n = len(items)
            f = empirical_frequencies(trace, items)
            queries = trace.entries[: config.query_count]
        predictions = apply_noise(f, noise, seed + 1)

        # both structures draw their promotion coins from identically seeded
        # streams, so the comparison is paired (common random numbers)
        t0 = time.perf_counter()
        learned = skiplist.build(items, predictions, seed + 2)
        learned_insert_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        classic = skiplist.classic_build(items, config.promote_p, seed + 2)
        classic_insert_s = time.perf_counter() - t0

        mean_steps, mean_cmp, query_s = _mean_search_cost(learned, queries)
        c_steps, c_cmp, c_query_s = _mean_search_cost(classic, queries)

        rows.append(
            {
                "trial": trial,
                "seed": seed,
                "n": n,
                "mean_steps": mean_steps,
                "classic_mean_steps": c_steps,
                "mean_comparisons": mean_cmp,
                "classic_mean_comparisons": c_cmp,
                "num_levels": learned.num_levels,
                "classic_num_levels": classic.num_levels,
                "entropy_reference": entropy(f),
                "huffman_reference": huffman_expected_length(f),
                "bound_value": _skiplist_bound(f, predictions, n),
                "speedup": c_steps / mean_steps,
                "wall_clock_insert_s": learned_insert_s,
                "classic_wall_clock_insert_s": classic_insert_s,
                "wall_clock_query_s": query_s,
                "classic_wall_clock_query_s": c_query_s,
            }
        )
    return BenchReport(config.experiment, config.to_dict(), rows, _aggregate_rows(rows))


# -- KD tree benchmarks -------------------------------------------------------


def _auto_delta(n: int, dim: int) -> int:
    # at least 1024 distinct values per axis so mass splits stay fine-grained,
    # and enough cells that n unique points remain a sparse sample
    delta = 1024
    while delta**dim < 64 * n:
        delta *= 2
    return delta


def _unique_coords(rng: np.random.Generator, n: int, delta: int, dim: int):
    """n distinct grid points drawn uniformly from [1, delta]^dim."""
    if delta**dim < n:
        raise ConfigError(f"grid [1,{delta}]^{dim} has fewer than {n} cells")
    seen: set = set()
    out: list[tuple[int, ...]] = []
    while len(out) < n:
        batch = rng.integers(1, delta + 1, size=(n, dim))
        for row in batch:
            t = tuple(int(v) for v in row)
            if t not in seen:
                seen.add(t)
                out.append(t)
                if len(out) == n:
                    break
    return out


def _assign_weights(
    coords: list[tuple[int, ...]],
    pmf: np.ndarray,
    assignment: str,
    delta: int,
    rng: np.random.Generator,
) -> np.ndarray:
    n = len(coords)
    probs = np.empty(n)
    if assignment == "coherent":
        # hottest ranks cluster around a random anchor point
        arr = np.asarray(coords, dtype=np.float64)
        anchor = rng.integers(1, delta + 1, size=arr.shape[1])
        dist2 = ((arr - anchor) ** 2).sum(axis=1)
        probs[np.argsort(dist2, kind="stable")] = pmf
    else:
        probs[rng.permutation(n)] = pmf
    return probs


def run_kdtree_bench(config: BenchConfig) -> BenchReport:
    """Learned vs classic KD tree average query depth.

    Synthetic modes draw n unique grid points and assign Zipf masses to
    them (randomly, or coherently by distance to an anchor); the points
    mode loads a weighted point file (e.g. binned point-cloud samples).
    The tree is built from noise-corrupted predictions while queries are
    sampled from the ground truth.
    """
    config.validate()
    if not config.experiment.startswith("kdtree"):
        raise ConfigError(f"not a KD experiment: {config.experiment}")
    noise = config.noise or NoiseSpec.perfect()

    file_points = None
    if config.experiment == "kdtree-points":
        file_points = kdtree.load_points(config.points_path)
        if not file_points:
            raise ConfigError(f"no points in {config.points_path}")

    rows = []
    for trial in range(config.trials):
        seed = config.rng_seed + trial
        rng = np.random.default_rng(seed)
        if file_points is None:
            n = config.n
            dim = config.dim
            delta = config.delta or _auto_delta(n, dim)
            coords = _unique_coords(rng, n, delta, dim)
            pmf = zipf_pmf(config.zipf).probs
            f_probs = _assign_weights(
                coords, pmf, config.weight_assignment, delta, rng
            )
        else:
            coords = [p.coords for p in file_points]
            n = len(coords)
            dim = len(coords[0])
            delta = config.delta
            f_probs = normalize([p.prob for p in file_points]).probs
        f = ProbabilityVector(range(n), f_probs)
        predictions = apply_noise(f, noise, seed + 1)
        dataset = [
            kdtree.WeightedPoint(coords[i], float(predictions.probs[i]))
            for i in range(n)
        ]

        t0 = time.perf_counter()
        learned = kdtree.build(dataset)
        learned_insert_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        classic = kdtree.classic_build(dataset)
        classic_insert_s = time.perf_counter() - t0

        key_trace = sample_queries(f, config.query_count, seed + 0x5EED)
        query_pts = [coords[k] for k in key_trace.entries]

        t0 = time.perf_counter()
        mean_depth = kdtree.avg_query_depth(learned, query_pts)
        query_s = time.perf_counter() - t0
        t0 = time.perf_counter()
        c_depth = kdtree.avg_query_depth(classic, query_pts)
        c_query_s = time.perf_counter() - t0

        rows.append(
            {
                "trial": trial,
                "seed": seed,
                "n": n,
                "dim": dim,
                "delta": delta,
                "mean_depth": mean_depth,
                "classic_mean_depth": c_depth,
                "height": learned.height(),
                "classic_height": classic.height(),
                "entropy_reference": entropy(f),
                "huffman_reference": huffman_expected_length(f),
                "speedup": c_depth / mean_depth,
                "wall_clock_insert_s": learned_insert_s,
                "classic_wall_clock_insert_s": classic_insert_s,
                "wall_clock_query_s": query_s,
                "classic_wall_clock_query_s": c_query_s,
            }
        )
    return BenchReport(config.experiment, config.to_dict(), rows, _aggregate_rows(rows))


# -- temporal-window robustness ------------------------------------------------


def synthetic_minutes_trace(
    n: int, spec: ZipfSpec, minutes: int, per_minute: int, rng_seed: int
) -> QueryTrace:
    """Stationary Zipf trace spread uniformly over ``minutes`` of timestamps."""
    pmf = zipf_pmf(ZipfSpec(n=n, a=spec.a, b=spec.b))
    base = sample_queries(pmf, minutes * per_minute, rng_seed)
    timestamps = [
        (i // per_minute) * 60 + (i % per_minute) * 60 // per_minute
        for i in range(len(base))
    ]
    return QueryTrace(base.entries, timestamps)


def default_windows(minutes: int = 12) -> list[WindowSpec]:
    """The four train/test shapes used by the robustness experiments."""
    m = 60
    last2 = ((minutes - 2) * m, minutes * m)
    return [
        WindowSpec("10_2", (0, (minutes - 2) * m), last2, by="time"),
        WindowSpec("2_2", ((minutes - 4) * m, (minutes - 2) * m), last2, by="time"),
        WindowSpec("3_3", (0, 3 * m), (3 * m, 6 * m), by="time"),
        WindowSpec("6_6", (0, (minutes // 2) * m), ((minutes // 2) * m, minutes * m), by="time"),
    ]


def run_robustness_bench(config: BenchConfig) -> BenchReport:
    """History-based oracle vs perfect oracle vs classic, per window.

    The oracle trained on the train window predicts frequencies for the
    test window's key set.  For a synthetic trace the perfect oracle is
    the true generating distribution restricted to those keys; for an
    external trace, where no ground truth exists, it is the test window's
    own empirical frequencies (the realized query stream).  Each row also
    carries the occurrence-weighted intersection index between the two
    windows.
    """
    config.validate()
    if config.experiment != "skiplist-robustness":
        raise ConfigError(f"not a robustness experiment: {config.experiment}")

    windows = config.windows or default_windows(config.minutes)
    rows = []
    for trial in range(config.trials):
        seed = config.rng_seed + trial
        if config.trace_path is not None:
            trace = load_trace(config.trace_path, config.trace_format)
            true_pv = None
        else:
            trace = synthetic_minutes_trace(
                config.n, config.zipf, config.minutes, config.queries_per_minute, seed
            )
            true_pv = zipf_pmf(ZipfSpec(n=config.n, a=config.zipf.a, b=config.zipf.b))
        for spec in windows:
            train, test = split_windows(trace, spec)
            items = sorted(test.key_set())
            if true_pv is None:
                perfect = empirical_frequencies(test, items)
            else:
                perfect = normalize([true_pv.prob_of(k) for k in items], keys=items)
            history = empirical_frequencies(train, items)

            # identically seeded coin streams: the three structures differ
            # only through their promotion floors (paired comparison)
            learned_hist = skiplist.build(items, history, seed + 2)
            learned_perf = skiplist.build(items, perfect, seed + 2)
            classic = skiplist.classic_build(items, config.promote_p, seed + 2)

            hist_steps, _, hist_s = _mean_search_cost(learned_hist, test.entries)
            perf_steps, _, perf_s = _mean_search_cost(learned_perf, test.entries)
            c_steps, _, c_s = _mean_search_cost(classic, test.entries)

            rows.append(
                {
                    "trial": trial,
                    "seed": seed,
                    "window": spec.label,
                    "train_size": len(train),
                    "test_size": len(test),
                    "n": len(items),
                    "history_mean_steps": hist_steps,
                    "perfect_mean_steps": perf_steps,
                    "classic_mean_steps": c_steps,
                    "intersection_index": intersection_index(train, test),
                    "entropy_reference": entropy(perfect),
                    "speedup": c_steps / hist_steps,
                    "wall_clock_query_s": hist_s + perf_s + c_s,
                }
            )
    return BenchReport(
        config.experiment,
        config.to_dict(),
        rows,
        _aggregate_rows(rows, group_by="window"),
    )


def intersection_matrix(trace: QueryTrace, chunks: int = 12):
    """Pairwise intersection indices over trace windows.

    Timestamped traces split into one window per minute; untimed traces
    split into ``chunks`` equal index slices.  Returns (labels, matrix).
    """
    windows: list[QueryTrace] = []
    labels: list[str] = []
    if trace.timestamps is not None:
        first = trace.timestamps[0] // 60
        last = trace.timestamps[-1] // 60
        for minute in range(first, last + 1):
            lo, hi = minute * 60, (minute + 1) * 60
            idx = [i for i, ts in enumerate(trace.timestamps) if lo <= ts < hi]
            if not idx:
                continue
            windows.append(
                QueryTrace(
                    [trace.entries[i] for i in idx],
                    [trace.timestamps[i] for i in idx],
                    trace.key_table,
                )
            )
            labels.append(f"m{minute}")
    else:
        size = max(1, len(trace) // chunks)
        for c in range(chunks):
            lo = c * size
            hi = len(trace) if c == chunks - 1 else (c + 1) * size
            if lo >= hi:
                break
            windows.append(QueryTrace(trace.entries[lo:hi], None, trace.key_table))
            labels.append(f"c{c}")
    k = len(windows)
    matrix = [[0.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            value = intersection_index(windows[i], windows[j])
            matrix[i][j] = value
            matrix[j][i] = value
    return labels, matrix
