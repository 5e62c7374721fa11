import csv
import io
import json

import pytest

from lasearch.bench import (
    ConfigError,
    WALL_CLOCK_FIELDS,
    default_windows,
    emit_report,
    intersection_matrix,
    load_config_file,
    make_config,
    parse_window,
    run_kdtree_bench,
    run_robustness_bench,
    run_skiplist_bench,
    synthetic_minutes_trace,
)
from lasearch.distributions import ZipfSpec
from lasearch.workload import QueryTrace


def strip_wall_clock(report_doc):
    doc = json.loads(json.dumps(report_doc))
    for row in doc["trials"] + doc["aggregate"]:
        for field in WALL_CLOCK_FIELDS:
            row.pop(field, None)
    return doc


def small_skiplist_config(**overrides):
    base = dict(
        experiment="skiplist-zipf",
        n=256,
        query_count=3000,
        trials=2,
        rng_seed=7,
        zipf_a=1.5,
    )
    base.update(overrides)
    return make_config(**base)


class TestConfig:
    def test_file_parse_and_overrides(self, tmp_path):
        path = tmp_path / "bench.cfg"
        path.write_text(
            "# skip list sweep\n"
            "experiment = skiplist-zipf\n"
            "n = 128\n"
            "zipf_a = 1.5\n"
            "trials = 3\n",
            encoding="utf-8",
        )
        values = load_config_file(path)
        config = make_config(values, trials=5, rng_seed=9)
        assert config.n == 128
        assert config.trials == 5  # CLI override wins
        assert config.rng_seed == 9
        assert config.zipf == ZipfSpec(n=128, a=1.5)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("experiment = skiplist-zipf\nwavelength = 9\n")
        with pytest.raises(ConfigError):
            load_config_file(path)

    def test_missing_required_fields(self):
        with pytest.raises(ConfigError):
            make_config(experiment="skiplist-zipf")  # no zipf_a
        with pytest.raises(ConfigError):
            make_config(experiment="skiplist-trace")  # no trace_path
        with pytest.raises(ConfigError):
            make_config(experiment="kdtree-points")  # no points_path
        with pytest.raises(ConfigError):
            make_config(experiment="nonsense")

    def test_noise_assembled(self):
        config = make_config(
            experiment="skiplist-zipf",
            zipf_a=1.0,
            noise_kind="mix",
            noise_alpha=0.5,
        )
        assert config.noise.kind == "mix"
        assert config.noise.alpha == 0.5

    def test_parse_window(self):
        spec = parse_window("10_2:0-10:10-12", unit="minute")
        assert spec.label == "10_2"
        assert spec.train == (0, 600)
        assert spec.test == (600, 720)
        assert spec.by == "time"
        idx = parse_window("w:0-100:100-150:index")
        assert idx.by == "index" and idx.train == (0, 100)

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            make_config(experiment="skiplist-zipf", zipf_a=1.0, trials=0)
        with pytest.raises(ConfigError):
            make_config(experiment="skiplist-zipf", zipf_a=1.0, promote_p=1.5)


class TestSkiplistBench:
    def test_report_shape_and_determinism(self):
        report_a = run_skiplist_bench(small_skiplist_config())
        report_b = run_skiplist_bench(small_skiplist_config())
        assert len(report_a.trials) == 2
        doc_a = strip_wall_clock(
            json.loads(emit_report(report_a, "json").decode("utf-8"))
        )
        doc_b = strip_wall_clock(
            json.loads(emit_report(report_b, "json").decode("utf-8"))
        )
        assert doc_a == doc_b

    def test_entropy_sandwich(self):
        # perfect-oracle mean steps sit between H(f) - 0.1 and bound + 1
        report = run_skiplist_bench(small_skiplist_config(trials=3))
        for row in report.trials:
            assert row["mean_steps"] >= row["entropy_reference"] - 0.1
            assert row["mean_steps"] <= row["bound_value"] + 1.0
            assert row["speedup"] > 0

    def test_noise_flows_through(self):
        noisy = run_skiplist_bench(
            small_skiplist_config(noise_kind="adversarial", trials=1)
        )
        perfect = run_skiplist_bench(small_skiplist_config(trials=1))
        assert noisy.trials[0]["mean_steps"] > perfect.trials[0]["mean_steps"]

    def test_trace_experiment(self, tmp_path):
        path = tmp_path / "trace.txt"
        path.write_text("a\nb\na\na\nc\n" * 40, encoding="utf-8")
        config = make_config(
            experiment="skiplist-trace",
            trace_path=str(path),
            query_count=200,
            trials=1,
        )
        report = run_skiplist_bench(config)
        assert report.trials[0]["n"] == 3

    def test_aggregate_is_median(self):
        report = run_skiplist_bench(small_skiplist_config(trials=3))
        values = sorted(row["mean_steps"] for row in report.trials)
        assert report.aggregate[0]["mean_steps"] == values[1]


class TestKdtreeBench:
    def test_uniform_parity_small(self):
        config = make_config(
            experiment="kdtree-zipf",
            n=512,
            query_count=4000,
            trials=1,
            rng_seed=3,
            zipf_a=0.0,
            dim=2,
        )
        row = run_kdtree_bench(config).trials[0]
        assert abs(row["mean_depth"] - row["classic_mean_depth"]) <= 0.5

    def test_determinism(self):
        config = dict(
            experiment="kdtree-zipf",
            n=128,
            query_count=1000,
            trials=2,
            rng_seed=5,
            zipf_a=1.0,
            zipf_b=2.7,
            dim=3,
        )
        a = run_kdtree_bench(make_config(**config))
        b = run_kdtree_bench(make_config(**config))
        assert strip_wall_clock(
            json.loads(emit_report(a, "json").decode())
        ) == strip_wall_clock(json.loads(emit_report(b, "json").decode()))

    def test_points_experiment(self, tmp_path):
        from lasearch.kdtree import WeightedPoint, save_points

        path = tmp_path / "points.csv"
        save_points(
            [WeightedPoint((i, i % 3), 1 / 16) for i in range(16)], path
        )
        config = make_config(
            experiment="kdtree-points",
            points_path=str(path),
            query_count=500,
            trials=1,
        )
        row = run_kdtree_bench(config).trials[0]
        assert row["n"] == 16
        assert row["mean_depth"] > 0

    def test_coherent_assignment_runs(self):
        config = make_config(
            experiment="kdtree-zipf",
            n=256,
            query_count=2000,
            trials=1,
            rng_seed=8,
            zipf_a=2.0,
            dim=2,
            weight_assignment="coherent",
        )
        row = run_kdtree_bench(config).trials[0]
        assert row["mean_depth"] < row["classic_mean_depth"]

    def test_scale_noise_still_beats_classic_mildly(self):
        config = make_config(
            experiment="kdtree-noise",
            n=256,
            query_count=3000,
            trials=1,
            rng_seed=4,
            zipf_a=2.0,
            dim=2,
            noise_kind="scale",
            noise_m_max=4.0,
            noise_a_max=0.0001,
        )
        row = run_kdtree_bench(config).trials[0]
        # moderate noise: never materially worse than the oblivious tree
        assert row["mean_depth"] <= row["classic_mean_depth"] + 0.5


class TestRobustnessBench:
    def test_synthetic_windows(self):
        config = make_config(
            experiment="skiplist-robustness",
            n=128,
            zipf_a=1.5,
            trials=1,
            rng_seed=2,
            minutes=12,
            queries_per_minute=400,
        )
        report = run_robustness_bench(config)
        labels = [row["window"] for row in report.trials]
        assert labels == ["10_2", "2_2", "3_3", "6_6"]
        for row in report.trials:
            assert 0.0 <= row["intersection_index"] <= 1.0
            assert row["history_mean_steps"] > 0
        # stationary trace: the history oracle is close to perfect
        for row in report.trials:
            assert row["history_mean_steps"] <= 1.2 * row["perfect_mean_steps"]

    def test_aggregate_grouped_by_window(self):
        config = make_config(
            experiment="skiplist-robustness",
            n=64,
            zipf_a=1.5,
            trials=2,
            rng_seed=0,
            minutes=6,
            queries_per_minute=200,
            windows="3_3:0-3:3-6",
        )
        report = run_robustness_bench(config)
        assert len(report.trials) == 2
        assert len(report.aggregate) == 1
        assert report.aggregate[0]["window"] == "3_3"

    def test_csv_emission_keeps_window_column(self):
        config = make_config(
            experiment="skiplist-robustness",
            n=64,
            zipf_a=1.5,
            trials=1,
            rng_seed=1,
            minutes=6,
            queries_per_minute=200,
            windows="h1:0-3:3-6",
        )
        text = emit_report(run_robustness_bench(config), "csv").decode("utf-8")
        parsed = next(csv.DictReader(io.StringIO(text)))
        assert parsed["window"] == "h1"
        assert float(parsed["intersection_index"]) > 0


class TestEmitReport:
    def test_json_round_trip_exact(self):
        report = run_skiplist_bench(small_skiplist_config(trials=1))
        doc = json.loads(emit_report(report, "json").decode("utf-8"))
        assert doc["trials"][0]["mean_steps"] == report.trials[0]["mean_steps"]
        assert doc["config"]["n"] == 256

    def test_csv_row_count(self):
        report = run_skiplist_bench(small_skiplist_config(trials=2))
        text = emit_report(report, "csv").decode("utf-8")
        rows = text.strip().split("\n")
        assert len(rows) == 2 + 1  # trials + header

    def test_csv_missing_fields_empty_not_omitted(self):
        report = run_skiplist_bench(small_skiplist_config(trials=1))
        report.columns = report.columns + ["not_recorded"]
        text = emit_report(report, "csv").decode("utf-8")
        header, row = text.strip().split("\n")
        assert header.endswith(",not_recorded")
        assert row.endswith(",")
        parsed = next(csv.DictReader(io.StringIO(text)))
        assert parsed["not_recorded"] == ""

    def test_unknown_format(self):
        report = run_skiplist_bench(small_skiplist_config(trials=1))
        with pytest.raises(ConfigError):
            emit_report(report, "xml")


class TestIntersectionMatrix:
    def test_minute_windows(self):
        trace = synthetic_minutes_trace(64, ZipfSpec(n=64, a=1.5), 4, 300, 1)
        labels, matrix = intersection_matrix(trace)
        assert len(labels) == 4
        for i in range(4):
            assert matrix[i][i] == 1.0
            for j in range(4):
                assert matrix[i][j] == matrix[j][i]

    def test_index_chunks(self):
        trace = QueryTrace([i % 5 for i in range(100)])
        labels, matrix = intersection_matrix(trace, chunks=4)
        assert len(labels) == 4
        assert matrix[0][0] == 1.0


class TestSyntheticTrace:
    def test_timestamps_span_minutes(self):
        trace = synthetic_minutes_trace(32, ZipfSpec(n=32, a=1.0), 12, 100, 0)
        assert len(trace) == 1200
        assert trace.timestamps[0] == 0
        assert trace.timestamps[-1] < 12 * 60
        minutes = {ts // 60 for ts in trace.timestamps}
        assert minutes == set(range(12))

    def test_default_windows_cover_standard_shapes(self):
        windows = default_windows(12)
        assert [w.label for w in windows] == ["10_2", "2_2", "3_3", "6_6"]
        assert windows[0].train == (0, 600)
        assert windows[0].test == (600, 720)
