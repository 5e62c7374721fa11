import csv
import json

import pytest

from lasearch.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestGenZipf:
    def test_writes_vector_csv(self, tmp_path):
        out = tmp_path / "zipf.csv"
        assert run_cli("gen-zipf", "--n", "4", "--a", "1.0", "--out", str(out)) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["key", "prob"]
        assert len(rows) == 5
        probs = [float(r[1]) for r in rows[1:]]
        assert probs == sorted(probs, reverse=True)

    def test_plot_written(self, tmp_path):
        out = tmp_path / "zipf.csv"
        assert run_cli(
            "gen-zipf", "--n", "8", "--a", "1.5", "--out", str(out), "--plot"
        ) == 0
        assert (tmp_path / "zipf.png").stat().st_size > 0

    def test_stdout_default(self, capsys):
        assert run_cli("gen-zipf", "--n", "2", "--a", "1.0") == 0


class TestBenchSkiplist:
    def test_json_report(self, tmp_path):
        out = tmp_path / "report.json"
        code = run_cli(
            "bench-skiplist",
            "--n", "64",
            "--a", "1.5",
            "--queries", "500",
            "--trials", "1",
            "--seed", "3",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["experiment"] == "skiplist-zipf"
        assert len(doc["trials"]) == 1

    def test_csv_format_and_plot(self, tmp_path):
        out = tmp_path / "report.csv"
        code = run_cli(
            "bench-skiplist",
            "--n", "64",
            "--a", "1.5",
            "--queries", "500",
            "--trials", "2",
            "--out", str(out),
            "--format", "csv",
            "--plot",
        )
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert len(rows) == 3
        assert (tmp_path / "report.png").stat().st_size > 0

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "experiment = skiplist-zipf\nn = 32\nzipf_a = 2.0\n"
            "query_count = 200\ntrials = 1\n"
        )
        out = tmp_path / "r.json"
        assert run_cli("bench-skiplist", "--config", str(cfg), "--out", str(out)) == 0
        assert json.loads(out.read_text())["config"]["n"] == 32

    def test_missing_distribution_is_config_error(self, capsys):
        assert run_cli("bench-skiplist", "--n", "64") == 1
        assert "error" in capsys.readouterr().err

    def test_unwritable_out_is_io_error(self, tmp_path, capsys):
        missing_dir = tmp_path / "no" / "such" / "dir" / "x.json"
        code = run_cli(
            "bench-skiplist",
            "--n", "32",
            "--a", "1.0",
            "--queries", "100",
            "--trials", "1",
            "--out", str(missing_dir),
        )
        assert code == 2

    def test_bad_flag_is_config_error(self):
        assert run_cli("bench-skiplist", "--wavelength", "9") == 1


class TestBenchKdtree:
    def test_runs_small(self, tmp_path):
        out = tmp_path / "kd.json"
        code = run_cli(
            "bench-kdtree",
            "--n", "64",
            "--a", "1.0",
            "--b", "2.7",
            "--dim", "2",
            "--queries", "400",
            "--trials", "1",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["experiment"] == "kdtree-zipf"
        assert doc["trials"][0]["mean_depth"] > 0

    def test_noise_switches_experiment(self, tmp_path):
        out = tmp_path / "kd.json"
        code = run_cli(
            "bench-kdtree",
            "--n", "64", "--a", "1.0", "--dim", "2",
            "--queries", "300", "--trials", "1",
            "--noise", "scale", "--m-max", "8", "--a-max", "0.1",
            "--out", str(out),
        )
        assert code == 0
        assert json.loads(out.read_text())["experiment"] == "kdtree-noise"


class TestBenchRobustness:
    def test_synthetic_run(self, tmp_path):
        out = tmp_path / "rob.json"
        code = run_cli(
            "bench-robustness",
            "--n", "64",
            "--a", "1.5",
            "--minutes", "12",
            "--per-minute", "200",
            "--trials", "1",
            "--out", str(out),
            "--plot",
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert {row["window"] for row in doc["trials"]} == {"10_2", "2_2", "3_3", "6_6"}
        assert (tmp_path / "rob.png").exists()

    def test_explicit_windows(self, tmp_path):
        out = tmp_path / "rob.json"
        code = run_cli(
            "bench-robustness",
            "--n", "32", "--a", "1.0",
            "--minutes", "6", "--per-minute", "100",
            "--trials", "1",
            "--window", "half:0-3:3-6",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert [row["window"] for row in doc["trials"]] == ["half"]


class TestAnalyzeTrace:
    def test_matrix_csv(self, tmp_path):
        trace = tmp_path / "trace.csv"
        lines = ["timestamp,key"]
        for minute in range(3):
            for i in range(40):
                lines.append(f"{minute * 60 + i},k{i % 7}")
        trace.write_text("\n".join(lines) + "\n")
        out = tmp_path / "matrix.csv"
        code = run_cli(
            "analyze-trace",
            "--in", str(trace),
            "--trace-format", "csv",
            "--out", str(out),
            "--plot",
        )
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["window", "m0", "m1", "m2"]
        assert float(rows[1][1]) == 1.0  # unit diagonal
        assert (tmp_path / "matrix.png").exists()


class TestBinPoints:
    def test_bins_to_weighted_points(self, tmp_path):
        raw = tmp_path / "cloud.csv"
        raw.write_text("x1,x2\n0.1,0.2\n5,5\n15,0\n")
        out = tmp_path / "binned.csv"
        code = run_cli(
            "bin-points", "--in", str(raw), "--resolution", "10", "--out", str(out)
        )
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["x1", "x2", "prob", "is_data"]
        assert len(rows) == 3  # bins (0,0) and (1,0)
        probs = sorted(float(r[2]) for r in rows[1:])
        assert probs == pytest.approx([1 / 3, 2 / 3])

    def test_headerless_input(self, tmp_path):
        raw = tmp_path / "cloud.csv"
        raw.write_text("0.5,0.5\n0.6,0.6\n")
        out = tmp_path / "binned.csv"
        assert run_cli(
            "bin-points", "--in", str(raw), "--resolution", "1", "--out", str(out)
        ) == 0
        rows = list(csv.reader(out.open()))
        assert len(rows) == 2
