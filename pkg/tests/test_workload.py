import pytest
from hypothesis import given
from hypothesis import strategies as st

from lasearch.workload import (
    EmptyTraceError,
    EmptyWindowError,
    OutOfBoundsError,
    QueryTrace,
    TraceParseError,
    WindowSpec,
    bin_points,
    intersection_index,
    load_trace,
    split_windows,
    unique_intersection_index,
)


class TestLoadTrace:
    def test_lines_interning(self):
        trace = load_trace(b"a\na\nb\n", "lines")
        assert trace.entries == (0, 0, 1)
        assert trace.key_table == {"a": 0, "b": 1}
        assert trace.timestamps is None

    def test_csv_with_timestamps(self):
        trace = load_trace(b"timestamp,key\n1,x\n2,y\n", "csv")
        assert len(trace) == 2
        assert trace.timestamps == (1, 2)
        assert trace.entries == (0, 1)

    def test_empty_is_error(self):
        with pytest.raises(EmptyTraceError):
            load_trace(b"", "lines")

    def test_csv_bad_timestamp_reports_line(self):
        with pytest.raises(TraceParseError) as exc:
            load_trace(b"timestamp,key\n1,x\nnope,y\n", "csv")
        assert exc.value.line == 3

    def test_csv_decreasing_timestamps_rejected(self):
        with pytest.raises(TraceParseError):
            load_trace(b"timestamp,key\n5,x\n3,y\n", "csv")

    def test_csv_requires_header(self):
        with pytest.raises(TraceParseError):
            load_trace(b"1,x\n2,y\n", "csv")

    def test_file_source(self, tmp_path):
        path = tmp_path / "trace.txt"
        path.write_bytes(b"q\nr\nq\n")
        trace = load_trace(path, "lines")
        assert trace.entries == (0, 1, 0)


class TestSplitWindows:
    def test_index_split(self):
        trace = QueryTrace(range(12))
        spec = WindowSpec("10_2", (0, 10), (10, 12))
        train, test = split_windows(trace, spec)
        assert len(train) == 10 and len(test) == 2

    def test_timestamp_split(self):
        # 12 synthetic minutes, one entry per minute
        trace = QueryTrace(range(12), [60 * m for m in range(12)])
        spec = WindowSpec("6_6", (0, 6 * 60), (6 * 60, 13 * 60), by="time")
        train, test = split_windows(trace, spec)
        assert len(train) == 6 and len(test) == 6
        assert train.entries == (0, 1, 2, 3, 4, 5)

    def test_empty_window(self):
        trace = QueryTrace(range(5))
        with pytest.raises(EmptyWindowError):
            split_windows(trace, WindowSpec("w", (0, 0), (1, 2)))

    def test_out_of_bounds(self):
        trace = QueryTrace(range(5))
        with pytest.raises(OutOfBoundsError):
            split_windows(trace, WindowSpec("w", (0, 9), (2, 4), allow_overlap=True))

    def test_overlap_rejected_unless_flagged(self):
        trace = QueryTrace(range(10))
        with pytest.raises(ValueError):
            split_windows(trace, WindowSpec("w", (0, 6), (4, 8)))
        train, test = split_windows(
            trace, WindowSpec("w", (0, 6), (4, 8), allow_overlap=True)
        )
        assert len(train) == 6 and len(test) == 4

    @given(st.lists(st.integers(0, 9), min_size=4, max_size=40), st.data())
    def test_windows_are_subsequences(self, entries, data):
        trace = QueryTrace(entries)
        cut1 = data.draw(st.integers(1, len(entries) - 2))
        cut2 = data.draw(st.integers(cut1 + 1, len(entries) - 1))
        train, test = split_windows(trace, WindowSpec("w", (0, cut1), (cut1, cut2)))
        assert train.entries == trace.entries[:cut1]
        assert test.entries == trace.entries[cut1:cut2]


class TestIntersectionIndex:
    def test_occurrence_weighted(self):
        w1 = QueryTrace(["a", "a", "b"])
        w2 = QueryTrace(["a", "c"])
        assert intersection_index(w1, w2) == pytest.approx(0.6)

    def test_identical_windows(self):
        w = QueryTrace(["a", "b", "b"])
        assert intersection_index(w, w) == 1.0

    def test_disjoint(self):
        assert intersection_index(QueryTrace(["a"]), QueryTrace(["b"])) == 0.0

    def test_unique_variant(self):
        w1 = QueryTrace(["a", "a", "b"])
        w2 = QueryTrace(["a", "c"])
        assert unique_intersection_index(w1, w2) == pytest.approx(1 / 3)

    @given(
        st.lists(st.integers(0, 5), min_size=1, max_size=30),
        st.lists(st.integers(0, 5), min_size=1, max_size=30),
    )
    def test_symmetric_and_bounded(self, e1, e2):
        w1, w2 = QueryTrace(e1), QueryTrace(e2)
        value = intersection_index(w1, w2)
        assert value == intersection_index(w2, w1)
        assert 0.0 <= value <= 1.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyTraceError):
            intersection_index(QueryTrace([]), QueryTrace(["a"]))


class TestBinPoints:
    def test_merging(self):
        bins = bin_points([(0.1, 0.2), (5, 5)], 10)
        assert bins == [((0, 0), 2)]

    def test_floor_division(self):
        assert bin_points([(15, 0)], 10) == [((1, 0), 1)]

    def test_negative_coords(self):
        assert bin_points([(-0.5, 3)], 1.0) == [((-1, 3), 1)]

    @given(
        st.lists(
            st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
            min_size=1,
            max_size=60,
        ),
        st.floats(min_value=0.5, max_value=20),
    )
    def test_conserves_count_and_idempotent(self, points, resolution):
        bins = bin_points(points, resolution)
        assert sum(count for _, count in bins) == len(points)
        rebinned = bin_points([coords for coords, _ in bins], 1.0)
        assert [coords for coords, _ in rebinned] == [coords for coords, _ in bins]

    def test_resolution_validation(self):
        with pytest.raises(ValueError):
            bin_points([(1.0,)], 0.0)
