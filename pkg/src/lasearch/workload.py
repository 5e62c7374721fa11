"""Query-trace ingestion, temporal windowing, and point binning.

Traces drive the history-based-oracle experiments: an early window trains
the frequency oracle, a later window is replayed as the query stream, and
the intersection index quantifies how much the two windows share.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "EmptyTraceError",
    "EmptyWindowError",
    "OutOfBoundsError",
    "QueryTrace",
    "TraceParseError",
    "WindowSpec",
    "bin_points",
    "intersection_index",
    "load_trace",
    "split_windows",
    "unique_intersection_index",
]


class TraceParseError(ValueError):
    """Malformed trace input; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyTraceError(ValueError):
    """The trace holds no entries."""


class OutOfBoundsError(ValueError):
    """A window range falls outside the trace."""


class EmptyWindowError(ValueError):
    """A window selects no entries."""


class QueryTrace:
    """Ordered stream of query keys, optionally timestamped.

    Entries are opaque keys (dense ints after loading, or coordinate
    tuples for KD traces).  Timestamps, when present, are nondecreasing
    integer seconds.  Immutable after construction.
    """

    __slots__ = ("entries", "timestamps", "key_table")

    def __init__(
        self,
        entries: Iterable,
        timestamps: Iterable[int] | None = None,
        key_table: dict | None = None,
    ):
        self.entries = tuple(entries)
        if timestamps is not None:
            timestamps = tuple(timestamps)
            if len(timestamps) != len(self.entries):
                raise ValueError("timestamps must align with entries")
            for a, b in zip(timestamps, timestamps[1:]):
                if b < a:
                    raise ValueError("timestamps must be nondecreasing")
        self.timestamps = timestamps
        self.key_table = dict(key_table) if key_table else None

    def __len__(self) -> int:
        return len(self.entries)

    def key_set(self) -> frozenset:
        return frozenset(self.entries)

    def __repr__(self) -> str:
        ts = "timestamped" if self.timestamps is not None else "untimed"
        return f"QueryTrace({len(self)} entries, {ts})"


def _decode(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    with open(source, "rb") as fh:
        return fh.read().decode("utf-8")


def load_trace(source, format: str = "lines") -> QueryTrace:
    """Parse a trace from bytes, a stream, or a path.

    ``lines`` format is one key per line.  ``csv`` format is
    ``timestamp,key`` rows under that header, timestamps in integer
    seconds.  Keys are opaque strings interned to dense integer ids in
    first-seen order; the mapping is kept on the trace's ``key_table``.
    """
    text = _decode(source)
    table: dict[str, int] = {}
    entries: list[int] = []

    def intern(raw: str) -> int:
        if raw not in table:
            table[raw] = len(table)
        return table[raw]

    if format == "lines":
        for lineno, raw in enumerate(text.split("\n"), start=1):
            if raw == "":
                continue  # blank line (incl. trailing LF)
            entries.append(intern(raw))
        timestamps = None
    elif format == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise EmptyTraceError("empty csv trace")
        header = [h.strip().lower() for h in rows[0]]
        if header != ["timestamp", "key"]:
            raise TraceParseError("expected header 'timestamp,key'", 1)
        timestamps = []
        prev = None
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 2:
                raise TraceParseError(f"expected 2 fields, got {len(row)}", lineno)
            try:
                ts = int(row[0])
            except ValueError:
                raise TraceParseError(f"bad timestamp {row[0]!r}", lineno) from None
            if prev is not None and ts < prev:
                raise TraceParseError("timestamps decrease", lineno)
            prev = ts
            timestamps.append(ts)
            entries.append(intern(row[1]))
    else:
        raise ValueError(f"unknown trace format {format!r}")

    if not entries:
        raise EmptyTraceError("trace holds no entries")
    return QueryTrace(entries, timestamps, table)


@dataclass(frozen=True)
class WindowSpec:
    """Train/test ranges over a trace, by entry index or by timestamp.

    Ranges are half-open [start, end).  ``by`` selects the interpretation:
    "index" slices entry positions, "time" filters on timestamps.
    Overlapping train/test ranges are rejected unless ``allow_overlap``.
    """

    label: str
    train: tuple[int, int]
    test: tuple[int, int]
    by: str = "index"
    allow_overlap: bool = False

    def __post_init__(self):
        if self.by not in ("index", "time"):
            raise ValueError(f"unknown window mode {self.by!r}")
        for lo, hi in (self.train, self.test):
            if hi < lo:
                raise ValueError(f"window range [{lo}, {hi}) is inverted")


def _slice_trace(trace: QueryTrace, lo: int, hi: int, by: str) -> QueryTrace:
    if by == "index":
        if lo < 0 or hi > len(trace):
            raise OutOfBoundsError(
                f"index range [{lo}, {hi}) outside trace of {len(trace)}"
            )
        entries = trace.entries[lo:hi]
        timestamps = (
            trace.timestamps[lo:hi] if trace.timestamps is not None else None
        )
    else:
        if trace.timestamps is None:
            raise OutOfBoundsError("trace has no timestamps for a time window")
        idx = [i for i, ts in enumerate(trace.timestamps) if lo <= ts < hi]
        entries = tuple(trace.entries[i] for i in idx)
        timestamps = tuple(trace.timestamps[i] for i in idx)
    if not entries:
        raise EmptyWindowError(f"window [{lo}, {hi}) selects no entries")
    return QueryTrace(entries, timestamps, trace.key_table)


def split_windows(trace: QueryTrace, spec: WindowSpec):
    """Cut (train, test) sub-traces out of a trace, preserving order."""
    if not spec.allow_overlap:
        t_lo, t_hi = spec.train
        s_lo, s_hi = spec.test
        if max(t_lo, s_lo) < min(t_hi, s_hi):
            raise ValueError(
                f"train {spec.train} and test {spec.test} overlap; "
                "set allow_overlap to permit this"
            )
    train = _slice_trace(trace, *spec.train, spec.by)
    test = _slice_trace(trace, *spec.test, spec.by)
    return train, test


def intersection_index(w1: QueryTrace, w2: QueryTrace) -> float:
    """Occurrence-weighted overlap between two windows, in [0, 1].

    With S the keys appearing in both windows, this is the share of all
    window entries whose key lies in S.  Weighting by occurrences (rather
    than unique keys) makes the index reflect traffic volume; see
    :func:`unique_intersection_index` for the unweighted variant.
    """
    if len(w1) == 0 or len(w2) == 0:
        raise EmptyTraceError("intersection index needs non-empty windows")
    c1 = Counter(w1.entries)
    c2 = Counter(w2.entries)
    shared = c1.keys() & c2.keys()
    hits = sum(c1[k] for k in shared) + sum(c2[k] for k in shared)
    return hits / (len(w1) + len(w2))


def unique_intersection_index(w1: QueryTrace, w2: QueryTrace) -> float:
    """Jaccard overlap of the two windows' key sets."""
    if len(w1) == 0 or len(w2) == 0:
        raise EmptyTraceError("intersection index needs non-empty windows")
    s1, s2 = w1.key_set(), w2.key_set()
    return len(s1 & s2) / len(s1 | s2)


def bin_points(points: Sequence[Sequence[float]], resolution: float):
    """Snap real-valued points to a grid and count bin occupants.

    Each coordinate maps to floor(coord / resolution); duplicate bins
    merge, with the occupant count as the bin weight.  Returns a list of
    (bin_coords, count) sorted by bin coordinates; total weight equals the
    number of input points.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    counts: Counter = Counter(
        tuple(math.floor(c / resolution) for c in pt) for pt in points
    )
    return sorted(counts.items())
