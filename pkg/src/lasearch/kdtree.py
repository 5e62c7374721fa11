"""KD trees whose splits balance predicted query mass instead of counts.

The learned construction keeps every point with predicted probability
above 1/n^2 (dataset points and retained high-frequency negative queries)
in an upper tree whose split nodes are chosen, over all axes and
coordinate values, to put as close to half of the predicted query mass on
each side.  Points at or below the cutoff are routed through that upper
tree to their leaf region and stored there in small balanced bucket
subtrees, capping their depth near log n without letting the long tail of
cold points inflate the structure.

All points of the upper tree live at leaves; split nodes carry only an
(axis, value) pair and route a query left when coords[axis] <= value.
Bucket subtrees are classic median KD trees with the median point kept at
the node and axes cycling with depth.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "EmptyDatasetError",
    "KdQueryResult",
    "LearnedKdTree",
    "NoValidSplitError",
    "WeightedPoint",
    "avg_query_depth",
    "best_split",
    "build",
    "build_node",
    "classic_build",
    "load_points",
    "save_points",
]


class NoValidSplitError(ValueError):
    """Every candidate split leaves one side empty (identical points)."""


class EmptyDatasetError(ValueError):
    """Build called with no dataset points."""


class DimensionMismatchError(ValueError):
    """Query dimension differs from the tree's."""


@dataclass(frozen=True)
class WeightedPoint:
    """Grid point with a predicted query probability.

    ``is_data`` distinguishes dataset members from high-frequency negative
    queries that are inserted purely so lookups can reject them early.
    """

    coords: tuple[int, ...]
    prob: float
    is_data: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) < 1:
            raise ValueError("points need at least one coordinate")
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"prob must be in [0, 1], got {self.prob!r}")


@dataclass(frozen=True)
class KdQueryResult:
    found: bool
    depth: int  # edges traversed from the root to the termination node


class SplitNode:
    __slots__ = ("axis", "value", "left", "right")

    def __init__(self, axis: int, value: int, left=None, right=None):
        self.axis = axis
        self.value = value
        self.left = left
        self.right = right


class LeafNode:
    __slots__ = ("point", "bucket")

    def __init__(self, point: WeightedPoint, bucket=None):
        self.point = point
        self.bucket = bucket


class BucketNode:
    __slots__ = ("point", "axis", "left", "right")

    def __init__(self, point: WeightedPoint, axis: int, left=None, right=None):
        self.point = point
        self.axis = axis
        self.left = left
        self.right = right


def _best_value_on_axis(column: np.ndarray, weights: np.ndarray, total: float):
    """Best split value on one axis, or None if it has a single value.

    Candidates are the distinct coordinate values except the largest (a
    split there would leave the right side empty).  Returns
    (deviation_from_half, value, left_mass); ties pick the lowest value.
    """
    order = np.argsort(column, kind="stable")
    sorted_col = column[order]
    boundaries = np.nonzero(sorted_col[:-1] != sorted_col[1:])[0]
    if boundaries.size == 0:
        return None
    cum = np.cumsum(weights[order])
    left_masses = cum[boundaries]
    devs = np.abs(left_masses / total - 0.5)
    j = int(np.argmin(devs))  # first minimum = lowest candidate value
    return float(devs[j]), int(sorted_col[boundaries[j]]), float(left_masses[j])


def _best_split_arrays(coords: np.ndarray, probs: np.ndarray):
    """Mass-balancing split over all axes, or None when no candidate exists."""
    total = float(probs.sum())
    best = None
    for axis in range(coords.shape[1]):
        cand = _best_value_on_axis(coords[:, axis], probs, total)
        if cand is None:
            continue
        dev, value, left_mass = cand
        if best is None or dev < best[0]:
            best = (dev, axis, value, left_mass)
    if best is None:
        return None
    return best[1], best[2], best[3]


def _as_arrays(points: Sequence[WeightedPoint]):
    coords = np.array([p.coords for p in points], dtype=np.int64)
    probs = np.array([p.prob for p in points], dtype=np.float64)
    return coords, probs


def _check_dims(points: Sequence[WeightedPoint]) -> int:
    dim = len(points[0].coords)
    for p in points:
        if len(p.coords) != dim:
            raise DimensionMismatchError("points have mixed dimensions")
    return dim


def best_split(points: Sequence[WeightedPoint]):
    """Choose (axis, value, left_mass) putting closest to half the mass left.

    Considers every axis and every coordinate value present on it,
    restricted to candidates where neither side ends up empty.  Ties break
    toward the lower axis index, then the lower value.  left_mass is the
    absolute predicted mass of the points with coords[axis] <= value.
    """
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least 2 points to split")
    _check_dims(points)
    coords, probs = _as_arrays(points)
    if probs.sum() <= 0.0:
        raise ValueError("total probability mass must be positive")
    result = _best_split_arrays(coords, probs)
    if result is None:
        raise NoValidSplitError("all points share identical coordinates")
    return result


def _merge_identical(points: list[WeightedPoint]) -> WeightedPoint:
    # coordinate-identical points collapse to one leaf entry
    prob = min(1.0, sum(p.prob for p in points))
    return WeightedPoint(points[0].coords, prob, any(p.is_data for p in points))


def _build_learned(points: Sequence[WeightedPoint], coords: np.ndarray, probs: np.ndarray):
    """Iterative mass-balanced construction (explicit stack; skewed mass can
    nest far deeper than Python's recursion limit allows)."""
    root_holder = [None]
    all_idx = np.arange(len(points))
    stack = [(all_idx, root_holder, 0)]
    while stack:
        idx, parent, slot = stack.pop()
        if idx.size == 1:
            node = LeafNode(points[int(idx[0])])
        else:
            split = _best_split_arrays(coords[idx], probs[idx])
            if split is None:
                node = LeafNode(_merge_identical([points[int(i)] for i in idx]))
            else:
                axis, value, _ = split
                mask = coords[idx, axis] <= value
                node = SplitNode(axis, value)
                stack.append((idx[mask], node, 0))
                stack.append((idx[~mask], node, 1))
        if isinstance(parent, list):
            parent[0] = node
        elif slot == 0:
            parent.left = node
        else:
            parent.right = node
    return root_holder[0]


def build_node(points: Sequence[WeightedPoint]):
    """Build the mass-balanced upper tree over the given points.

    Single point gives a leaf; otherwise split by :func:`best_split` and
    recurse on the two sides.  Coordinate-identical point groups, where no
    valid split exists, collapse into one merged leaf.
    """
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    _check_dims(points)
    coords, probs = _as_arrays(points)
    return _build_learned(points, coords, probs)


def _sort_key(point: WeightedPoint, axis: int):
    return (point.coords[axis], point.coords)


def _build_bucket(points: list[WeightedPoint], depth: int, dim: int):
    """Balanced median subtree for low-frequency points; point kept at node."""
    if not points:
        return None
    axis = depth % dim
    points = sorted(points, key=lambda p: _sort_key(p, axis))
    mid = len(points) // 2
    return BucketNode(
        points[mid],
        axis,
        _build_bucket(points[:mid], depth + 1, dim),
        _build_bucket(points[mid + 1 :], depth + 1, dim),
    )


def _dedupe(points: Iterable[WeightedPoint]) -> list[WeightedPoint]:
    groups: dict[tuple, list[WeightedPoint]] = {}
    for p in points:
        groups.setdefault(p.coords, []).append(p)
    return [
        pts[0] if len(pts) == 1 else _merge_identical(pts)
        for pts in groups.values()
    ]


class LearnedKdTree:
    """Exact-match KD tree; ``query`` reports the traversal depth in edges.

    Immutable after construction; any number of threads may query
    concurrently.
    """

    def __init__(self, root, n: int, cutoff: float, dim: int):
        self.root = root
        self.n = n
        self.cutoff = cutoff
        self.dim = dim

    def query(self, point: Sequence[int]) -> KdQueryResult:
        """Descend to the grid cell of ``point``.

        found is True only when an exactly-equal dataset point is reached;
        landing on a retained negative query reports found=False at that
        node's depth.
        """
        coords = tuple(point)
        if len(coords) != self.dim:
            raise DimensionMismatchError(
                f"query has {len(coords)} coordinates, tree has {self.dim}"
            )
        node = self.root
        depth = 0
        while type(node) is SplitNode:
            if coords[node.axis] <= node.value:
                node = node.left
            else:
                node = node.right
            depth += 1
        if type(node) is LeafNode:
            stored = node.point
            if coords == stored.coords:
                return KdQueryResult(stored.is_data, depth)
            if node.bucket is None:
                return KdQueryResult(False, depth)
            node = node.bucket
            depth += 1
        while node is not None:
            stored = node.point
            if coords == stored.coords:
                return KdQueryResult(stored.is_data, depth)
            axis = node.axis
            if (coords[axis], coords) < (stored.coords[axis], stored.coords):
                nxt = node.left
            else:
                nxt = node.right
            if nxt is None:
                return KdQueryResult(False, depth)
            node = nxt
            depth += 1
        return KdQueryResult(False, depth)

    def height(self) -> int:
        """Maximum node depth in edges, bucket subtrees included."""
        return max(depth for _, depth, _ in self.iter_points())

    def iter_points(self):
        """Yield (point, depth, kind) for every stored point.

        kind is "leaf" for upper-tree points and "bucket" for
        low-frequency points in bucket subtrees.
        """
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            if node is None:
                continue
            if type(node) is SplitNode:
                stack.append((node.left, depth + 1))
                stack.append((node.right, depth + 1))
            elif type(node) is LeafNode:
                yield node.point, depth, "leaf"
                if node.bucket is not None:
                    stack.append((node.bucket, depth + 1))
            else:
                yield node.point, depth, "bucket"
                stack.append((node.left, depth + 1))
                stack.append((node.right, depth + 1))


def build(
    dataset: Sequence[WeightedPoint],
    queries: Sequence[WeightedPoint] = (),
) -> LearnedKdTree:
    """Build a learned KD tree from weighted dataset points and negative
    queries.

    Probabilities across dataset and queries are renormalized to sum to 1,
    then filtered at the cutoff 1/n^2 with n the dataset size: points above
    the cutoff form the mass-balanced upper tree, dataset points at or
    below it are routed to their leaf region and bucketed there, and cold
    negative queries are simply dropped.
    """
    dataset = list(dataset)
    queries = list(queries)
    if not dataset:
        raise EmptyDatasetError("dataset must be non-empty")
    dim = _check_dims(dataset + queries)
    data_coords = {p.coords for p in dataset}
    for q in queries:
        if q.coords in data_coords:
            raise ValueError(f"query point {q.coords} duplicates a dataset point")

    n = len(dataset)
    cutoff = 1.0 / (n * n)
    total = sum(p.prob for p in dataset) + sum(p.prob for p in queries)
    if total <= 0.0:
        raise ValueError("total probability mass must be positive")

    def renorm(p: WeightedPoint) -> WeightedPoint:
        return WeightedPoint(p.coords, p.prob / total, p.is_data)

    dataset = [renorm(p) for p in dataset]
    queries = [renorm(q) for q in queries]

    upper = [p for p in dataset if p.prob > cutoff]
    upper += [q for q in queries if q.prob > cutoff]
    low = _dedupe(p for p in dataset if p.prob <= cutoff)

    if not upper:
        # everything is cold: the whole tree is one balanced bucket
        return LearnedKdTree(_build_bucket(low, 0, dim), n, cutoff, dim)

    upper = _dedupe(upper)
    coords, probs = _as_arrays(upper)
    root = _build_learned(upper, coords, probs)

    if low:
        pending: dict[int, list[WeightedPoint]] = {}
        leaves: dict[int, LeafNode] = {}
        for p in low:
            node = root
            while type(node) is SplitNode:
                node = node.left if p.coords[node.axis] <= node.value else node.right
            pending.setdefault(id(node), []).append(p)
            leaves[id(node)] = node
        for leaf_id, pts in pending.items():
            leaves[leaf_id].bucket = _build_bucket(pts, 0, dim)

    return LearnedKdTree(root, n, cutoff, dim)


def classic_build(dataset: Sequence[WeightedPoint]) -> LearnedKdTree:
    """Count-balanced baseline tree; predicted probabilities are ignored.

    Splits cycle axes with depth and pick the coordinate value whose left
    side holds closest to half the points, so every point ends up in a
    leaf at depth about log2 n.  An axis with a single distinct value
    defers to the next axis in the cycle.
    """
    dataset = list(dataset)
    if not dataset:
        raise EmptyDatasetError("dataset must be non-empty")
    dim = _check_dims(dataset)
    points = _dedupe(dataset)

    def rec(pts: list[WeightedPoint], depth: int):
        if len(pts) == 1:
            return LeafNode(pts[0])
        coords = np.array([p.coords for p in pts], dtype=np.int64)
        ones = np.ones(len(pts))
        for off in range(dim):
            axis = (depth + off) % dim
            cand = _best_value_on_axis(coords[:, axis], ones, float(len(pts)))
            if cand is None:
                continue
            _, value, _ = cand
            left = [p for p in pts if p.coords[axis] <= value]
            right = [p for p in pts if p.coords[axis] > value]
            return SplitNode(axis, value, rec(left, depth + 1), rec(right, depth + 1))
        return LeafNode(_merge_identical(pts))  # unreachable after dedupe

    return LearnedKdTree(rec(points, 0), len(dataset), 0.0, dim)


def avg_query_depth(tree: LearnedKdTree, trace) -> float:
    """Mean query depth over a trace of coordinate tuples."""
    entries = trace.entries if hasattr(trace, "entries") else tuple(trace)
    if not entries:
        raise ValueError("trace must be non-empty")
    query = tree.query
    return sum(query(pt).depth for pt in entries) / len(entries)


# -- point CSV interchange: x1,...,xd,prob,is_data -------------------------


def save_points(points: Sequence[WeightedPoint], dest) -> None:
    """Write points as CSV rows ``x1,...,xd,prob,is_data`` with header."""
    points = list(points)
    if not points:
        raise ValueError("no points to save")
    dim = _check_dims(points)
    header = [f"x{i + 1}" for i in range(dim)] + ["prob", "is_data"]

    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for p in points:
            writer.writerow(list(p.coords) + [repr(p.prob), int(p.is_data)])

    if hasattr(dest, "write"):
        write(dest)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write(fh)


def load_points(src) -> list[WeightedPoint]:
    """Read points written by :func:`save_points`."""
    if hasattr(src, "read"):
        text = src.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        with open(src, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty points file")
    header = rows[0]
    if len(header) < 3 or header[-2:] != ["prob", "is_data"]:
        raise ValueError("expected header x1,...,xd,prob,is_data")
    dim = len(header) - 2
    points = []
    for row in rows[1:]:
        if not row:
            continue
        coords = tuple(int(v) for v in row[:dim])
        prob = float(row[dim])
        flag = row[dim + 1].strip().lower()
        points.append(WeightedPoint(coords, prob, flag in ("1", "true")))
    return points
