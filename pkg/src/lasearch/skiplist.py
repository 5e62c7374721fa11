"""Skip lists whose promotions are driven by predicted query frequencies.

Construction places item i deterministically in every level l with
p_i >= 2^(l-1) / n, i.e. up to level max(0, 1 + floor(log2(n * p_i))),
then continues upward with fair coin flips like an ordinary skip list.
Hot items therefore sit near the top regardless of coin luck, while cold
items still get the classic probabilistic express lanes.

Search walks from the head sentinel at the top populated level: move
right while the next key does not overshoot the target, stop the moment
the target key is reached, otherwise drop a level.  Every rightward and
downward pointer move counts as one step, which is the cost model all
benchmark comparisons use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .oracle import ProbabilityVector

__all__ = [
    "DuplicateKeyError",
    "InvalidPromoteProbError",
    "KeyNotFoundError",
    "LearnedSkipList",
    "MisalignedError",
    "SearchResult",
    "UnsortedError",
    "build",
    "classic_build",
    "deterministic_level",
]


class MisalignedError(ValueError):
    """Items and predictions do not line up."""


class UnsortedError(ValueError):
    """Items are not strictly increasing."""


class DuplicateKeyError(ValueError):
    """Insert of a key that is already present."""


class KeyNotFoundError(KeyError):
    """Lookup of a key that is not present."""


class InvalidPromoteProbError(ValueError):
    """Classic promotion probability outside (0, 1)."""


def deterministic_level(p_i: float, n: int) -> int:
    """Highest level where predicted mass ``p_i`` forces placement.

    Equals max(0, 1 + floor(log2(n * p_i))), computed exactly on the
    float product via frexp; 0 when p_i is 0.
    """
    if not 0.0 <= p_i <= 1.0:
        raise ValueError(f"p_i must be in [0, 1], got {p_i!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    x = n * p_i
    if x <= 0.0:
        return 0
    # frexp gives x = m * 2**e with m in [0.5, 1), so floor(log2 x) = e - 1.
    return max(0, math.frexp(x)[1])


def _det_levels(probs: np.ndarray, n: int) -> np.ndarray:
    """Vectorized deterministic_level for an aligned probability array."""
    _, exp = np.frexp(n * probs)
    return np.maximum(exp, 0)


def _geometric_extras(rng: np.random.Generator, count: int, p: float = 0.5) -> np.ndarray:
    """Coin-flip levels above the deterministic floor: Geometric, support {0,1,...}."""
    return rng.geometric(p, size=count) - 1


class _Node:
    __slots__ = ("key", "forward")

    def __init__(self, key, height: int):
        self.key = key
        self.forward: list = [None] * (height + 1)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one instrumented search.

    ``steps`` counts every rightward and downward pointer move; it is at
    least 1 on any non-empty list (the head sentinel is never the target,
    so the walk always moves).  ``comparisons`` is the secondary metric
    counting key-order comparisons only.  ``terminal_level`` is the level
    at which the walk stopped (the matched node's level, or 0).
    """

    found: bool
    steps: int
    terminal_level: int
    comparisons: int


class LearnedSkipList:
    """Leveled ordered list with deterministic frequency floors.

    Level 0 holds every item in sorted key order and each higher level is
    a sublist of the one beneath it.  Instances are built through
    :func:`build` or :func:`classic_build`; direct construction yields an
    empty list ready for :meth:`insert`.

    Reads (search, num_levels, level_of, dump) are safe from any number of
    concurrent threads; build and insert require exclusive access.
    """

    def __init__(self, rng_seed: int = 0):
        self.rng_seed = rng_seed
        self._rng = np.random.default_rng(rng_seed)
        self._head = _Node(None, 0)  # forward has num_levels + 1 slots
        self._nodes: dict = {}
        self._probs: dict = {}
        self._n = 0
        self._num_levels = 0

    # -- construction -----------------------------------------------------

    def _assemble(self, items: Sequence, heights: Sequence[int], probs) -> None:
        max_h = max(heights)
        self._num_levels = max_h + 1
        self._head = _Node(None, self._num_levels)  # top slot stays empty
        last = [self._head] * self._num_levels
        for key, height in zip(items, heights):
            node = _Node(key, int(height))
            self._nodes[key] = node
            for level in range(height + 1):
                last[level].forward[level] = node
                last[level] = node
        self._n = len(items)
        if probs is None:
            self._probs = {key: None for key in items}
        else:
            self._probs = dict(zip(items, probs))

    # -- queries ----------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    def __len__(self) -> int:
        return self._n

    @property
    def num_levels(self) -> int:
        """Index of the highest populated level, plus one."""
        return self._num_levels

    def level_of(self, key) -> int:
        """Highest level containing ``key``."""
        node = self._nodes.get(key)
        if node is None:
            raise KeyNotFoundError(key)
        return len(node.forward) - 1

    def prediction_of(self, key):
        return self._probs[key]

    def level_keys(self, level: int) -> list:
        """Keys present at ``level``, in order."""
        if not 0 <= level < self._num_levels:
            raise ValueError(f"level {level} out of range")
        out = []
        node = self._head.forward[level]
        while node is not None:
            out.append(node.key)
            node = node.forward[level]
        return out

    @property
    def levels(self) -> list:
        return [self.level_keys(lv) for lv in range(self._num_levels)]

    def search(self, key) -> SearchResult:
        """Instrumented top-down search; see the module docstring.

        Membership answers agree with a linear scan of level 0: the walk
        stops on the target the moment some level reaches it, and by the
        nesting invariant a key on any level is also on level 0.
        """
        if self._n == 0:
            raise ValueError("search on an empty skip list")
        node = self._head
        # start at the top populated level; single-level lists start at the
        # empty slot above so that every search makes at least one move
        level = max(self._num_levels - 1, 1)
        steps = 0
        comparisons = 0
        while True:
            nxt = node.forward[level]
            if nxt is not None:
                comparisons += 1
                if nxt.key <= key:
                    node = nxt
                    steps += 1
                    if node.key == key:
                        return SearchResult(True, steps, level, comparisons)
                    continue
            if level == 0:
                return SearchResult(False, steps, 0, comparisons)
            level -= 1
            steps += 1

    def dump(self) -> str:
        """Debug rendering: one line per level, highest level first."""
        lines = []
        for level in range(self._num_levels - 1, -1, -1):
            lines.append(" ".join(str(k) for k in self.level_keys(level)))
        return "\n".join(lines) + "\n"

    # -- mutation ---------------------------------------------------------

    def insert(self, key, p_key: float) -> None:
        """Splice ``key`` in at its floor level plus coin-flip extras.

        The floor uses the live item count after this insertion; existing
        items keep their levels.  The extra levels are Geometric(1/2), so
        the marginal level distribution matches a fresh build.
        """
        if key in self._nodes:
            raise DuplicateKeyError(f"key {key!r} already present")
        n_new = self._n + 1
        height = deterministic_level(p_key, n_new) + int(
            _geometric_extras(self._rng, 1)[0]
        )

        if height + 1 > self._num_levels:
            grow = height + 1 - self._num_levels
            self._head.forward.extend([None] * grow)
            self._num_levels = height + 1

        # predecessors with key < new key, per level
        update = [self._head] * (height + 1)
        node = self._head
        for level in range(self._num_levels - 1, -1, -1):
            nxt = node.forward[level]
            while nxt is not None and nxt.key < key:
                node = nxt
                nxt = node.forward[level]
            if level <= height:
                update[level] = node

        new = _Node(key, height)
        for level in range(height + 1):
            new.forward[level] = update[level].forward[level]
            update[level].forward[level] = new
        self._nodes[key] = new
        self._probs[key] = p_key
        self._n = n_new


def _check_items(items: Sequence) -> None:
    for a, b in zip(items, items[1:]):
        if not a < b:
            raise UnsortedError("items must be strictly increasing")


def build(
    items: Sequence,
    predictions: ProbabilityVector,
    rng_seed: int,
) -> LearnedSkipList:
    """Batch-build a learned skip list from sorted items and predictions.

    ``predictions`` must be keyed by the items themselves, in the same
    order.  Item i is placed deterministically up to
    deterministic_level(p_i, n) and promoted further by fair coins.
    """
    items = list(items)
    if not items:
        raise ValueError("cannot build an empty skip list; use insert")
    if len(predictions) != len(items) or list(predictions.keys) != items:
        raise MisalignedError("predictions must be keyed by the items, in order")
    _check_items(items)

    lst = LearnedSkipList(rng_seed)
    det = _det_levels(predictions.probs, len(items))
    extras = _geometric_extras(lst._rng, len(items))
    lst._assemble(items, (det + extras).tolist(), predictions.probs.tolist())
    return lst


def classic_build(
    items: Sequence,
    promote_p: float = 0.5,
    rng_seed: int = 0,
) -> LearnedSkipList:
    """Oblivious baseline: promotion by coin flips only, no floors."""
    if not 0.0 < promote_p < 1.0:
        raise InvalidPromoteProbError(f"promote_p must be in (0, 1), got {promote_p!r}")
    items = list(items)
    if not items:
        raise ValueError("cannot build an empty skip list; use insert")
    _check_items(items)

    lst = LearnedSkipList(rng_seed)
    heights = _geometric_extras(lst._rng, len(items), p=promote_p)
    lst._assemble(items, heights.tolist(), None)
    return lst
