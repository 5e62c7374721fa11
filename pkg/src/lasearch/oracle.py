"""Predicted and true query-frequency vectors, plus noise models over them.

A ProbabilityVector holds normalized per-key query probabilities.  The same
type represents both oracle predictions and ground-truth frequencies; noise
generators turn the latter into the former.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "AllZeroError",
    "InvalidSpecError",
    "InvalidWeightError",
    "KeyMismatchError",
    "NoiseSpec",
    "ProbabilityVector",
    "apply_noise",
    "empirical_frequencies",
    "normalize",
    "verify_noisy",
]

#: absolute tolerance on the sum-to-one invariant
PROB_SUM_TOL = 1e-9

#: slack used when checking pointwise noise bounds, to absorb float rounding
_NOISY_EPS = 1e-12


class InvalidWeightError(ValueError):
    """A raw weight is negative, NaN or infinite."""


class AllZeroError(ValueError):
    """Every raw weight is zero, so no distribution can be formed."""


class KeyMismatchError(ValueError):
    """Two vectors that must share a key set do not."""


class InvalidSpecError(ValueError):
    """A NoiseSpec parameter is out of range."""


class ProbabilityVector:
    """Normalized query probabilities over an ordered key universe.

    Entries live in [0, 1] and sum to 1 within ``PROB_SUM_TOL``.  Keys are
    opaque, unique identifiers; for skip-list use they must be totally
    ordered, for KD use their order is irrelevant.  Instances are immutable
    and safe to share between threads.
    """

    __slots__ = ("_keys", "_probs", "_index")

    def __init__(self, keys: Iterable, probs: Iterable[float]):
        keys = tuple(keys)
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("probs must be one-dimensional")
        if len(keys) != arr.size:
            raise ValueError(
                f"{len(keys)} keys but {arr.size} probabilities"
            )
        if arr.size == 0:
            raise ValueError("probability vector must be non-empty")
        if len(set(keys)) != len(keys):
            raise ValueError("keys must be unique")
        if not np.all(np.isfinite(arr)):
            raise ValueError("probabilities must be finite")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        arr = arr.copy()
        arr.flags.writeable = False
        self._keys = keys
        self._probs = arr
        self._index = {k: i for i, k in enumerate(keys)}

    @property
    def keys(self) -> tuple:
        return self._keys

    @property
    def probs(self) -> np.ndarray:
        """Read-only float64 array aligned with ``keys``."""
        return self._probs

    def __len__(self) -> int:
        return len(self._keys)

    def prob_of(self, key) -> float:
        return float(self._probs[self._index[key]])

    def items(self):
        return zip(self._keys, self._probs.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbabilityVector):
            return NotImplemented
        return self._keys == other._keys and np.array_equal(
            self._probs, other._probs
        )

    def __hash__(self):
        return hash((self._keys, self._probs.tobytes()))

    def __repr__(self) -> str:
        return f"ProbabilityVector({len(self)} keys)"

    # -- CSV interchange: `key,prob` rows, header line, UTF-8, LF ----------

    def to_csv(self, dest) -> None:
        """Write ``key,prob`` rows (with header) to a path or text file."""
        if hasattr(dest, "write"):
            self._write_csv(dest)
        else:
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "prob"])
        for key, prob in self.items():
            writer.writerow([key, repr(prob)])

    @classmethod
    def from_csv(cls, src) -> "ProbabilityVector":
        """Read a vector written by :meth:`to_csv`.

        Keys are parsed back as ints when every key in the file is an
        integer literal; otherwise they stay strings.
        """
        if hasattr(src, "read"):
            text = src.read()
            if isinstance(text, bytes):
                text = text.decode("utf-8")
        else:
            with open(src, "r", encoding="utf-8", newline="") as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["key", "prob"]:
            raise ValueError("expected header line 'key,prob'")
        keys = [row[0] for row in rows[1:]]
        probs = [float(row[1]) for row in rows[1:]]
        try:
            keys = [int(k) for k in keys]
        except ValueError:
            pass
        return cls(keys, probs)


def normalize(weights: Sequence[float], keys: Iterable = None) -> ProbabilityVector:
    """Scale nonnegative weights so they sum to 1.

    Keys default to ``0..len(weights)-1``.  Raises InvalidWeightError on a
    negative, NaN or infinite weight and AllZeroError when there is no mass
    to distribute.
    """
    arr = np.asarray(weights, dtype=np.float64)
    if arr.size == 0:
        raise AllZeroError("no weights given")
    if not np.all(np.isfinite(arr)):
        raise InvalidWeightError("weights must be finite")
    if np.any(arr < 0.0):
        raise InvalidWeightError("weights must be nonnegative")
    total = arr.sum()
    if total <= 0.0:
        raise AllZeroError("all weights are zero")
    if keys is None:
        keys = range(arr.size)
    return ProbabilityVector(keys, arr / total)


def empirical_frequencies(trace, universe: Sequence) -> ProbabilityVector:
    """Occurrence frequencies of ``universe`` keys within a query trace.

    Keys absent from the trace get probability 0, and the counts are
    renormalized over the universe keys that do appear.  When no universe
    key appears at all the uniform vector is returned, so a disjoint
    train/test split degrades gracefully instead of erroring.
    """
    universe = list(universe)
    if not universe:
        raise ValueError("universe must be non-empty")
    counts = Counter(trace.entries)
    weights = [counts.get(key, 0) for key in universe]
    if sum(weights) == 0:
        weights = [1] * len(universe)
    return normalize(weights, keys=universe)


@dataclass(frozen=True)
class NoiseSpec:
    """How to corrupt a ground-truth frequency vector.

    kind "perfect" passes the vector through, "mix" blends it with a
    contaminant (uniform or rank-reversed), "scale" applies per-key
    multiplicative/additive jitter, and "adversarial" reverses the
    frequency ranking outright.
    """

    kind: str
    alpha: float | None = None
    contaminant: str = "uniform"
    m_max: float | None = None
    a_max: float | None = None

    def __post_init__(self):
        if self.kind not in ("perfect", "mix", "scale", "adversarial"):
            raise InvalidSpecError(f"unknown noise kind {self.kind!r}")
        if self.kind == "mix":
            if self.alpha is None or not (0.0 < self.alpha <= 1.0):
                raise InvalidSpecError("mix requires 0 < alpha <= 1")
            if self.contaminant not in ("uniform", "reversed"):
                raise InvalidSpecError(
                    f"unknown contaminant {self.contaminant!r}"
                )
        if self.kind == "scale":
            if self.m_max is None or self.m_max < 1.0:
                raise InvalidSpecError("scale requires m_max >= 1")
            if self.a_max is None or self.a_max < 0.0:
                raise InvalidSpecError("scale requires a_max >= 0")

    @classmethod
    def perfect(cls) -> "NoiseSpec":
        return cls(kind="perfect")

    @classmethod
    def mix(cls, alpha: float, contaminant: str = "uniform") -> "NoiseSpec":
        return cls(kind="mix", alpha=alpha, contaminant=contaminant)

    @classmethod
    def scale(cls, m_max: float, a_max: float) -> "NoiseSpec":
        return cls(kind="scale", m_max=m_max, a_max=a_max)

    @classmethod
    def adversarial(cls) -> "NoiseSpec":
        return cls(kind="adversarial")


def _rank_reversed(probs: np.ndarray) -> np.ndarray:
    """Permute values so the hottest key receives the coldest value."""
    order = np.argsort(probs, kind="stable")  # ascending
    out = np.empty_like(probs)
    out[order] = probs[order[::-1]]
    return out


def apply_noise(
    f: ProbabilityVector, spec: NoiseSpec, rng_seed: int
) -> ProbabilityVector:
    """Produce a prediction vector from ground truth ``f`` per ``spec``.

    Deterministic given (f, spec, rng_seed); the output is always a valid
    ProbabilityVector.  The mix construction with parameter alpha satisfies
    the pointwise bound p_i >= alpha * f_i, hence is (alpha, beta)-noisy
    for every beta >= 0.
    """
    if spec.kind == "perfect":
        return f
    probs = f.probs
    if spec.kind == "adversarial":
        return ProbabilityVector(f.keys, _rank_reversed(probs))
    if spec.kind == "mix":
        if spec.contaminant == "uniform":
            q = np.full(len(f), 1.0 / len(f))
        else:
            q = _rank_reversed(probs)
        mixed = spec.alpha * probs + (1.0 - spec.alpha) * q
        return ProbabilityVector(f.keys, mixed)
    # scale
    rng = np.random.default_rng(rng_seed)
    m = rng.uniform(1.0, spec.m_max, size=len(f))
    a = rng.uniform(0.0, spec.a_max, size=len(f))
    return normalize(m * probs + a, keys=f.keys)


def verify_noisy(
    p: ProbabilityVector,
    f: ProbabilityVector,
    alpha: float,
    beta: float,
) -> bool:
    """Check the pointwise bound p_i >= alpha * f_i - beta for all keys.

    The two vectors must cover the same key set (any order).  A 1e-12
    slack absorbs float rounding so that exact constructions do not fail
    spuriously at beta = 0.
    """
    if set(p.keys) != set(f.keys):
        raise KeyMismatchError("prediction and truth key sets differ")
    f_aligned = np.array([f.prob_of(k) for k in p.keys])
    return bool(np.all(p.probs >= alpha * f_aligned - beta - _NOISY_EPS))
