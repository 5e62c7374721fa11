"""Zipfian workloads, entropy, and the Huffman code-length reference.

Entropy and the expected Huffman codeword length are the two yardsticks the
benchmark compares structure costs against: entropy lower-bounds the
expected search cost of any structure in this family, and the Huffman
length sits within one bit above it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .oracle import ProbabilityVector, normalize
from .workload import QueryTrace

__all__ = [
    "ZipfSpec",
    "entropy",
    "huffman_expected_length",
    "sample_queries",
    "zipf_pmf",
]


@dataclass(frozen=True)
class ZipfSpec:
    """Rank-frequency law proportional to 1/(rank + b)^a over n keys.

    a = 0 degenerates to the uniform distribution, which the benchmarks
    use as the unskewed baseline; b shifts the ranks.
    """

    n: int
    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.a >= 0.0:
            raise ValueError("exponent a must be >= 0")
        if not self.b >= 0.0:
            raise ValueError("shift b must be >= 0")


def zipf_pmf(spec: ZipfSpec, keys=None) -> ProbabilityVector:
    """Normalized vector with mass 1/(i+b)^a at rank i = 1..n.

    Rank 1 gets the highest probability; keys default to 0..n-1 in rank
    order.
    """
    ranks = np.arange(1, spec.n + 1, dtype=np.float64)
    weights = (ranks + spec.b) ** (-spec.a)
    return normalize(weights, keys=keys)


def entropy(p: ProbabilityVector) -> float:
    """Shannon entropy in bits; zero-probability terms contribute 0."""
    arr = p.probs
    nz = arr[arr > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def huffman_expected_length(p: ProbabilityVector) -> float:
    """Expected codeword length (bits) of the Huffman code for ``p``.

    Built by repeatedly merging the two lowest-frequency nodes from a
    min-priority queue.  Equal frequencies merge the node with the smaller
    id first (leaves carry their key index, internal nodes get ids in
    creation order above that), which pins down one deterministic tree;
    the expected length itself is tie-invariant.

    For vectors with at least two nonzero entries the result L satisfies
    H(p) <= L < H(p) + 1.
    """
    n = len(p)
    if n == 1:
        return 0.0
    weights = p.probs.tolist()
    parent: dict[int, int] = {}
    heap = [(w, i) for i, w in enumerate(weights)]
    heapq.heapify(heap)
    next_id = n
    while len(heap) > 1:
        w_a, a = heapq.heappop(heap)
        w_b, b = heapq.heappop(heap)
        parent[a] = next_id
        parent[b] = next_id
        heapq.heappush(heap, (w_a + w_b, next_id))
        next_id += 1
    expected = 0.0
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        depth = 0
        node = i
        while node in parent:
            node = parent[node]
            depth += 1
        expected += w * depth
    return expected


def sample_queries(p: ProbabilityVector, count: int, rng_seed: int) -> QueryTrace:
    """Draw ``count`` i.i.d. keys from ``p`` by inverse-CDF sampling.

    Deterministic given the seed: uniform variates are looked up in the
    cumulative sums of the probability vector.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    cdf = np.cumsum(p.probs)
    u = np.random.default_rng(rng_seed).random(count)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, len(p) - 1)
    keys = p.keys
    return QueryTrace([keys[i] for i in idx])
