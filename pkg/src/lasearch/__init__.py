"""Frequency-predicted skip lists and KD trees, with benchmark tooling.

Structures built from (possibly erroneous) predicted query frequencies
place hot items near their tops, driving expected search cost toward the
entropy of the query distribution while staying within a constant factor
of the oblivious baselines when predictions are bad.
"""

from .distributions import (
    ZipfSpec,
    entropy,
    huffman_expected_length,
    sample_queries,
    zipf_pmf,
)
from .kdtree import (
    KdQueryResult,
    LearnedKdTree,
    WeightedPoint,
    avg_query_depth,
    best_split,
    build_node,
)
from .kdtree import build as build_kdtree
from .kdtree import classic_build as classic_kdtree
from .oracle import (
    NoiseSpec,
    ProbabilityVector,
    apply_noise,
    empirical_frequencies,
    normalize,
    verify_noisy,
)
from .skiplist import (
    LearnedSkipList,
    SearchResult,
    deterministic_level,
)
from .skiplist import build as build_skiplist
from .skiplist import classic_build as classic_skiplist
from .workload import (
    QueryTrace,
    WindowSpec,
    bin_points,
    intersection_index,
    load_trace,
    split_windows,
)

__version__ = "0.1.0"

__all__ = [
    "KdQueryResult",
    "LearnedKdTree",
    "LearnedSkipList",
    "NoiseSpec",
    "ProbabilityVector",
    "QueryTrace",
    "SearchResult",
    "WeightedPoint",
    "WindowSpec",
    "ZipfSpec",
    "apply_noise",
    "avg_query_depth",
    "best_split",
    "bin_points",
    "build_kdtree",
    "build_node",
    "build_skiplist",
    "classic_kdtree",
    "classic_skiplist",
    "deterministic_level",
    "empirical_frequencies",
    "entropy",
    "huffman_expected_length",
    "intersection_index",
    "load_trace",
    "normalize",
    "sample_queries",
    "split_windows",
    "verify_noisy",
    "zipf_pmf",
]
