"""Manifold discriminability metrics and metaclass pooling.

Cosine similarity is the dot product of the L2-normalized centroids.
The Mahalanobis measure is the squared, diagonal-covariance form

    d = sum_i (c1_i - c2_i)^2 / (q_i + eps)

with q the elementwise average of the two manifolds' variances, which
makes d symmetric and defined for any pair, and eps a small floor that
regularizes dead (zero-variance) dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from decafbench.errors import DegenerateManifoldError, InputError
from decafbench.manifold import SAMPLE, FinalizedManifold

COSINE = "cosine"
MAHALANOBIS_SQ = "mahalanobis_sq"

ALL_PAIRS = "all-pairs"
SAME_SEQUENCE = "same-sequence"

CELL_TGTG = "TG-TG"
CELL_TGBG = "TG-BG"
CELL_BGBG = "BG-BG"


@dataclass(frozen=True)
class MetricConfig:
    epsilon: float = 1e-12
    pooling_mode: str = ALL_PAIRS
    variance_mode: str = SAMPLE

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InputError("epsilon must be > 0")
        if self.pooling_mode not in (ALL_PAIRS, SAME_SEQUENCE):
            raise InputError(f"unknown pooling mode {self.pooling_mode!r}")


@dataclass
class MetaclassMatrix:
    network_name: str
    metric: str
    cells: dict[str, float]
    pair_counts: dict[str, int]
    per_pair_values: dict[str, list[float]] | None = field(default=None)


def cosine_similarity(c1: np.ndarray, c2: np.ndarray, label=None) -> float:
    """Dot product of unit-normalized centroids, clamped to [-1, 1]."""
    a = np.asarray(c1, dtype=np.float64)
    b = np.asarray(c2, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError("centroids of different dimension")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise DegenerateManifoldError("degenerate centroid with zero norm",
                                      class_key=label)
    u = a / na
    v = b / nb
    # coincident (or exactly opposite) directions must hit the bounds exactly,
    # which the dot product cannot promise after rounding
    if np.array_equal(u, v):
        return 1.0
    if np.array_equal(u, -v):
        return -1.0
    value = float(np.dot(u, v))
    return min(1.0, max(-1.0, value))


def mahalanobis_sq(s1: FinalizedManifold, s2: FinalizedManifold,
                   config: MetricConfig = MetricConfig()) -> float:
    """Squared Mahalanobis distance under the pooled diagonal covariance."""
    if s1.centroid.shape != s2.centroid.shape:
        raise InputError("manifolds of different dimension")
    pooled = 0.5 * (s1.variance + s2.variance) + config.epsilon
    diff = s1.centroid - s2.centroid
    return float(np.sum(diff * diff / pooled))


def _evaluate(metric: str, a: FinalizedManifold, b: FinalizedManifold,
              config: MetricConfig) -> float:
    if metric == COSINE:
        return cosine_similarity(a.centroid, b.centroid, label=a.class_key)
    if metric == MAHALANOBIS_SQ:
        return mahalanobis_sq(a, b, config)
    raise InputError(f"unknown metric {metric!r}")


def pool_metaclass_matrix(all_stats: list[FinalizedManifold], metric: str,
                          config: MetricConfig = MetricConfig(),
                          network_name: str = "",
                          collect_pairs: bool = False) -> MetaclassMatrix:
    """Pool a pairwise metric into the 2x2 TG/BG metaclass matrix.

    TG-TG and BG-BG are means over unordered same-metaclass pairs; TG-BG is
    the mean over all ordered sequence pairs (including a sequence with its
    own background) or, in same-sequence mode, over each sequence's own
    TG/BG pair only. Both metrics are symmetric, so three cells suffice.
    """
    tg: dict[str, FinalizedManifold] = {}
    bg: dict[str, FinalizedManifold] = {}
    for stats in all_stats:
        seq, metaclass = stats.class_key
        bucket = tg if metaclass == "TG" else bg
        if seq in bucket:
            raise InputError(f"duplicate {metaclass} manifold for sequence {seq!r}")
        bucket[seq] = stats
    if sorted(tg) != sorted(bg):
        missing = sorted(set(tg) ^ set(bg))
        raise InputError(f"sequences without both TG and BG manifolds: {missing}")
    names = sorted(tg)
    if len(names) < 2:
        raise InputError("metaclass pooling needs at least 2 sequences")

    cells: dict[str, float] = {}
    counts: dict[str, int] = {}
    pairs: dict[str, list[float]] = {}
    for cell, bucket in ((CELL_TGTG, tg), (CELL_BGBG, bg)):
        values = [
            _evaluate(metric, bucket[i], bucket[j], config)
            for i, j in combinations(names, 2)
        ]
        cells[cell] = float(np.mean(values))
        counts[cell] = len(values)
        pairs[cell] = values
    if config.pooling_mode == ALL_PAIRS:
        values = [
            _evaluate(metric, tg[i], bg[j], config)
            for i in names for j in names
        ]
    else:
        values = [_evaluate(metric, tg[i], bg[i], config) for i in names]
    cells[CELL_TGBG] = float(np.mean(values))
    counts[CELL_TGBG] = len(values)
    pairs[CELL_TGBG] = values

    return MetaclassMatrix(
        network_name=network_name,
        metric=metric,
        cells=cells,
        pair_counts=counts,
        per_pair_values=pairs if collect_pairs else None,
    )
