"""Streaming per-class manifold statistics: count, mean, per-dim variance.

Accumulation is Welford's recurrence in float64 regardless of input
precision; partial states merge exactly (Chan's pairwise update), so a
stream may be split across workers without changing the result beyond
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from decafbench.errors import DegenerateManifoldError, InputError

SAMPLE = "sample"        # n - 1 denominator
POPULATION = "population"  # n denominator


@dataclass
class FinalizedManifold:
    class_key: tuple
    n: int
    centroid: np.ndarray  # float64
    variance: np.ndarray  # float64, per dimension


class ManifoldStats:
    """Single-writer accumulator for one (sequence, metaclass) class."""

    __slots__ = ("class_key", "n", "mean", "m2")

    def __init__(self, class_key: tuple, dimension: int):
        if dimension < 1:
            raise InputError("manifold dimension must be >= 1")
        self.class_key = class_key
        self.n = 0
        self.mean = np.zeros(dimension, dtype=np.float64)
        self.m2 = np.zeros(dimension, dtype=np.float64)

    @property
    def dimension(self) -> int:
        return self.mean.shape[0]

    def update(self, vector: np.ndarray) -> "ManifoldStats":
        v = np.asarray(vector, dtype=np.float64)
        if v.shape != self.mean.shape:
            raise InputError(f"{self.class_key}: vector of length {v.shape} "
                             f"does not match dimension {self.dimension}")
        if not np.all(np.isfinite(v)):
            raise InputError(f"{self.class_key}: non-finite sample component")
        self.n += 1
        delta = v - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (v - self.mean)
        np.maximum(self.m2, 0.0, out=self.m2)
        return self

    def merge(self, other: "ManifoldStats") -> "ManifoldStats":
        """Combined state, equivalent to accumulating both streams in one pass."""
        if self.class_key != other.class_key:
            raise InputError(f"cannot merge {self.class_key} with {other.class_key}")
        if self.dimension != other.dimension:
            raise InputError("cannot merge manifolds of different dimension")
        if other.n == 0:
            return self.copy()
        if self.n == 0:
            return other.copy()
        out = ManifoldStats(self.class_key, self.dimension)
        out.n = self.n + other.n
        delta = other.mean - self.mean
        out.mean = self.mean + delta * (other.n / out.n)
        out.m2 = self.m2 + other.m2 + delta * delta * (self.n * other.n / out.n)
        np.maximum(out.m2, 0.0, out=out.m2)
        return out

    def copy(self) -> "ManifoldStats":
        out = ManifoldStats(self.class_key, self.dimension)
        out.n = self.n
        out.mean = self.mean.copy()
        out.m2 = self.m2.copy()
        return out

    def finalize(self, variance_mode: str = SAMPLE) -> FinalizedManifold:
        """Centroid plus per-dimension variance; needs n >= 2."""
        if self.n < 2:
            raise DegenerateManifoldError(
                f"degenerate manifold {self.class_key}: n={self.n} < 2",
                class_key=self.class_key,
            )
        if variance_mode == SAMPLE:
            denom = self.n - 1
        elif variance_mode == POPULATION:
            denom = self.n
        else:
            raise InputError(f"unknown variance mode {variance_mode!r}")
        return FinalizedManifold(
            class_key=self.class_key,
            n=self.n,
            centroid=self.mean.copy(),
            variance=self.m2 / denom,
        )

    def to_debug_dict(self, variance_mode: str = SAMPLE) -> dict:
        """Debug dump with 17-significant-digit float formatting."""
        fin = self.finalize(variance_mode)
        seq, metaclass = self.class_key
        return {
            "class": {"seq": seq, "metaclass": metaclass},
            "n": self.n,
            "mean": [format(x, ".17g") for x in fin.centroid],
            "variance": [format(x, ".17g") for x in fin.variance],
        }


def two_pass_stats(vectors: np.ndarray, variance_mode: str = SAMPLE) -> tuple:
    """Mean-then-variance reference implementation (the streaming oracle)."""
    x = np.asarray(vectors, dtype=np.float64)
    n = x.shape[0]
    mean = x.mean(axis=0)
    ddof = 1 if variance_mode == SAMPLE else 0
    variance = ((x - mean) ** 2).sum(axis=0) / (n - ddof)
    return mean, variance, n
