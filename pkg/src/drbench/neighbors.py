"""Exact pairwise-distance, neighbor-ordering, and rank machinery.

Every neighborhood metric in this suite consumes the same cache of Euclidean
distances and neighbor ranks, built once per revision per space. Computation
is exact brute force: benchmark sizes are desk scale and the metrics need
exact ranks, at an O(N^2) memory cost.

Ties are broken by ascending point index, which makes every downstream
metric deterministic. Ranks are 1-based with self excluded.
"""

from __future__ import annotations

import numpy as np


def pairwise_sq_distances(m: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, symmetric with a zero diagonal."""
    m = np.asarray(m, dtype=np.float64)
    sq = np.einsum("ij,ij->i", m, m)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (m @ m.T)
    d2 = (d2 + d2.T) * 0.5
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def pairwise_distances(m: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix of the rows of ``m``."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] < 2:
        raise ValueError(f"need a matrix with at least 2 rows, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("input contains non-finite values")
    return np.sqrt(pairwise_sq_distances(m))


class DistanceRankCache:
    """Distances plus neighbor orderings and ranks for one point set.

    Attributes
    ----------
    dist : (N, N) float array, symmetric, zero diagonal.
    order : (N, N-1) int array; ``order[i]`` lists the other points by
        ascending distance from i (ties by ascending index).
    rank : (N, N) int array; ``rank[i, j]`` is the 1-based position of j in
        i's ordering for j != i, and 0 on the diagonal.
    """

    def __init__(self, dist: np.ndarray):
        n = dist.shape[0]
        keyed = dist.copy()
        np.fill_diagonal(keyed, np.inf)
        # stable sort keeps equal distances in ascending-index order
        order = np.argsort(keyed, axis=1, kind="stable")[:, : n - 1]
        rank = np.zeros((n, n), dtype=np.int64)
        rows = np.repeat(np.arange(n), n - 1)
        rank[rows, order.ravel()] = np.tile(np.arange(1, n), n)
        self.dist = dist
        self.order = order
        self.rank = rank

    @property
    def num_points(self) -> int:
        return self.dist.shape[0]

    def knn(self, k: int) -> np.ndarray:
        """First k entries of each point's neighbor ordering."""
        n = self.num_points
        if not 1 <= k <= n - 1:
            raise ValueError(f"k must be in [1, {n - 1}], got {k}")
        return self.order[:, :k]

    def knn_mask(self, k: int) -> np.ndarray:
        """Boolean (N, N) matrix: ``mask[i, j]`` iff j is among i's k nearest."""
        n = self.num_points
        if not 1 <= k <= n - 1:
            raise ValueError(f"k must be in [1, {n - 1}], got {k}")
        return (self.rank >= 1) & (self.rank <= k)


def rank_cache(m: np.ndarray) -> DistanceRankCache:
    """Build the distance/rank cache for the rows of ``m``."""
    return DistanceRankCache(pairwise_distances(m))


def knn_indices(cache: DistanceRankCache, k: int) -> np.ndarray:
    return cache.knn(k)
