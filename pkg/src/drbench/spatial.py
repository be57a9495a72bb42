"""Spatial quality metrics for one projected revision.

Six per-revision metrics: neighborhood preservation, neighborhood hit,
trustworthiness, continuity, normalized stress, and the three Shepard-diagram
correlations (Pearson, Spearman, Kendall). The four neighborhood metrics are
evaluated over a multi-scale sweep of neighborhood sizes.

Rank conventions follow the standard trustworthiness/continuity formulation:
trustworthiness ranks intruding points by data-space distance, continuity
ranks missing points by projected-space distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .neighbors import DistanceRankCache

# Default sweep fractions of the point count: 20 sizes from 1% to 20% for the
# data-vs-projection neighborhood metrics, 0.25% to 5% for neighborhood hit.
NEIGHBOR_SWEEP = (0.01, 0.20)
HIT_SWEEP = (0.0025, 0.05)
SWEEP_COUNT = 20


@dataclass(frozen=True)
class MetricCurve:
    """Scores of one metric over a sweep of neighborhood sizes."""

    k_values: tuple[int, ...]
    scores: tuple[float, ...]

    @property
    def aggregate(self) -> float:
        return float(np.mean(self.scores))


@dataclass(frozen=True)
class ShepardPoints:
    """All unordered point-pair distances of one revision: data-space ``d``
    against projected ``d_bar``, in row-major pair order."""

    d: np.ndarray
    d_bar: np.ndarray

    def __len__(self) -> int:
        return self.d.shape[0]


def _check_pair(data_cache: DistanceRankCache, proj_cache: DistanceRankCache) -> int:
    n = data_cache.num_points
    if proj_cache.num_points != n:
        raise ValueError(
            f"cache size mismatch: data has {n} points, "
            f"projection has {proj_cache.num_points}"
        )
    return n


def neighborhood_preservation(
    data_cache: DistanceRankCache, proj_cache: DistanceRankCache, k: int
) -> float:
    """Mean fraction of each point's k nearest data neighbors that are also
    among its k nearest projected neighbors."""
    n = _check_pair(data_cache, proj_cache)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    both = data_cache.knn_mask(k) & proj_cache.knn_mask(k)
    return float(both.sum(axis=1).mean() / k)


def neighborhood_hit(
    proj_cache: DistanceRankCache, labels: np.ndarray, k: int
) -> float:
    """Mean fraction of each projected point's k nearest neighbors that share
    its class label."""
    n = proj_cache.num_points
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    neigh = proj_cache.knn(k)
    same = labels[neigh] == labels[:, None]
    return float(same.sum(axis=1).mean() / k)


def _trust_normalizer(n: int, k: int) -> float:
    if not 1 <= k < n / 2:
        raise ValueError(f"k must satisfy 1 <= k < N/2 = {n / 2}, got {k}")
    return 2.0 / (n * k * (2 * n - 3 * k - 1))


def trustworthiness(
    data_cache: DistanceRankCache, proj_cache: DistanceRankCache, k: int
) -> float:
    """Penalizes false neighbors: points in the projected k-neighborhood that
    are not data-space neighbors, weighted by their data-space rank excess."""
    n = _check_pair(data_cache, proj_cache)
    norm = _trust_normalizer(n, k)
    intruders = proj_cache.knn_mask(k) & ~data_cache.knn_mask(k)
    penalty = (data_cache.rank - k)[intruders].sum()
    return 1.0 - norm * float(penalty)


def continuity(
    data_cache: DistanceRankCache, proj_cache: DistanceRankCache, k: int
) -> float:
    """Penalizes missing neighbors: data-space k-neighbors absent from the
    projected k-neighborhood, weighted by their projected rank excess."""
    n = _check_pair(data_cache, proj_cache)
    norm = _trust_normalizer(n, k)
    missing = data_cache.knn_mask(k) & ~proj_cache.knn_mask(k)
    penalty = (proj_cache.rank - k)[missing].sum()
    return 1.0 - norm * float(penalty)


def sweep_k_values(
    n: int, fracs: tuple[float, float], count: int = SWEEP_COUNT
) -> tuple[int, ...]:
    """Neighborhood sizes for a sweep: round(N*f) for ``count`` evenly spaced
    fractions inclusive of both endpoints, clamped to [1, N-1], deduplicated
    preserving order. Rounding is half away from zero."""
    lo, hi = fracs
    ks = []
    for f in np.linspace(lo, hi, count):
        k = int(np.floor(n * f + 0.5))
        k = min(max(k, 1), n - 1)
        if not ks or ks[-1] != k:
            ks.append(k)
    return tuple(ks)


def multiscale_sweep(
    metric: str,
    data_cache: DistanceRankCache | None,
    proj_cache: DistanceRankCache,
    labels: np.ndarray | None = None,
    fracs: tuple[float, float] | None = None,
    count: int = SWEEP_COUNT,
) -> MetricCurve:
    """Evaluate one neighborhood metric over its multi-scale k sweep.

    ``metric`` is one of ``neighborhood_preservation``, ``neighborhood_hit``,
    ``trustworthiness``, ``continuity``. Neighborhood hit needs ``labels``
    and sweeps smaller fractions by default.
    """
    if metric == "neighborhood_hit":
        if labels is None:
            raise ValueError("neighborhood_hit sweep requires labels")
        fn = lambda k: neighborhood_hit(proj_cache, labels, k)  # noqa: E731
        default = HIT_SWEEP
        n = proj_cache.num_points
    else:
        if data_cache is None:
            raise ValueError(f"{metric} sweep requires the data cache")
        fns = {
            "neighborhood_preservation": neighborhood_preservation,
            "trustworthiness": trustworthiness,
            "continuity": continuity,
        }
        if metric not in fns:
            raise ValueError(f"unknown metric {metric!r}")
        fn = lambda k: fns[metric](data_cache, proj_cache, k)  # noqa: E731
        default = NEIGHBOR_SWEEP
        n = _check_pair(data_cache, proj_cache)
    ks = sweep_k_values(n, fracs if fracs is not None else default, count)
    return MetricCurve(k_values=ks, scores=tuple(fn(k) for k in ks))


def shepard_points(data_dist: np.ndarray, proj_dist: np.ndarray) -> ShepardPoints:
    """Collect every unordered pair's (data distance, projected distance),
    from precomputed distance matrices."""
    n = data_dist.shape[0]
    if proj_dist.shape[0] != n:
        raise ValueError(
            f"distance matrix size mismatch: {n} vs {proj_dist.shape[0]}"
        )
    iu = np.triu_indices(n, k=1)
    return ShepardPoints(d=data_dist[iu], d_bar=proj_dist[iu])


def standardize(x: np.ndarray) -> np.ndarray:
    """Z-score with population standard deviation; an all-equal vector maps
    to zeros rather than dividing by zero."""
    x = np.asarray(x, dtype=np.float64)
    centered = x - x.mean()
    std = float(np.sqrt(np.mean(centered**2)))
    if std == 0.0:
        return np.zeros_like(x)
    return centered / std


def normalized_stress(sp: ShepardPoints, scaling: str = "zscore") -> float:
    """Sum of squared discrepancies between the two distance sets over the sum
    of squared data distances, after rescaling both sets.

    ``scaling`` is ``zscore`` (default; subtract mean, divide by standard
    deviation) or ``rms`` (divide by the root mean square only), the latter
    kept as a switch for sensitivity studies.
    """
    if len(sp) < 2:
        raise ValueError("need at least 2 pairs")
    if scaling == "zscore":
        if float(np.var(sp.d)) == 0.0:
            raise ValueError("degenerate geometry: zero variance in data distances")
        a = standardize(sp.d)
        b = standardize(sp.d_bar)
    elif scaling == "rms":
        rms_d = float(np.sqrt(np.mean(sp.d**2)))
        if rms_d == 0.0:
            raise ValueError("degenerate geometry: all data distances are zero")
        rms_b = float(np.sqrt(np.mean(sp.d_bar**2)))
        a = sp.d / rms_d
        b = sp.d_bar / rms_b if rms_b > 0.0 else np.zeros_like(sp.d_bar)
    else:
        raise ValueError(f"unknown scaling {scaling!r}")
    return float(np.sum((a - b) ** 2) / np.sum(a**2))


# ---------------------------------------------------------------------------
# Correlations
# ---------------------------------------------------------------------------


def average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks with tied values receiving the mean of their positions."""
    x = np.asarray(x)
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    # boundaries of runs of equal values in the sorted sequence
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], n]
    mean_rank = (starts + ends - 1) / 2.0 + 1.0
    run_id = np.cumsum(np.r_[True, xs[1:] != xs[:-1]]) - 1
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = mean_rank[run_id]
    return ranks


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ac = a - a.mean()
    bc = b - b.mean()
    va = float(np.sum(ac**2))
    vb = float(np.sum(bc**2))
    if va == 0.0:
        raise ValueError("zero variance in first coordinate")
    if vb == 0.0:
        raise ValueError("zero variance in second coordinate")
    return float(np.sum(ac * bc) / np.sqrt(va * vb))


_INVERSION_LEAF = 128


def _sorted_with_inversions(b: np.ndarray) -> tuple[np.ndarray, int]:
    """Merge-sort style divide and conquer: returns (sorted copy, number of
    index pairs i<j with b[i] > b[j])."""
    n = b.shape[0]
    if n <= _INVERSION_LEAF:
        inv = int(np.count_nonzero(np.triu(b[:, None] > b[None, :], k=1)))
        return np.sort(b, kind="stable"), inv
    mid = n // 2
    left, il = _sorted_with_inversions(b[:mid])
    right, ir = _sorted_with_inversions(b[mid:])
    # cross pairs (x in left, y in right) with x > y
    le = np.searchsorted(left, right, side="right")
    cross = left.shape[0] * right.shape[0] - int(le.sum())
    return np.sort(np.concatenate([left, right]), kind="stable"), il + ir + cross


def count_inversions(b: np.ndarray) -> int:
    """Number of pairs i < j with b[i] > b[j], in O(P log P)."""
    return _sorted_with_inversions(np.asarray(b))[1]


def _tie_pair_count(counts: np.ndarray) -> int:
    return int(np.sum(counts * (counts - 1)) // 2)


def _kendall(a: np.ndarray, b: np.ndarray) -> float:
    """Kendall tau-b via inversion counting, with tie correction."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a.shape[0]
    idx = np.lexsort((b, a))
    a_s = a[idx]
    b_s = b[idx]

    n0 = n * (n - 1) // 2
    _, ca = np.unique(a, return_counts=True)
    _, cb = np.unique(b, return_counts=True)
    ties_a = _tie_pair_count(ca)
    ties_b = _tie_pair_count(cb)
    # joint ties: runs of equal (a, b) rows after the lexsort
    same = (a_s[1:] == a_s[:-1]) & (b_s[1:] == b_s[:-1])
    run_lengths = np.diff(np.r_[0, np.flatnonzero(~same) + 1, n])
    ties_ab = _tie_pair_count(run_lengths)

    denom_a = n0 - ties_a
    denom_b = n0 - ties_b
    if denom_a == 0:
        raise ValueError("zero variance in first coordinate")
    if denom_b == 0:
        raise ValueError("zero variance in second coordinate")

    discordant = count_inversions(b_s)
    con_minus_dis = n0 - ties_a - ties_b + ties_ab - 2 * discordant
    return float(con_minus_dis / np.sqrt(float(denom_a) * float(denom_b)))


CORRELATION_KINDS = ("pearson", "spearman", "kendall")


def correlation(a: np.ndarray, b: np.ndarray, kind: str) -> float:
    """Correlation between two paired sequences.

    Pearson is the product-moment coefficient; Spearman is Pearson on
    mean-rank-transformed values; Kendall is tau-b with tie correction,
    computed by inversion counting rather than pair enumeration.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.shape[0] < 2:
        raise ValueError("need at least 2 pairs")
    if kind == "pearson":
        return _pearson(a, b)
    if kind == "spearman":
        return _pearson(average_ranks(a), average_ranks(b))
    if kind == "kendall":
        return _kendall(a, b)
    raise ValueError(f"unknown correlation kind {kind!r}")


def rank_difference_histogram(
    a: np.ndarray, b: np.ndarray, bins: int = 20
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of |rank(a) - rank(b)| over all entries, binned uniformly on
    [0, P-1] and normalized to frequencies.

    Returns ``(edges, frequencies)`` with ``len(edges) == bins + 1``.
    A left-peaked histogram indicates monotone agreement of the two sets.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape or a.shape[0] < 2:
        raise ValueError("need two equal-length sequences of at least 2 entries")
    p = a.shape[0]
    diffs = np.abs(average_ranks(a) - average_ranks(b))
    edges = np.linspace(0.0, p - 1.0, bins + 1)
    counts, _ = np.histogram(diffs, bins=edges)
    return edges, counts / p
