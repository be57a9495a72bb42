"""Temporal stability metrics for dynamic projections.

Stability is measured on per-point displacements between consecutive
timesteps: the change of a sample's attributes in data space against the
movement of its projected point in 2D. A stable technique makes the 2D
movement track the data change; temporal stress and the three temporal
correlations quantify this over all points and transitions pooled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DynamicDataset, ProjectionSequence
from .spatial import correlation, standardize


@dataclass(frozen=True)
class DisplacementSet:
    """Per-point, per-transition displacement norms.

    ``point_index[m]`` moved by ``delta_data[m]`` in data space and
    ``delta_proj[m]`` in the projection between frames ``t_index[m]`` and
    ``t_index[m] + 1`` (0-based source frame). Entries are ordered by
    transition, then point index; there are N*(T-1) of them.
    """

    point_index: np.ndarray
    t_index: np.ndarray
    delta_data: np.ndarray
    delta_proj: np.ndarray

    def __len__(self) -> int:
        return self.delta_data.shape[0]


def displacements(d: DynamicDataset, p: ProjectionSequence) -> DisplacementSet:
    """Euclidean norms of consecutive-timestep differences per point, in the
    data space and in the projection."""
    if p.num_timesteps != d.num_timesteps or p.num_samples != d.num_samples:
        raise ValueError(
            f"shape mismatch: dataset is T={d.num_timesteps}, N={d.num_samples}; "
            f"projection is T={p.num_timesteps}, N={p.num_samples}"
        )
    n, t_count = d.num_samples, d.num_timesteps
    deltas, deltas_bar = [], []
    for t in range(t_count - 1):
        deltas.append(np.linalg.norm(d.revisions[t + 1] - d.revisions[t], axis=1))
        deltas_bar.append(np.linalg.norm(p.frames[t + 1] - p.frames[t], axis=1))
    return DisplacementSet(
        point_index=np.tile(np.arange(n), t_count - 1),
        t_index=np.repeat(np.arange(t_count - 1), n),
        delta_data=np.concatenate(deltas),
        delta_proj=np.concatenate(deltas_bar),
    )


def temporal_stress(ds: DisplacementSet) -> float:
    """Sum of squared displacement discrepancies over the sum of squared data
    displacements, after z-scoring both displacement vectors.

    Entries where the data did not move but the projection did are retained:
    they are precisely the instability signal. Only a dataset with no
    movement variance at all is rejected.
    """
    if len(ds) < 2:
        raise ValueError("need at least 2 displacement entries")
    if float(np.var(ds.delta_data)) == 0.0:
        raise ValueError("temporally degenerate dataset: zero variance in data movement")
    a = standardize(ds.delta_data)
    b = standardize(ds.delta_proj)
    return float(np.sum((a - b) ** 2) / np.sum(a**2))


def temporal_correlation(ds: DisplacementSet, kind: str) -> float:
    """Correlation between data-space and projected displacements, pooled over
    all points and consecutive timesteps."""
    return correlation(ds.delta_data, ds.delta_proj, kind)
