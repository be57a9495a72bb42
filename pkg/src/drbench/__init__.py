"""drbench: benchmarking suite for dimensionality reduction of
time-dependent multivariate data.

Dynamic projection techniques (PCA / t-SNE under global and per-timeframe
strategies, and a movement-penalized joint t-SNE), six spatial quality
metrics, four temporal stability metrics, seeded synthetic dataset
generators, and a harness that turns the technique-by-dataset matrix into
machine-readable reports and static plots.
"""

from .dataset import (
    DataError,
    DatasetTraits,
    DynamicDataset,
    ProjectionSequence,
    ValidationReport,
    compute_traits,
    load_dataset,
    load_projection,
    save_dataset,
    save_projection,
    validate_dataset,
)
from .generators import gen_gaussians, gen_sorts, gen_walk
from .harness import (
    METRIC_COLUMNS,
    BenchmarkTable,
    MetricReport,
    SweepSpec,
    evaluate_projection,
    meta_projection,
    normalize_columns,
    run_benchmark,
    trait_metric_correlation,
)
from .neighbors import DistanceRankCache, knn_indices, pairwise_distances, rank_cache
from .projectors import (
    DTSNEConfig,
    PCAModel,
    TSNEConfig,
    dtsne,
    fit_pca,
    project_dynamic,
    transform_pca,
    tsne,
)
from .spatial import (
    MetricCurve,
    ShepardPoints,
    continuity,
    correlation,
    multiscale_sweep,
    neighborhood_hit,
    neighborhood_preservation,
    normalized_stress,
    rank_difference_histogram,
    shepard_points,
    trustworthiness,
)
from .temporal import DisplacementSet, displacements, temporal_correlation, temporal_stress

__version__ = "0.1.0"

__all__ = [
    "BenchmarkTable",
    "DataError",
    "DatasetTraits",
    "DisplacementSet",
    "DistanceRankCache",
    "DTSNEConfig",
    "DynamicDataset",
    "METRIC_COLUMNS",
    "MetricCurve",
    "MetricReport",
    "PCAModel",
    "ProjectionSequence",
    "ShepardPoints",
    "SweepSpec",
    "TSNEConfig",
    "ValidationReport",
    "compute_traits",
    "continuity",
    "correlation",
    "displacements",
    "dtsne",
    "evaluate_projection",
    "fit_pca",
    "gen_gaussians",
    "gen_sorts",
    "gen_walk",
    "knn_indices",
    "load_dataset",
    "load_projection",
    "meta_projection",
    "multiscale_sweep",
    "neighborhood_hit",
    "neighborhood_preservation",
    "normalize_columns",
    "normalized_stress",
    "pairwise_distances",
    "project_dynamic",
    "rank_cache",
    "rank_difference_histogram",
    "run_benchmark",
    "save_dataset",
    "save_projection",
    "shepard_points",
    "temporal_correlation",
    "temporal_stress",
    "trait_metric_correlation",
    "transform_pca",
    "trustworthiness",
    "tsne",
    "validate_dataset",
]
