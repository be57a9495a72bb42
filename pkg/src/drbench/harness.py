"""Benchmark harness: run the technique-by-dataset matrix and aggregate the
twelve metrics into a result table, plus the table-level analyses
(per-column normalization, trait correlations, meta-projection).

Failed cells are recorded with their error and the run continues; the table
shape (every configured pair present) is the contract.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from .dataset import (
    TRAIT_NAMES,
    DataError,
    DatasetTraits,
    DynamicDataset,
    ProjectionSequence,
    compute_traits,
    load_dataset,
    validate_dataset,
)
from .generators import GENERATORS
from .neighbors import rank_cache
from .projectors import (
    DTSNEConfig,
    TSNEConfig,
    project_dynamic,
    technique_label,
    tsne,
)
from .spatial import (
    HIT_SWEEP,
    NEIGHBOR_SWEEP,
    SWEEP_COUNT,
    MetricCurve,
    correlation,
    multiscale_sweep,
    normalized_stress,
    shepard_points,
)
from .temporal import DisplacementSet, displacements, temporal_correlation, temporal_stress

METRIC_COLUMNS = (
    "S_NP",
    "S_NH",
    "S_Trust",
    "S_Cont",
    "S_Stress",
    "S_Pearson",
    "S_Spearman",
    "S_Kendall",
    "T_Stress",
    "T_Pearson",
    "T_Spearman",
    "T_Kendall",
)

# Lower is better for these; per-column normalization inverts them.
STRESS_COLUMNS = frozenset({"S_Stress", "T_Stress"})

SWEPT_METRICS = ("S_NP", "S_NH", "S_Trust", "S_Cont")

METRIC_GROUPS = {
    "distance": ("S_Stress", "S_Pearson", "S_Spearman", "S_Kendall"),
    "neighborhood": ("S_NP", "S_NH", "S_Trust", "S_Cont"),
    "temporal": ("T_Stress", "T_Pearson", "T_Spearman", "T_Kendall"),
}


@dataclass(frozen=True)
class SweepSpec:
    neighbor_fracs: tuple[float, float] = NEIGHBOR_SWEEP
    hit_fracs: tuple[float, float] = HIT_SWEEP
    count: int = SWEEP_COUNT


@dataclass(frozen=True)
class MetricReport:
    """The twelve aggregate metric values for one (technique, dataset) cell,
    plus the per-k curves of the four swept neighborhood metrics."""

    values: dict[str, float]
    curves: dict[str, MetricCurve]

    def __post_init__(self):
        missing = [c for c in METRIC_COLUMNS if c not in self.values]
        if missing:
            raise ValueError(f"metric report missing columns: {missing}")

    def vector(self) -> np.ndarray:
        return np.array([self.values[c] for c in METRIC_COLUMNS], dtype=np.float64)


@dataclass
class CellArtifacts:
    """Raw per-cell material behind the aggregates, kept for report exports."""

    shepard_d: np.ndarray
    shepard_d_bar: np.ndarray
    disp: DisplacementSet
    frames: tuple[np.ndarray, ...]
    labels: np.ndarray
    class_names: tuple[str, ...]


@dataclass
class CellResult:
    technique: str
    dataset: str
    status: str = "ok"
    metrics: MetricReport | None = None
    error: str | None = None
    artifacts: CellArtifacts | None = field(default=None, repr=False, compare=False)


@dataclass
class BenchmarkTable:
    cells: list[CellResult]
    traits: dict[str, DatasetTraits]
    provenance: dict

    def ok_cells(self) -> list[CellResult]:
        return [c for c in self.cells if c.status == "ok"]


def evaluate_projection(
    d: DynamicDataset,
    p: ProjectionSequence,
    sweeps: SweepSpec | None = None,
    keep_artifacts: bool = False,
) -> MetricReport | tuple[MetricReport, CellArtifacts]:
    """Evaluate all twelve metrics for one projection of one dataset.

    Per-revision metrics are averaged over timesteps; the temporal metrics
    are computed once on the pooled displacements. Curves are averaged
    pointwise, which is valid because the sample count is constant over time
    so every revision sweeps the same k values.
    """
    sweeps = sweeps or SweepSpec()
    if p.num_timesteps != d.num_timesteps or p.num_samples != d.num_samples:
        raise ValueError(
            f"projection {p.technique!r} does not match dataset {d.name!r}: "
            f"T={p.num_timesteps} vs {d.num_timesteps}, N={p.num_samples} vs {d.num_samples}"
        )

    per_rev: dict[str, list[float]] = {c: [] for c in METRIC_COLUMNS}
    curve_scores: dict[str, list[np.ndarray]] = {}
    curve_ks: dict[str, tuple[int, ...]] = {}
    shep_d, shep_dbar = [], []

    for rev, frame in zip(d.revisions, p.frames):
        data_cache = rank_cache(rev)
        proj_cache = rank_cache(frame)
        swept = {
            "S_NP": multiscale_sweep(
                "neighborhood_preservation", data_cache, proj_cache,
                fracs=sweeps.neighbor_fracs, count=sweeps.count,
            ),
            "S_Trust": multiscale_sweep(
                "trustworthiness", data_cache, proj_cache,
                fracs=sweeps.neighbor_fracs, count=sweeps.count,
            ),
            "S_Cont": multiscale_sweep(
                "continuity", data_cache, proj_cache,
                fracs=sweeps.neighbor_fracs, count=sweeps.count,
            ),
            "S_NH": multiscale_sweep(
                "neighborhood_hit", None, proj_cache, labels=d.labels,
                fracs=sweeps.hit_fracs, count=sweeps.count,
            ),
        }
        for name, curve in swept.items():
            per_rev[name].append(curve.aggregate)
            curve_ks[name] = curve.k_values
            curve_scores.setdefault(name, []).append(np.array(curve.scores))

        sp = shepard_points(data_cache.dist, proj_cache.dist)
        per_rev["S_Stress"].append(normalized_stress(sp))
        for kind in ("pearson", "spearman", "kendall"):
            per_rev[f"S_{kind.capitalize()}"].append(correlation(sp.d, sp.d_bar, kind))
        if keep_artifacts:
            shep_d.append(sp.d)
            shep_dbar.append(sp.d_bar)

    disp = displacements(d, p)
    temporal_values = {
        "T_Stress": temporal_stress(disp),
        "T_Pearson": temporal_correlation(disp, "pearson"),
        "T_Spearman": temporal_correlation(disp, "spearman"),
        "T_Kendall": temporal_correlation(disp, "kendall"),
    }

    values = {name: float(np.mean(scores)) for name, scores in per_rev.items() if scores}
    values.update(temporal_values)
    curves = {
        name: MetricCurve(
            k_values=curve_ks[name],
            scores=tuple(float(v) for v in np.mean(curve_scores[name], axis=0)),
        )
        for name in SWEPT_METRICS
    }
    report = MetricReport(values=values, curves=curves)
    if not keep_artifacts:
        return report
    artifacts = CellArtifacts(
        shepard_d=np.concatenate(shep_d),
        shepard_d_bar=np.concatenate(shep_dbar),
        disp=disp,
        frames=p.frames,
        labels=np.asarray(d.labels),
        class_names=d.class_names,
    )
    return report, artifacts


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _resolve_dataset(spec: dict) -> DynamicDataset:
    if "path" in spec:
        d = load_dataset(spec["path"])
    elif "generator" in spec:
        name = spec["generator"]
        if name not in GENERATORS:
            raise DataError(f"unknown generator {name!r}")
        d = GENERATORS[name](seed=int(spec.get("seed", 0)), **spec.get("params", {}))
    else:
        raise DataError(f"dataset spec needs 'path' or 'generator': {spec}")
    if "name" in spec:
        d = replace(d, name=str(spec["name"]))
    report = validate_dataset(d)
    if not report.ok:
        first = report.violations[0]
        raise DataError(
            f"dataset {d.name!r} is invalid ({len(report)} violations; "
            f"first: {first.message})"
        )
    return d


def _technique_config(spec: dict):
    """Resolve a technique spec into (label, callable dataset -> projection)."""
    name = spec.get("name", "").lower()
    strategy = spec.get("strategy", "global")
    seed = int(spec.get("seed", 0))
    params = dict(spec.get("params", {}))

    if name == "identity":
        def run_identity(d: DynamicDataset) -> ProjectionSequence:
            if d.num_dims != 2:
                raise DataError(
                    f"identity technique requires 2D data, got n={d.num_dims}"
                )
            return ProjectionSequence(
                dataset_name=d.name,
                technique="identity",
                frames=tuple(rev.copy() for rev in d.revisions),
            )

        return "identity", run_identity

    try:
        if name == "pca":
            label = technique_label("pca", strategy)
            return label, lambda d: project_dynamic(d, "pca", strategy)

        if name == "tsne":
            cfg = TSNEConfig(seed=seed, **params)
            label = technique_label("tsne", strategy)
            return label, lambda d: project_dynamic(d, "tsne", strategy, cfg)

        if name == "dtsne":
            movement = params.pop("movement_penalty", 0.1)
            cfg = DTSNEConfig(
                base=TSNEConfig(seed=seed, **params), movement_penalty=movement
            )
            return "dt-SNE", lambda d: project_dynamic(d, "dtsne", config=cfg)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid technique spec {spec!r}: {exc}") from exc

    raise DataError(f"unknown technique {spec.get('name')!r}")


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _resolve_sweeps(config: dict) -> SweepSpec:
    spec = config.get("k_sweep", {})
    return SweepSpec(
        neighbor_fracs=tuple(spec.get("neighbor", NEIGHBOR_SWEEP)),
        hit_fracs=tuple(spec.get("hit", HIT_SWEEP)),
        count=int(spec.get("count", SWEEP_COUNT)),
    )


def run_benchmark(config: dict, jobs: int = 1, keep_artifacts: bool = True) -> BenchmarkTable:
    """Run every configured (technique, dataset) cell and assemble the table.

    Cells are independent work units; ``jobs`` bounds the worker pool. A
    failing cell is recorded as failed with its error message and the run
    continues.
    """
    if not config.get("datasets"):
        raise DataError("config lists no datasets")
    if not config.get("techniques"):
        raise DataError("config lists no techniques")
    sweeps = _resolve_sweeps(config)

    datasets: list[DynamicDataset | None] = []
    dataset_errors: list[str | None] = []
    names: list[str] = []
    for spec in config["datasets"]:
        try:
            d = _resolve_dataset(spec)
            if d.name in names:
                raise DataError(
                    f"duplicate dataset name {d.name!r}; give one entry an "
                    "explicit 'name'"
                )
            datasets.append(d)
            dataset_errors.append(None)
            names.append(d.name)
        except (DataError, OSError, TypeError, ValueError) as exc:
            datasets.append(None)
            dataset_errors.append(str(exc))
            names.append(str(spec.get("name") or spec.get("path") or spec.get("generator")))

    techniques = []
    seeds = {}
    for spec in config["techniques"]:
        label, runner = _technique_config(spec)
        techniques.append((label, runner))
        seeds[label] = int(spec.get("seed", 0))

    traits: dict[str, DatasetTraits] = {}
    for d in datasets:
        if d is not None:
            traits[d.name] = compute_traits(d)

    tasks = []
    for di, d in enumerate(datasets):
        for label, runner in techniques:
            tasks.append((label, names[di], d, runner, dataset_errors[di]))

    def run_cell(task) -> CellResult:
        label, ds_name, d, runner, ds_error = task
        if d is None:
            return CellResult(
                technique=label, dataset=ds_name, status="failed", error=ds_error
            )
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                projection = runner(d)
                result = evaluate_projection(
                    d, projection, sweeps, keep_artifacts=keep_artifacts
                )
            if keep_artifacts:
                report, artifacts = result
            else:
                report, artifacts = result, None
            return CellResult(
                technique=label,
                dataset=ds_name,
                metrics=report,
                artifacts=artifacts,
            )
        except (DataError, ValueError, np.linalg.LinAlgError) as exc:
            return CellResult(
                technique=label, dataset=ds_name, status="failed", error=str(exc)
            )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(run_cell, tasks))
    else:
        cells = [run_cell(t) for t in tasks]

    provenance = {
        "config_hash": config_hash(config),
        "seeds": seeds,
        "created": datetime.now(timezone.utc).isoformat(),
    }
    return BenchmarkTable(cells=cells, traits=traits, provenance=provenance)


# ---------------------------------------------------------------------------
# Table-level analyses
# ---------------------------------------------------------------------------


@dataclass
class NormalizedTable:
    """Per-column min-max normalized metric values, stress columns inverted
    so 1 is always best."""

    keys: list[tuple[str, str]]  # (technique, dataset) of each row
    matrix: np.ndarray  # (n_cells, 12)
    warnings: list[str]


def normalize_metric_matrix(
    matrix: np.ndarray, columns: tuple[str, ...] = METRIC_COLUMNS
) -> tuple[np.ndarray, list[str]]:
    """Min-max normalize each column to [0, 1]; stress-type columns are then
    inverted. A constant column maps to all ones with a recorded warning."""
    matrix = np.asarray(matrix, dtype=np.float64)
    out = np.empty_like(matrix)
    notes = []
    for j, name in enumerate(columns):
        col = matrix[:, j]
        lo, hi = float(col.min()), float(col.max())
        if hi == lo:
            out[:, j] = 1.0
            notes.append(f"column {name} is constant ({lo}); normalized to 1.0")
            continue
        scaled = (col - lo) / (hi - lo)
        out[:, j] = 1.0 - scaled if name in STRESS_COLUMNS else scaled
    return out, notes


def normalize_columns(table: BenchmarkTable) -> NormalizedTable:
    ok = table.ok_cells()
    if not ok:
        raise DataError("no successful cells to normalize")
    matrix = np.stack([c.metrics.vector() for c in ok])
    normalized, notes = normalize_metric_matrix(matrix)
    return NormalizedTable(
        keys=[(c.technique, c.dataset) for c in ok],
        matrix=normalized,
        warnings=notes,
    )


@dataclass
class TraitCorrelationTable:
    """Pearson correlation of per-dataset metric-group scores against dataset
    traits; undefined entries (constant trait or constant score) are NaN."""

    groups: tuple[str, ...]
    trait_names: tuple[str, ...]
    matrix: np.ndarray  # (groups, traits), NaN where undefined


def trait_metric_correlation(table: BenchmarkTable) -> TraitCorrelationTable:
    normalized = normalize_columns(table)
    datasets = [name for name in table.traits if any(ds == name for _, ds in normalized.keys)]
    if len(datasets) < 3:
        raise DataError(f"need at least 3 datasets with results, got {len(datasets)}")

    group_names = tuple(METRIC_GROUPS)
    col_index = {c: j for j, c in enumerate(METRIC_COLUMNS)}
    scores = np.empty((len(group_names), len(datasets)))
    for gi, group in enumerate(group_names):
        cols = [col_index[c] for c in METRIC_GROUPS[group]]
        for di, ds in enumerate(datasets):
            rows = [i for i, (_, d) in enumerate(normalized.keys) if d == ds]
            scores[gi, di] = float(normalized.matrix[np.ix_(rows, cols)].mean())

    trait_matrix = np.array(
        [[getattr(table.traits[ds], t) for ds in datasets] for t in TRAIT_NAMES],
        dtype=np.float64,
    )
    out = np.full((len(group_names), len(TRAIT_NAMES)), np.nan)
    for gi in range(len(group_names)):
        for ti in range(len(TRAIT_NAMES)):
            # exact constancy check: float mean round-off can leave a constant
            # column with nonzero variance, which must still read as undefined
            if np.all(trait_matrix[ti] == trait_matrix[ti][0]):
                continue
            if np.all(scores[gi] == scores[gi][0]):
                continue
            try:
                out[gi, ti] = correlation(scores[gi], trait_matrix[ti], "pearson")
            except ValueError:
                pass
    return TraitCorrelationTable(
        groups=group_names, trait_names=TRAIT_NAMES, matrix=out
    )


@dataclass
class MetaProjection:
    """2D layout of cells positioned by their normalized 12-metric vectors."""

    techniques: list[str]
    datasets: list[str]
    coords: np.ndarray  # (n_cells, 2)


def meta_projection(table: BenchmarkTable, seed: int = 0) -> MetaProjection:
    normalized = normalize_columns(table)
    n_cells = normalized.matrix.shape[0]
    if n_cells < 5:
        raise DataError(f"need at least 5 successful cells, got {n_cells}")
    # gentler optimizer settings than the data-space defaults: cell counts are
    # tiny, and lr 200 can eject points during exaggeration at this scale
    cfg = TSNEConfig(
        perplexity=min(5.0, n_cells / 4.0),
        seed=seed,
        iterations=1000,
        learning_rate=20.0,
    )
    coords = tsne(normalized.matrix, cfg)
    return MetaProjection(
        techniques=[t for t, _ in normalized.keys],
        datasets=[d for _, d in normalized.keys],
        coords=coords,
    )
