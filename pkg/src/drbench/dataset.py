"""Data model for time-dependent multivariate datasets and their 2D projections.

A dynamic dataset is a list of T revisions, each an N-by-n matrix observed at
one timestep, with one class label per sample. A projection sequence is the
matching list of T N-by-2 scatterplot frames produced by some technique.

Both live on disk as plain directories of CSV frames plus a ``meta.json``,
so every pipeline stage can be inspected with standard tools.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataError(Exception):
    """Raised for unusable inputs: broken files, shape mismatches, degenerate data."""


@dataclass(frozen=True)
class DynamicDataset:
    """T revisions of an N-by-n data matrix plus per-point class labels."""

    name: str
    revisions: tuple[np.ndarray, ...]
    labels: np.ndarray
    class_names: tuple[str, ...]

    @property
    def num_timesteps(self) -> int:
        return len(self.revisions)

    @property
    def num_samples(self) -> int:
        return self.revisions[0].shape[0]

    @property
    def num_dims(self) -> int:
        return self.revisions[0].shape[1]

    def stacked(self) -> np.ndarray:
        """Row-concatenation of all revisions: a (T*N)-by-n matrix."""
        return np.vstack(self.revisions)


@dataclass(frozen=True)
class ProjectionSequence:
    """T frames of N-by-2 projected coordinates for one (dataset, technique) run."""

    dataset_name: str
    technique: str
    frames: tuple[np.ndarray, ...]

    @property
    def num_timesteps(self) -> int:
        return len(self.frames)

    @property
    def num_samples(self) -> int:
        return self.frames[0].shape[0]


@dataclass(frozen=True)
class DatasetTraits:
    """Descriptive statistics of a dataset, used to correlate data character
    with metric outcomes."""

    num_samples: int
    num_timesteps: int
    num_dims: int
    num_classes: int
    intrinsic_dim_ratio: float
    sparsity_ratio: float

    def as_dict(self) -> dict:
        return {
            "num_samples": self.num_samples,
            "num_timesteps": self.num_timesteps,
            "num_dims": self.num_dims,
            "num_classes": self.num_classes,
            "intrinsic_dim_ratio": self.intrinsic_dim_ratio,
            "sparsity_ratio": self.sparsity_ratio,
        }


TRAIT_NAMES = (
    "num_samples",
    "num_timesteps",
    "num_dims",
    "num_classes",
    "intrinsic_dim_ratio",
    "sparsity_ratio",
)


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by :func:`validate_dataset`."""

    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def validate_dataset(d: DynamicDataset) -> ValidationReport:
    """Check every dataset invariant; an empty report means the dataset is valid.

    Violations are data, not failures: malformed datasets are reported entry
    by entry (with revision/row indices) instead of raising.
    """
    report = ValidationReport()
    t_count = len(d.revisions)
    if t_count < 2:
        report.add("too-few-timesteps", f"need at least 2 revisions, got {t_count}")
    if t_count == 0:
        return report

    first = np.asarray(d.revisions[0])
    if first.ndim != 2:
        report.add("bad-rank", f"revision 0 is not a matrix (ndim={first.ndim})")
        return report
    n_samples, n_dims = first.shape
    if n_samples < 3:
        report.add("too-few-samples", f"need at least 3 samples, got {n_samples}")
    if n_dims < 1:
        report.add("too-few-dims", f"need at least 1 dimension, got {n_dims}")

    for t, rev in enumerate(d.revisions):
        rev = np.asarray(rev)
        if rev.ndim != 2 or rev.shape != (n_samples, n_dims):
            report.add(
                "shape-mismatch",
                f"revision {t} has shape {rev.shape}, expected {(n_samples, n_dims)}",
            )
            continue
        bad = np.argwhere(~np.isfinite(rev))
        for i, j in bad:
            report.add(
                "non-finite",
                f"non-finite value at revision {t}, row {i}, column {j}",
            )

    labels = np.asarray(d.labels)
    if labels.shape != (n_samples,):
        report.add(
            "label-count",
            f"expected {n_samples} labels, got shape {labels.shape}",
        )
    else:
        n_classes = len(d.class_names)
        out = np.flatnonzero((labels < 0) | (labels >= n_classes))
        for i in out:
            report.add(
                "label-range",
                f"label {labels[i]} at row {i} does not index a class "
                f"(have {n_classes} classes)",
            )
    return report


def compute_traits(d: DynamicDataset) -> DatasetTraits:
    """Compute dataset traits on the row-concatenation of all revisions.

    Sparsity is the fraction of exactly-zero entries. The intrinsic
    dimensionality ratio is the smallest number of leading principal
    components whose cumulative explained variance reaches 95%, divided by n;
    components are ordered by decreasing eigenvalue.
    """
    stacked = d.stacked()
    total = stacked.size
    sparsity = float(np.count_nonzero(stacked == 0.0)) / total

    centered = stacked - stacked.mean(axis=0)
    cov = centered.T @ centered / max(stacked.shape[0] - 1, 1)
    eigvals = np.linalg.eigvalsh(cov)[::-1]
    eigvals = np.clip(eigvals, 0.0, None)
    total_var = float(eigvals.sum())
    if total_var <= 0.0:
        raise DataError(f"dataset {d.name!r} has zero total variance")
    cumulative = np.cumsum(eigvals) / total_var
    k = int(np.searchsorted(cumulative, 0.95 - 1e-12) + 1)
    k = min(k, d.num_dims)

    return DatasetTraits(
        num_samples=d.num_samples,
        num_timesteps=d.num_timesteps,
        num_dims=d.num_dims,
        num_classes=len(d.class_names),
        intrinsic_dim_ratio=k / d.num_dims,
        sparsity_ratio=sparsity,
    )


# ---------------------------------------------------------------------------
# Directory format
#
# meta.json        {name, N, T, n, class_names}  (+ {technique, dataset_name}
#                  for projection directories)
# labels.csv       one integer per line, N lines
# t0000.csv ...    N lines of n comma-separated decimal values, no header,
#                  '.' decimal separator, '\n' newlines
# ---------------------------------------------------------------------------


def _frame_name(t: int) -> str:
    return f"t{t:04d}.csv"


def _write_matrix(path: Path, m: np.ndarray) -> None:
    lines = [",".join(repr(float(v)) for v in row) for row in m]
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _read_matrix(path: Path, n_cols: int) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines()):
        parts = line.split(",")
        if len(parts) != n_cols:
            raise DataError(
                f"{path.name}:{lineno + 1}: expected {n_cols} values, got {len(parts)}"
            )
        rows.append([float(p) for p in parts])
    return np.array(rows, dtype=np.float64)


def save_dataset(d: DynamicDataset, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "name": d.name,
        "N": d.num_samples,
        "T": d.num_timesteps,
        "n": d.num_dims,
        "class_names": list(d.class_names),
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    (out / "labels.csv").write_text(
        "\n".join(str(int(v)) for v in d.labels) + "\n", newline="\n"
    )
    for t, rev in enumerate(d.revisions):
        _write_matrix(out / _frame_name(t), rev)
    return out


def load_dataset(in_dir: str | Path) -> DynamicDataset:
    src = Path(in_dir)
    meta_path = src / "meta.json"
    if not meta_path.is_file():
        raise DataError(f"not a dataset directory (missing meta.json): {src}")
    meta = json.loads(meta_path.read_text())
    n_samples, t_count, n_dims = int(meta["N"]), int(meta["T"]), int(meta["n"])
    labels = np.array(
        [int(v) for v in (src / "labels.csv").read_text().split()], dtype=np.int64
    )
    if labels.shape != (n_samples,):
        raise DataError(f"labels.csv holds {labels.size} entries, expected {n_samples}")
    revisions = []
    for t in range(t_count):
        m = _read_matrix(src / _frame_name(t), n_dims)
        if m.shape[0] != n_samples:
            raise DataError(
                f"{_frame_name(t)} holds {m.shape[0]} rows, expected {n_samples}"
            )
        revisions.append(m)
    return DynamicDataset(
        name=str(meta["name"]),
        revisions=tuple(revisions),
        labels=labels,
        class_names=tuple(str(c) for c in meta["class_names"]),
    )


def save_projection(
    p: ProjectionSequence,
    out_dir: str | Path,
    labels: np.ndarray | None = None,
    class_names: tuple[str, ...] | None = None,
) -> Path:
    """Write a projection directory: same layout as a dataset, 2 columns per
    line, with ``technique`` and ``dataset_name`` added to meta.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "name": f"{p.dataset_name}__{p.technique}",
        "N": p.num_samples,
        "T": p.num_timesteps,
        "n": 2,
        "class_names": list(class_names) if class_names is not None else [],
        "technique": p.technique,
        "dataset_name": p.dataset_name,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    if labels is not None:
        (out / "labels.csv").write_text(
            "\n".join(str(int(v)) for v in labels) + "\n", newline="\n"
        )
    for t, frame in enumerate(p.frames):
        _write_matrix(out / _frame_name(t), frame)
    return out


def load_projection(in_dir: str | Path) -> ProjectionSequence:
    src = Path(in_dir)
    meta_path = src / "meta.json"
    if not meta_path.is_file():
        raise DataError(f"not a projection directory (missing meta.json): {src}")
    meta = json.loads(meta_path.read_text())
    if "technique" not in meta or "dataset_name" not in meta:
        raise DataError(f"{meta_path} lacks technique/dataset_name fields")
    n_samples, t_count = int(meta["N"]), int(meta["T"])
    frames = []
    for t in range(t_count):
        m = _read_matrix(src / _frame_name(t), 2)
        if m.shape[0] != n_samples:
            raise DataError(
                f"{_frame_name(t)} holds {m.shape[0]} rows, expected {n_samples}"
            )
        frames.append(m)
    return ProjectionSequence(
        dataset_name=str(meta["dataset_name"]),
        technique=str(meta["technique"]),
        frames=tuple(frames),
    )
