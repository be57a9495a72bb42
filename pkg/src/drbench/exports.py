"""Machine-readable report files for a benchmark run.

All CSV floats are written with ``repr`` so parsing them back reproduces the
in-memory values exactly; ``results.json`` round-trips the whole table. The
only non-deterministic field across reruns is the provenance timestamp,
which never appears in CSV outputs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dataset import DataError, DatasetTraits
from .harness import (
    METRIC_COLUMNS,
    BenchmarkTable,
    CellResult,
    MetricReport,
    meta_projection,
    normalize_columns,
    trait_metric_correlation,
)
from .spatial import MetricCurve, rank_difference_histogram
from .svg import heatmap_svg, scatter_svg, trails_svg

HISTOGRAM_BINS = 20


def _f(v: float) -> str:
    return repr(float(v))


def _cell_dirname(cell: CellResult) -> str:
    safe = lambda s: "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in s)  # noqa: E731
    return f"{safe(cell.technique)}__{safe(cell.dataset)}"


def results_csv_text(table: BenchmarkTable) -> str:
    lines = ["technique,dataset,status," + ",".join(METRIC_COLUMNS)]
    for cell in table.cells:
        if cell.status == "ok":
            vals = ",".join(_f(cell.metrics.values[c]) for c in METRIC_COLUMNS)
        else:
            vals = ",".join([""] * len(METRIC_COLUMNS))
        lines.append(f"{cell.technique},{cell.dataset},{cell.status},{vals}")
    return "\n".join(lines) + "\n"


def table_to_json(table: BenchmarkTable) -> dict:
    cells = []
    for cell in table.cells:
        entry: dict = {
            "technique": cell.technique,
            "dataset": cell.dataset,
            "status": cell.status,
        }
        if cell.error is not None:
            entry["error"] = cell.error
        if cell.metrics is not None:
            entry["metrics"] = {c: cell.metrics.values[c] for c in METRIC_COLUMNS}
            entry["curves"] = {
                name: {"k": list(curve.k_values), "scores": list(curve.scores)}
                for name, curve in cell.metrics.curves.items()
            }
        cells.append(entry)
    return {
        "provenance": table.provenance,
        "traits": {name: t.as_dict() for name, t in table.traits.items()},
        "cells": cells,
    }


def load_results(path: str | Path) -> BenchmarkTable:
    """Rebuild a BenchmarkTable (metrics, traits, provenance; no raw
    artifacts) from a results.json file."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read results file {path}: {exc}") from exc
    cells = []
    for entry in payload["cells"]:
        metrics = None
        if "metrics" in entry:
            curves = {
                name: MetricCurve(
                    k_values=tuple(int(k) for k in c["k"]),
                    scores=tuple(float(s) for s in c["scores"]),
                )
                for name, c in entry.get("curves", {}).items()
            }
            metrics = MetricReport(
                values={c: float(entry["metrics"][c]) for c in METRIC_COLUMNS},
                curves=curves,
            )
        cells.append(
            CellResult(
                technique=entry["technique"],
                dataset=entry["dataset"],
                status=entry["status"],
                metrics=metrics,
                error=entry.get("error"),
            )
        )
    traits = {
        name: DatasetTraits(**spec) for name, spec in payload["traits"].items()
    }
    return BenchmarkTable(cells=cells, traits=traits, provenance=payload["provenance"])


def _write(path: Path, text: str, written: list[Path]) -> None:
    path.write_text(text, newline="\n")
    written.append(path)


def _histogram_csv(a: np.ndarray, b: np.ndarray, bins: int) -> str:
    edges, freqs = rank_difference_histogram(a, b, bins)
    lines = ["bin_low,bin_high,frequency"]
    for i, freq in enumerate(freqs):
        lines.append(f"{_f(edges[i])},{_f(edges[i + 1])},{_f(freq)}")
    return "\n".join(lines) + "\n"


def export_analysis(table: BenchmarkTable, out: Path, written: list[Path]) -> None:
    """Table-level artifacts: normalized matrix, trait correlations, overview
    heatmap, meta-projection. Skips analyses whose preconditions the table
    does not meet (too few datasets or cells)."""
    normalized = normalize_columns(table)
    lines = ["technique,dataset," + ",".join(METRIC_COLUMNS)]
    for (tech, ds), row in zip(normalized.keys, normalized.matrix):
        lines.append(f"{tech},{ds}," + ",".join(_f(v) for v in row))
    _write(out / "normalized.csv", "\n".join(lines) + "\n", written)

    row_labels = [f"{tech} / {ds}" for tech, ds in normalized.keys]
    _write(
        out / "overview.svg",
        heatmap_svg(normalized.matrix, row_labels, list(METRIC_COLUMNS)),
        written,
    )

    try:
        tc = trait_metric_correlation(table)
    except DataError:
        tc = None
    if tc is not None:
        lines = ["group," + ",".join(tc.trait_names)]
        for gi, group in enumerate(tc.groups):
            lines.append(group + "," + ",".join(_f(v) for v in tc.matrix[gi]))
        _write(out / "trait_correlation.csv", "\n".join(lines) + "\n", written)

    try:
        meta = meta_projection(table, seed=int(table.provenance.get("meta_seed", 0)))
    except DataError:
        meta = None
    if meta is not None:
        lines = ["technique,dataset,x,y"]
        for i in range(len(meta.techniques)):
            lines.append(
                f"{meta.techniques[i]},{meta.datasets[i]},"
                f"{_f(meta.coords[i, 0])},{_f(meta.coords[i, 1])}"
            )
        _write(out / "meta_projection.csv", "\n".join(lines) + "\n", written)
        _write(
            out / "meta_projection.svg",
            scatter_svg(meta.coords, meta.datasets, meta.techniques),
            written,
        )


def export_report(
    table: BenchmarkTable, out_dir: str | Path, bins: int = HISTOGRAM_BINS
) -> list[Path]:
    """Write the full report tree for one benchmark run.

    Emits ``results.json``, ``results.csv``, ``normalized.csv``,
    ``trait_correlation.csv`` (3+ datasets), ``meta_projection.csv`` (5+
    cells), ``overview.svg``, and per-cell Shepard/displacement CSVs,
    rank-difference histograms, and trail SVGs for cells evaluated with
    artifacts retained.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    _write(
        out / "results.json",
        json.dumps(table_to_json(table), indent=2) + "\n",
        written,
    )
    _write(out / "results.csv", results_csv_text(table), written)
    export_analysis(table, out, written)

    for cell in table.cells:
        art = cell.artifacts
        if cell.status != "ok" or art is None:
            continue
        cell_dir = out / "cells" / _cell_dirname(cell)
        cell_dir.mkdir(parents=True, exist_ok=True)

        lines = ["d,dbar"]
        for dv, bv in zip(art.shepard_d, art.shepard_d_bar):
            lines.append(f"{_f(dv)},{_f(bv)}")
        _write(cell_dir / "shepard_spatial.csv", "\n".join(lines) + "\n", written)

        lines = ["point,t,delta,delta_bar"]
        for m in range(len(art.disp)):
            lines.append(
                f"{int(art.disp.point_index[m])},{int(art.disp.t_index[m])},"
                f"{_f(art.disp.delta_data[m])},{_f(art.disp.delta_proj[m])}"
            )
        _write(cell_dir / "displacements.csv", "\n".join(lines) + "\n", written)

        _write(
            cell_dir / "rank_hist_spatial.csv",
            _histogram_csv(art.shepard_d, art.shepard_d_bar, bins),
            written,
        )
        _write(
            cell_dir / "rank_hist_temporal.csv",
            _histogram_csv(art.disp.delta_data, art.disp.delta_proj, bins),
            written,
        )
        _write(
            cell_dir / "trails.svg",
            trails_svg(art.frames, art.labels),
            written,
        )
    return written
