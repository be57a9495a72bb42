import json

import numpy as np
import pytest

from drbench.dataset import DataError, DatasetTraits
from drbench.exports import export_report, load_results, results_csv_text
from drbench.generators import gen_gaussians
from drbench.harness import (
    METRIC_COLUMNS,
    BenchmarkTable,
    CellResult,
    MetricReport,
    evaluate_projection,
    meta_projection,
    normalize_columns,
    normalize_metric_matrix,
    run_benchmark,
    trait_metric_correlation,
)


def walk_2d_config(seed=0, n=24, timesteps=4):
    """Config for a small 2D random-walk dataset served by the gaussians
    generator (n=2 so the identity technique applies)."""
    return {
        "generator": "gaussians",
        "seed": seed,
        "params": {"num_classes": 1, "per_class": n, "n": 2, "T": timesteps},
    }


def small_config():
    return {
        "datasets": [
            walk_2d_config(seed=1),
            {
                "generator": "gaussians",
                "seed": 2,
                "name": "gaussians_b",
                "params": {"num_classes": 2, "per_class": 12, "n": 2, "T": 3},
            },
        ],
        "techniques": [
            {"name": "pca", "strategy": "global"},
            {"name": "identity"},
        ],
    }


def fake_report(value, stress=None):
    values = {c: float(value) for c in METRIC_COLUMNS}
    if stress is not None:
        values["S_Stress"] = float(stress)
        values["T_Stress"] = float(stress)
    return MetricReport(values=values, curves={})


def fake_table(metric_rows, traits=None):
    cells = [
        CellResult(technique="tech", dataset=f"d{i}", metrics=r)
        for i, r in enumerate(metric_rows)
    ]
    if traits is None:
        traits = {
            f"d{i}": DatasetTraits(10 + i, 3, 4, 2, 0.5, 0.1)
            for i in range(len(metric_rows))
        }
    return BenchmarkTable(cells=cells, traits=traits, provenance={"config_hash": "x"})


class TestRunBenchmark:
    def test_two_by_two_matrix(self):
        table = run_benchmark(small_config(), keep_artifacts=False)
        assert len(table.cells) == 4
        for cell in table.cells:
            assert cell.status == "ok"
            assert len(cell.metrics.values) == 12
        assert set(table.traits) == {"gaussians", "gaussians_b"}

    def test_identity_technique_is_perfect(self):
        table = run_benchmark(
            {"datasets": [walk_2d_config()], "techniques": [{"name": "identity"}]},
            keep_artifacts=False,
        )
        values = table.cells[0].metrics.values
        for name in ("S_NP", "S_NH", "S_Trust", "S_Cont",
                     "S_Pearson", "S_Spearman", "S_Kendall",
                     "T_Pearson", "T_Spearman", "T_Kendall"):
            assert values[name] == pytest.approx(1.0, abs=1e-12), name
        assert values["S_Stress"] == pytest.approx(0.0, abs=1e-12)
        assert values["T_Stress"] == pytest.approx(0.0, abs=1e-12)

    def test_identity_requires_2d(self):
        config = {
            "datasets": [
                {"generator": "gaussians", "seed": 0,
                 "params": {"num_classes": 2, "per_class": 10, "n": 5, "T": 3}}
            ],
            "techniques": [{"name": "identity"}],
        }
        table = run_benchmark(config, keep_artifacts=False)
        assert table.cells[0].status == "failed"
        assert "2D" in table.cells[0].error

    def test_missing_dataset_marks_cells_failed_and_run_continues(self):
        config = small_config()
        config["datasets"].append({"path": "/nonexistent/place"})
        table = run_benchmark(config, keep_artifacts=False)
        assert len(table.cells) == 6
        failed = [c for c in table.cells if c.status == "failed"]
        assert len(failed) == 2
        assert all(c.error for c in failed)

    def test_deterministic_tables(self):
        a = run_benchmark(small_config(), keep_artifacts=False)
        b = run_benchmark(small_config(), keep_artifacts=False)
        assert results_csv_text(a) == results_csv_text(b)

    def test_parallel_equals_serial(self):
        a = run_benchmark(small_config(), jobs=1, keep_artifacts=False)
        b = run_benchmark(small_config(), jobs=4, keep_artifacts=False)
        assert results_csv_text(a) == results_csv_text(b)

    def test_empty_config_rejected(self):
        with pytest.raises(DataError):
            run_benchmark({"datasets": [], "techniques": []})

    def test_duplicate_dataset_names_rejected(self):
        config = {
            "datasets": [walk_2d_config(seed=1), walk_2d_config(seed=2)],
            "techniques": [{"name": "identity"}],
        }
        table = run_benchmark(config, keep_artifacts=False)
        assert any(c.status == "failed" and "duplicate" in c.error for c in table.cells)


class TestEvaluateProjection:
    def test_aggregates_are_means_over_revisions(self):
        d = gen_gaussians(seed=3, num_classes=2, per_class=10, n=4, T=3)
        from drbench.projectors import project_dynamic

        p = project_dynamic(d, "pca", "global")
        report = evaluate_projection(d, p)
        assert set(report.values) == set(METRIC_COLUMNS)
        assert set(report.curves) == {"S_NP", "S_NH", "S_Trust", "S_Cont"}
        for name in ("S_NP", "S_NH", "S_Trust", "S_Cont"):
            assert report.values[name] == pytest.approx(report.curves[name].aggregate)

    def test_mismatched_projection_rejected(self):
        d = gen_gaussians(seed=4, num_classes=2, per_class=8, n=4, T=3)
        from drbench.projectors import project_dynamic

        p = project_dynamic(d, "pca", "global")
        other = gen_gaussians(seed=4, num_classes=2, per_class=8, n=4, T=4)
        with pytest.raises(ValueError):
            evaluate_projection(other, p)


class TestNormalizeColumns:
    def test_plain_column_fixture(self):
        matrix = np.array([[2.0], [4.0], [6.0]])
        out, notes = normalize_metric_matrix(matrix, ("S_NP",))
        assert out[:, 0].tolist() == [0.0, 0.5, 1.0]
        assert notes == []

    def test_stress_column_is_inverted(self):
        matrix = np.array([[2.0], [4.0], [6.0]])
        out, _ = normalize_metric_matrix(matrix, ("S_Stress",))
        assert out[:, 0].tolist() == [1.0, 0.5, 0.0]

    def test_constant_column_warns_and_maps_to_one(self):
        matrix = np.array([[3.0], [3.0]])
        out, notes = normalize_metric_matrix(matrix, ("T_Stress",))
        assert np.all(out == 1.0)
        assert len(notes) == 1 and "constant" in notes[0]

    def test_single_cell_table(self):
        table = fake_table([fake_report(0.7)])
        normalized = normalize_columns(table)
        assert np.all(normalized.matrix == 1.0)
        assert len(normalized.warnings) == 12

    def test_each_column_attains_zero_and_one(self):
        table = fake_table([fake_report(0.1), fake_report(0.5), fake_report(0.9)])
        normalized = normalize_columns(table)
        assert np.allclose(normalized.matrix.min(axis=0), 0.0)
        assert np.allclose(normalized.matrix.max(axis=0), 1.0)

    def test_table_level_matches_helper(self):
        rows = [fake_report(v, stress=s) for v, s in ((0.2, 3.0), (0.4, 1.0), (0.9, 2.0))]
        table = fake_table(rows)
        normalized = normalize_columns(table)
        raw = np.stack([r.vector() for r in rows])
        expected, _ = normalize_metric_matrix(raw)
        assert np.array_equal(normalized.matrix, expected)


class TestTraitCorrelation:
    def _monotone_table(self):
        # normalized group scores become [0, 0.5, 1] for every group
        rows = [fake_report(i, stress=-i) for i in range(3)]
        traits = {
            f"d{i}": DatasetTraits(10 * (i + 1), 3, 4, 2, 0.1 * (i + 1), 0.05 * i)
            for i in range(3)
        }
        return fake_table(rows, traits)

    def test_group_score_tracking_a_trait_gives_one(self):
        tc = trait_metric_correlation(self._monotone_table())
        col = list(tc.trait_names).index("num_samples")
        for gi in range(len(tc.groups)):
            assert tc.matrix[gi, col] == pytest.approx(1.0)

    def test_constant_trait_is_undefined(self):
        tc = trait_metric_correlation(self._monotone_table())
        col = list(tc.trait_names).index("num_timesteps")  # always 3
        assert np.all(np.isnan(tc.matrix[:, col]))

    def test_identical_traits_all_undefined(self):
        rows = [fake_report(i) for i in range(3)]
        traits = {f"d{i}": DatasetTraits(10, 3, 4, 2, 0.5, 0.1) for i in range(3)}
        tc = trait_metric_correlation(fake_table(rows, traits))
        assert np.all(np.isnan(tc.matrix))

    def test_needs_three_datasets(self):
        with pytest.raises(DataError):
            trait_metric_correlation(fake_table([fake_report(0.1), fake_report(0.2)]))


class TestMetaProjection:
    def _table(self, n_cells=8):
        rng = np.random.default_rng(0)
        rows = []
        for _ in range(n_cells):
            values = {c: float(v) for c, v in zip(METRIC_COLUMNS, rng.random(12))}
            rows.append(MetricReport(values=values, curves={}))
        return fake_table(rows)

    def test_row_count_matches_cells(self):
        table = self._table(9)
        meta = meta_projection(table, seed=0)
        assert meta.coords.shape == (9, 2)
        assert len(meta.techniques) == len(meta.datasets) == 9

    def test_same_seed_identical_layout(self):
        table = self._table(8)
        a = meta_projection(table, seed=5)
        b = meta_projection(table, seed=5)
        assert np.array_equal(a.coords, b.coords)

    def test_duplicated_cells_land_close(self):
        # benchmark-scale table (techniques x datasets) with two duplicated rows
        rng = np.random.default_rng(1)
        base_rows = []
        for _ in range(40):
            values = {c: float(v) for c, v in zip(METRIC_COLUMNS, rng.random(12))}
            base_rows.append(MetricReport(values=values, curves={}))
        rows = base_rows + [base_rows[0], base_rows[1]]  # exact duplicates
        table = fake_table(rows)
        meta = meta_projection(table, seed=2)
        diameter = np.max(
            np.linalg.norm(meta.coords[:, None] - meta.coords[None, :], axis=2)
        )
        twin_a = np.linalg.norm(meta.coords[0] - meta.coords[40])
        twin_b = np.linalg.norm(meta.coords[1] - meta.coords[41])
        assert twin_a < 0.05 * diameter
        assert twin_b < 0.05 * diameter

    def test_too_few_cells(self):
        with pytest.raises(DataError):
            meta_projection(self._table(4), seed=0)


class TestExports:
    def test_file_inventory_for_four_cells(self, tmp_path):
        table = run_benchmark(small_config())
        written = export_report(table, tmp_path)
        names = {p.relative_to(tmp_path).as_posix() for p in written}
        assert "results.json" in names
        assert "results.csv" in names
        assert "normalized.csv" in names
        assert "overview.svg" in names
        trails = [n for n in names if n.endswith("trails.svg")]
        assert len(trails) == 4
        assert len([n for n in names if n.endswith("shepard_spatial.csv")]) == 4

    def test_results_csv_column_count(self):
        table = run_benchmark(small_config(), keep_artifacts=False)
        header = results_csv_text(table).splitlines()[0].split(",")
        assert len(header) == 3 + 12

    def test_reexport_is_byte_identical(self, tmp_path):
        table = run_benchmark(small_config())
        export_report(table, tmp_path / "a")
        export_report(table, tmp_path / "b")
        for name in ("results.csv", "normalized.csv", "overview.svg"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()
        assert (tmp_path / "a" / "cells").is_dir()

    def test_round_trip_reproduces_table(self, tmp_path):
        table = run_benchmark(small_config(), keep_artifacts=False)
        export_report(table, tmp_path)
        loaded = load_results(tmp_path / "results.json")
        assert loaded.provenance == table.provenance
        assert loaded.traits == table.traits
        assert len(loaded.cells) == len(table.cells)
        for a, b in zip(loaded.cells, table.cells):
            assert (a.technique, a.dataset, a.status) == (
                b.technique,
                b.dataset,
                b.status,
            )
            assert a.metrics.values == b.metrics.values
            assert a.metrics.curves == b.metrics.curves

    def test_failed_cells_survive_export(self, tmp_path):
        config = small_config()
        config["datasets"].append({"path": "/nonexistent"})
        table = run_benchmark(config, keep_artifacts=False)
        export_report(table, tmp_path)
        loaded = load_results(tmp_path / "results.json")
        failed = [c for c in loaded.cells if c.status == "failed"]
        assert len(failed) == 2 and all(c.error for c in failed)
        csv_lines = (tmp_path / "results.csv").read_text().splitlines()
        assert len(csv_lines) == 1 + 6

    def test_trait_correlation_csv_recomputation(self, tmp_path):
        config = {
            "datasets": [
                {"generator": "gaussians", "seed": 1, "name": "g1",
                 "params": {"num_classes": 2, "per_class": 10, "n": 6, "T": 3}},
                {"generator": "gaussians", "seed": 2, "name": "g2",
                 "params": {"num_classes": 3, "per_class": 8, "n": 5, "T": 4}},
                {"generator": "walk", "seed": 3,
                 "params": {"per_class": 9, "n": 7, "T": 4}},
            ],
            "techniques": [{"name": "pca", "strategy": "global"},
                           {"name": "pca", "strategy": "TF"}],
        }
        table = run_benchmark(config, keep_artifacts=False)
        export_report(table, tmp_path)

        # independent recomputation from the exported CSVs
        norm_lines = (tmp_path / "normalized.csv").read_text().splitlines()
        header = norm_lines[0].split(",")
        rows = [line.split(",") for line in norm_lines[1:]]
        payload = json.loads((tmp_path / "results.json").read_text())
        groups = {
            "distance": ("S_Stress", "S_Pearson", "S_Spearman", "S_Kendall"),
            "neighborhood": ("S_NP", "S_NH", "S_Trust", "S_Cont"),
            "temporal": ("T_Stress", "T_Pearson", "T_Spearman", "T_Kendall"),
        }
        datasets = list(payload["traits"])

        def group_score(group, ds):
            cols = [header.index(m) for m in groups[group]]
            vals = [float(r[c]) for r in rows if r[1] == ds for c in cols]
            return sum(vals) / len(vals)

        def pearson(x, y):
            n = len(x)
            mx, my = sum(x) / n, sum(y) / n
            cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
            vx = sum((a - mx) ** 2 for a in x)
            vy = sum((b - my) ** 2 for b in y)
            return cov / (vx * vy) ** 0.5

        tc_lines = (tmp_path / "trait_correlation.csv").read_text().splitlines()
        tc_header = tc_lines[0].split(",")
        for line in tc_lines[1:]:
            parts = line.split(",")
            group = parts[0]
            scores = [group_score(group, ds) for ds in datasets]
            for ti, trait in enumerate(tc_header[1:]):
                traits = [payload["traits"][ds][trait] for ds in datasets]
                exported = float(parts[1 + ti])
                if np.isnan(exported):
                    continue
                assert exported == pytest.approx(pearson(scores, traits), abs=1e-10)
