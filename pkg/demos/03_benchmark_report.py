"""Run a small technique x dataset benchmark and export the full report tree:
results table, per-column normalized heatmap, trait correlations, the
projection-of-projections map, and per-cell diagnostics.

    python demos/03_benchmark_report.py      (a few minutes)

The same run is available from the shell:

    drbench benchmark --config <file> --out demo_output/benchmark
"""

from drbench import run_benchmark
from drbench.exports import export_report

config = {
    "datasets": [
        {"generator": "gaussians", "seed": 1,
         "params": {"num_classes": 4, "per_class": 20, "n": 30, "T": 5}},
        {"generator": "walk", "seed": 1,
         "params": {"num_classes": 3, "per_class": 25, "n": 30, "T": 6}},
        {"generator": "sorts", "seed": 1,
         "params": {"arrays_per_algorithm": 3, "array_len": 30, "T": 6}},
    ],
    "techniques": [
        {"name": "pca", "strategy": "G"},
        {"name": "pca", "strategy": "TF"},
        {"name": "tsne", "strategy": "G", "seed": 3,
         "params": {"perplexity": 10.0, "iterations": 300,
                    "exaggeration_iters": 100, "momentum_switch_iter": 100}},
        {"name": "tsne", "strategy": "TF", "seed": 3,
         "params": {"perplexity": 10.0, "iterations": 300,
                    "exaggeration_iters": 100, "momentum_switch_iter": 100}},
        {"name": "dtsne", "seed": 3,
         "params": {"perplexity": 10.0, "iterations": 300,
                    "exaggeration_iters": 100, "momentum_switch_iter": 100,
                    "movement_penalty": 0.1}},
    ],
}

table = run_benchmark(config, jobs=2)
for cell in table.cells:
    status = "ok    " if cell.status == "ok" else "FAILED"
    print(f"{status} {cell.technique:8s} x {cell.dataset}")

written = export_report(table, "demo_output/benchmark")
print(f"\n{len(written)} files under demo_output/benchmark/")
for path in written:
    if path.parent.name == "benchmark":
        print("  ", path.name)
print("   cells/<technique>__<dataset>/ with Shepard, displacement, "
      "rank-histogram CSVs and a trails.svg each")
print("\nopen overview.svg for the normalized heatmap and "
      "meta_projection.svg for the map of similarly-behaving runs")
