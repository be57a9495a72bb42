"""Command-line interface.

Subcommands mirror the pipeline stages so every intermediate artifact is
inspectable on disk:

    drbench generate <gaussians|walk|sorts> --seed S --out DIR [size params]
    drbench project --technique pca|tsne|dtsne --strategy G|TF --data DIR --out DIR
    drbench evaluate --data DIR --proj DIR --out report.json
    drbench benchmark --config FILE --out DIR [--jobs N]
    drbench report --in results.json --out DIR
    drbench validate --data DIR

Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
standard error; machine output only to files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dataset import (
    DataError,
    load_dataset,
    load_projection,
    save_dataset,
    save_projection,
    validate_dataset,
)
from .exports import (
    export_analysis,
    export_report,
    load_results,
    results_csv_text,
    table_to_json,
)
from .generators import gen_gaussians, gen_sorts, gen_walk
from .harness import evaluate_projection, run_benchmark
from .projectors import DTSNEConfig, TSNEConfig, project_dynamic

USAGE_ERROR = 1
DATA_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="drbench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset directory")
    gen.add_argument("name", choices=("gaussians", "walk", "sorts"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--classes", type=int, help="number of classes (gaussians, walk)")
    gen.add_argument("--per-class", type=int, help="points per class (gaussians, walk)")
    gen.add_argument("--dims", type=int, help="dimensionality (gaussians, walk)")
    gen.add_argument("--timesteps", type=int, help="number of revisions")
    gen.add_argument("--arrays-per-algorithm", type=int, help="runs per algorithm (sorts)")
    gen.add_argument("--array-len", type=int, help="array length = dimensionality (sorts)")

    proj = sub.add_parser("project", help="project a dataset directory")
    proj.add_argument("--technique", required=True, choices=("pca", "tsne", "dtsne"))
    proj.add_argument("--strategy", default="G", help="G/global or TF/per_timeframe")
    proj.add_argument("--data", required=True)
    proj.add_argument("--out", required=True)
    proj.add_argument("--seed", type=int, default=0)
    proj.add_argument("--config", help="JSON file with technique parameters")

    ev = sub.add_parser("evaluate", help="compute all 12 metrics for one projection")
    ev.add_argument("--data", required=True)
    ev.add_argument("--proj", required=True)
    ev.add_argument("--out", required=True)

    bench = sub.add_parser("benchmark", help="run a technique x dataset matrix")
    bench.add_argument("--config", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--jobs", type=int, default=None)

    rep = sub.add_parser("report", help="regenerate analyses from results.json")
    rep.add_argument("--in", dest="in_path", required=True)
    rep.add_argument("--out", required=True)

    val = sub.add_parser("validate", help="check a dataset directory's invariants")
    val.add_argument("--data", required=True)
    return parser


def _generate(args) -> int:
    common = {}
    if args.timesteps is not None:
        common["T"] = args.timesteps
    if args.name in ("gaussians", "walk"):
        if args.classes is not None:
            common["num_classes"] = args.classes
        if args.per_class is not None:
            common["per_class"] = args.per_class
        if args.dims is not None:
            common["n"] = args.dims
        fn = gen_gaussians if args.name == "gaussians" else gen_walk
    else:
        if args.arrays_per_algorithm is not None:
            common["arrays_per_algorithm"] = args.arrays_per_algorithm
        if args.array_len is not None:
            common["array_len"] = args.array_len
        fn = gen_sorts
    dataset = fn(seed=args.seed, **common)
    save_dataset(dataset, args.out)
    return 0


def _load_technique_params(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read technique config {path}: {exc}") from exc


def _project(args) -> int:
    dataset = load_dataset(args.data)
    params = _load_technique_params(args.config)
    config = None
    if args.technique in ("tsne", "dtsne"):
        movement = params.pop("movement_penalty", 0.1)
        base = TSNEConfig(seed=args.seed, **params)
        config = (
            DTSNEConfig(base=base, movement_penalty=movement)
            if args.technique == "dtsne"
            else base
        )
    projection = project_dynamic(dataset, args.technique, args.strategy, config)
    save_projection(
        projection, args.out, labels=dataset.labels, class_names=dataset.class_names
    )
    return 0


def _evaluate(args) -> int:
    dataset = load_dataset(args.data)
    projection = load_projection(args.proj)
    report = evaluate_projection(dataset, projection)
    payload = {
        "dataset": dataset.name,
        "technique": projection.technique,
        "metrics": report.values,
        "curves": {
            name: {"k": list(c.k_values), "scores": list(c.scores)}
            for name, c in report.curves.items()
        },
    }
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def _benchmark(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read benchmark config {args.config}: {exc}") from exc
    jobs = args.jobs
    if jobs is None:
        jobs = int(os.environ.get("DRBENCH_JOBS", "1"))
    table = run_benchmark(config, jobs=max(jobs, 1))
    export_report(table, args.out)
    failed = [c for c in table.cells if c.status != "ok"]
    for cell in failed:
        print(
            f"drbench: cell ({cell.technique}, {cell.dataset}) failed: {cell.error}",
            file=sys.stderr,
        )
    return 0


def _report(args) -> int:
    table = load_results(args.in_path)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    (out / "results.json").write_text(
        json.dumps(table_to_json(table), indent=2) + "\n"
    )
    (out / "results.csv").write_text(results_csv_text(table), newline="\n")
    export_analysis(table, out, written)
    return 0


def _validate(args) -> int:
    dataset = load_dataset(args.data)
    report = validate_dataset(dataset)
    if report.ok:
        return 0
    for violation in report:
        print(f"drbench: {violation.code}: {violation.message}", file=sys.stderr)
    return DATA_ERROR


_COMMANDS = {
    "generate": _generate,
    "project": _project,
    "evaluate": _evaluate,
    "benchmark": _benchmark,
    "report": _report,
    "validate": _validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"drbench: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except (DataError, OSError, TypeError, ValueError) as exc:
        print(f"drbench: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
