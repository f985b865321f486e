"""Command-line orchestration.

Grammar: distinct <ingest|test|matrix|power|ablate|perturb|audit|reduce|ci> [flags]

Exit codes signal operational success only; statistical decisions live in
the report body. All randomness descends from the single --seed flag, so
one number reproduces an entire analysis at any --workers count.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .audit import AuditConfig, audit
from .errors import DistinctError
from .kernels import KernelSpec
from .permutation import TestConfig, permutation_test
from .power import bootstrap_ci, mmd_matrix, rejection_rate_curve
from .reports import build_report, render_csv, render_json
from .robustness import (
    PerturbationSpec,
    ReducerSpec,
    ablation_report,
    paired_perturbation_test,
    reduce,
)
from .store import EmbeddingTable, GroupedDataset, load_table, save_table


def sniff_format(path: str) -> str:
    """Table format by magic bytes: MMDE means binary, anything else CSV."""
    try:
        with open(path, "rb") as fh:
            return "binary" if fh.read(4) == b"MMDE" else "csv"
    except OSError:
        return "csv"


def _load(path: str) -> EmbeddingTable:
    return load_table(path, format=sniff_format(path))


def _parse_bandwidth(value: str) -> KernelSpec:
    if value == "median":
        return KernelSpec(bandwidth_rule="median_heuristic")
    if value.startswith("fixed:"):
        return KernelSpec(bandwidth_rule="fixed", bandwidth_sigma=float(value[6:]))
    if value.startswith("scaled:"):
        return KernelSpec(bandwidth_rule="scaled_median", scale_multiplier=float(value[7:]))
    raise argparse.ArgumentTypeError(
        f"bad bandwidth {value!r}; expected median, fixed:<sigma>, or scaled:<mult>"
    )


def _kernel_spec(args) -> KernelSpec:
    spec = _parse_bandwidth(args.bandwidth)
    if args.kernel == "linear":
        spec = KernelSpec(family="linear", bandwidth_rule=spec.bandwidth_rule,
                          bandwidth_sigma=spec.bandwidth_sigma,
                          scale_multiplier=spec.scale_multiplier)
    return spec


def _test_config(args) -> TestConfig:
    return TestConfig(R=args.permutations, alpha=args.alpha, seed=args.seed)


def _add_common(p, kernel=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    if kernel:
        p.add_argument("--kernel", choices=["rbf", "linear"], default="rbf")
        p.add_argument("--bandwidth", default="median",
                       help="median | fixed:<sigma> | scaled:<mult>")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--permutations", type=int, default=199, metavar="R")


def _int_list(value: str) -> list:
    return [int(v) for v in value.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distinct",
        description="Distributional distinguishability analysis for embedding tables.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a CSV table and write the binary form")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("test", help="two-sample permutation test between two groups")
    p.add_argument("--table-a", required=True)
    p.add_argument("--group-a", required=True)
    p.add_argument("--table-b", default=None, help="defaults to --table-a")
    p.add_argument("--group-b", required=True)
    _add_common(p)

    p = sub.add_parser("matrix", help="all-pairs MMD matrix with split-half diagonal")
    p.add_argument("--table", required=True)
    p.add_argument("--cap", type=int, default=500, help="max sample size per group")
    _add_common(p)

    p = sub.add_parser("power", help="rejection-rate curve over sample sizes")
    p.add_argument("--table", required=True)
    p.add_argument("--group-a", required=True)
    p.add_argument("--group-b", required=True)
    p.add_argument("--sizes", type=_int_list, required=True, help="e.g. 4,6,8,10")
    p.add_argument("--trials", type=int, default=500)
    _add_common(p)

    p = sub.add_parser("ablate", help="power curves across kernel/bandwidth/dim settings")
    p.add_argument("--table", required=True)
    p.add_argument("--group-a", required=True)
    p.add_argument("--group-b", required=True)
    p.add_argument("--mode", choices=["kernel", "bandwidth", "dimensionality"],
                   required=True)
    p.add_argument("--settings", required=True,
                   help="comma list, e.g. rbf,linear or 0.5,1.0,2.0 or 2,8,32")
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--trials", type=int, default=200)
    _add_common(p)

    p = sub.add_parser("perturb", help="paired clean-vs-perturbed test")
    p.add_argument("--table", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--kind", choices=["gaussian_noise", "grid_watermark"],
                   default="gaussian_noise")
    p.add_argument("--ratio", type=float, required=True,
                   help="signal-to-perturbation amplitude ratio (SNR/SWR)")
    p.add_argument("--grid-period", type=int, default=4)
    p.add_argument("--reduce-dims", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("audit", help="nearest-neighbor memorization audit")
    p.add_argument("--candidates", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--percentile", type=float, default=99.0)
    _add_common(p, kernel=False)

    p = sub.add_parser("reduce", help="PCA-reduce a table and write it back out")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reduce-dims", type=int, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ci", help="bootstrap confidence interval for MMD^2")
    p.add_argument("--table", required=True)
    p.add_argument("--group-a", required=True)
    p.add_argument("--group-b", required=True)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--level", type=float, default=0.95)
    _add_common(p)

    return parser


def _group_vectors(table: EmbeddingTable, label: str) -> np.ndarray:
    ds = GroupedDataset.from_table(table)
    if label not in ds.groups:
        raise DistinctError(
            f"group {label!r} not found; available: {sorted(ds.groups)}"
        )
    return ds.group_vectors(label)


def _run(args) -> tuple:
    """Execute one command; returns (config echo, results payload)."""
    cmd = args.command
    if cmd == "ingest":
        table = load_table(args.input, format="csv")
        save_table(table, args.out, format="binary")
        print(f"{len(table)} records, dim={table.dim}", file=sys.stderr)
        return (
            {"input": args.input, "output": args.out, "seed": args.seed},
            {"records": len(table), "dim": table.dim},
        )

    if cmd == "test":
        table_a = _load(args.table_a)
        table_b = _load(args.table_b) if args.table_b else table_a
        x = _group_vectors(table_a, args.group_a)
        y = _group_vectors(table_b, args.group_b)
        result = permutation_test(x, y, _kernel_spec(args), _test_config(args))
        config = _echo_kernel_config(args)
        config.update(table_a=args.table_a, group_a=args.group_a,
                      table_b=args.table_b or args.table_a, group_b=args.group_b)
        return config, result

    if cmd == "matrix":
        ds = GroupedDataset.from_table(_load(args.table))
        result = mmd_matrix(ds, args.cap, _kernel_spec(args), _test_config(args),
                            workers=args.workers)
        config = _echo_kernel_config(args)
        config.update(table=args.table, cap=args.cap)
        return config, result

    if cmd == "power":
        ds = GroupedDataset.from_table(_load(args.table))
        result = rejection_rate_curve(ds, args.group_a, args.group_b, args.sizes,
                                      args.trials, _kernel_spec(args),
                                      _test_config(args), workers=args.workers)
        config = _echo_kernel_config(args)
        config.update(table=args.table, group_a=args.group_a, group_b=args.group_b,
                      sizes=args.sizes, trials=args.trials)
        return config, result

    if cmd == "ablate":
        ds = GroupedDataset.from_table(_load(args.table))
        if args.mode == "kernel":
            settings = args.settings.split(",")
        elif args.mode == "bandwidth":
            settings = [float(s) for s in args.settings.split(",")]
        else:
            settings = [int(s) for s in args.settings.split(",")]
        result = ablation_report(ds, args.group_a, args.group_b, args.mode, settings,
                                 args.sizes, args.trials, _kernel_spec(args),
                                 _test_config(args), workers=args.workers)
        config = _echo_kernel_config(args)
        config.update(table=args.table, group_a=args.group_a, group_b=args.group_b,
                      mode=args.mode, settings=settings, sizes=args.sizes,
                      trials=args.trials)
        return config, result

    if cmd == "perturb":
        table = _load(args.table)
        clean = _group_vectors(table, args.group)
        spec_p = PerturbationSpec(kind=args.kind, ratio=args.ratio,
                                  grid_period=args.grid_period, seed=args.seed)
        reducer = (ReducerSpec("pca", args.reduce_dims)
                   if args.reduce_dims is not None else None)
        result = paired_perturbation_test(clean, spec_p, _kernel_spec(args),
                                          _test_config(args), reducer)
        config = _echo_kernel_config(args)
        config.update(table=args.table, group=args.group, kind=args.kind,
                      ratio=args.ratio, grid_period=args.grid_period,
                      reduce_dims=args.reduce_dims)
        return config, result

    if cmd == "audit":
        cands = GroupedDataset.from_table(_load(args.candidates))
        ref = GroupedDataset.from_table(_load(args.reference))
        result = audit(cands, ref, AuditConfig(threshold_percentile=args.percentile))
        config = {"candidates": args.candidates, "reference": args.reference,
                  "percentile": args.percentile, "seed": args.seed}
        return config, result

    if cmd == "reduce":
        table = _load(args.input)
        reduced = reduce(table.vectors, ReducerSpec("pca", args.reduce_dims), args.seed)
        out_table = EmbeddingTable(table.ids, table.labels, reduced,
                                   source_tag=table.source_tag)
        save_table(out_table, args.out, format=sniff_format_for_write(args.out))
        config = {"input": args.input, "output": args.out,
                  "reduce_dims": args.reduce_dims, "seed": args.seed}
        return config, {"records": len(out_table), "dim": out_table.dim}

    if cmd == "ci":
        table = _load(args.table)
        x = _group_vectors(table, args.group_a)
        y = _group_vectors(table, args.group_b)
        result = bootstrap_ci(x, y, _kernel_spec(args), iterations=args.iterations,
                              level=args.level, seed=args.seed)
        config = _echo_kernel_config(args)
        config.update(table=args.table, group_a=args.group_a, group_b=args.group_b,
                      iterations=args.iterations, level=args.level)
        return config, result

    raise AssertionError(f"unhandled command {cmd!r}")


def sniff_format_for_write(path: str) -> str:
    return "csv" if str(path).endswith(".csv") else "binary"


def _echo_kernel_config(args) -> dict:
    return {
        "kernel": args.kernel,
        "bandwidth": args.bandwidth,
        "alpha": args.alpha,
        "permutations": args.permutations,
        "seed": args.seed,
        "workers": args.workers,
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        config, results = _run(args)
    except (DistinctError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    runtime_ms = (time.perf_counter() - start) * 1000.0
    report = build_report(args.command, config, results, runtime_ms)
    text = render_csv(report) if args.format == "csv" else render_json(report)
    if getattr(args, "out", None) and args.command not in ("ingest", "reduce"):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
