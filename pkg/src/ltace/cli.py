"""Command-line entry point: ``ltace generate | ensemble | sweep``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure in
at least one repetition (solver non-convergence alone is not a failure).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .basegen import PoolConfig, generate_pool
from .metrics import METRIC_NAMES
from .pipeline import RunManifest, run_ensemble

log = logging.getLogger("ltace")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(kind):
    def parse(text):
        try:
            vals = [kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
        if not vals:
            raise argparse.ArgumentTypeError("empty grid")
        return vals

    return parse


def _add_pool_flags(p):
    p.add_argument("--pool-size", type=int, default=100)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=None, help="default floor(sqrt(n))")
    p.add_argument("--kmeans-iters", type=int, default=300)
    p.add_argument("--pool-seed", type=int, default=0)
    p.add_argument("--truth-column", action="store_true", help="last data column holds ground-truth labels")
    p.add_argument("--zscore", action="store_true", help="standardize features before K-means")


def _add_run_flags(p):
    src = p.add_argument_group("inputs")
    src.add_argument("--pool", type=Path, help="label-matrix CSV (rows = samples)")
    src.add_argument("--data", type=Path, help="feature CSV; a pool is generated when --pool is absent")
    src.add_argument("--truth", type=Path, help="single-column ground-truth CSV")
    src.add_argument("--transposed", action="store_true", help="pool CSV has one row per base clustering")
    src.add_argument("--manifest", type=Path, help="replay settings from a manifest.json")
    _add_pool_flags(p)
    p.add_argument("--m", type=int, default=10, help="base clusterings per repetition")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--lambda", dest="lam", type=float, default=0.002)
    p.add_argument("--k", type=int, default=None, help="target clusters (default: from truth)")
    p.add_argument("--backend", choices=["sc", "ea", "both"], default="both")
    p.add_argument("--linkage", choices=["average", "single", "complete"], default="average")
    p.add_argument("--orient", choices=["frontal", "lateral"], default="frontal", help="lateral depends on sample order")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--save-matrices", action="store_true")
    p.add_argument("--trace", action="store_true", help="write per-repetition solver traces")
    p.add_argument("--baseline", action="store_true", help="also score the unrefined co-association matrix")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ltace", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="build a candidate pool of K-means base clusterings")
    g.add_argument("--data", type=Path, required=True)
    g.add_argument("--out-dir", type=Path, required=True)
    _add_pool_flags(g)

    e = sub.add_parser("ensemble", help="repeated sampling, refinement, consensus and scoring")
    _add_run_flags(e)

    s = sub.add_parser("sweep", help="run the ensemble over a lambda grid or an m grid")
    _add_run_flags(s)
    grid = s.add_mutually_exclusive_group(required=True)
    grid.add_argument("--lambda-grid", type=_grid(float))
    grid.add_argument("--m-grid", type=_grid(int))
    return parser


def _load_data(args):
    X, y = io.read_data_csv(args.data, truth_column=args.truth_column)
    if args.zscore:
        sd = X.std(axis=0)
        X = (X - X.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    return X, y


def _pool_config(args) -> PoolConfig:
    return PoolConfig(
        pool_size=args.pool_size,
        k_min=args.k_min,
        k_max=args.k_max,
        kmeans_iters=args.kmeans_iters,
        seed=args.pool_seed,
    )


def _write_pool(out: Path, pool, cfg: PoolConfig, data_path, truth=None):
    out.mkdir(parents=True, exist_ok=True)
    io.write_label_csv(out / "pool.csv", pool.labels)
    io.write_json(
        out / "pool_manifest.json",
        {
            "data": str(data_path),
            "pool_size": cfg.pool_size,
            "k_min": cfg.k_min,
            "k_max": cfg.resolve_k_max(pool.labels.shape[0]),
            "kmeans_iters": cfg.kmeans_iters,
            "seed": cfg.seed,
            "ks": pool.ks,
            "column_seeds": pool.column_seeds,
        },
    )
    if truth is not None:
        io.write_label_csv(out / "truth.csv", truth)


def cmd_generate(args) -> int:
    X, y = _load_data(args)
    cfg = _pool_config(args)
    try:
        pool = generate_pool(X, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_pool(args.out_dir, pool, cfg, args.data, y)
    log.info("wrote %d x %d pool to %s", *pool.labels.shape, args.out_dir)
    return EXIT_OK


def _inputs(args):
    """Return ``(pool, truth, manifest)`` for ensemble and sweep."""
    if args.manifest is not None:
        man = RunManifest.from_dict(json.loads(Path(args.manifest).read_text()))
        man.out_dir = str(args.out_dir)
        pool = io.read_label_csv(man.pool)
        truth = io.read_label_csv(man.truth).ravel()
        return pool, truth, man

    truth = io.read_label_csv(args.truth).ravel() if args.truth else None
    if args.pool is not None:
        pool_path = args.pool
        pool = io.read_label_csv(args.pool, transposed=args.transposed)
    elif args.data is not None:
        X, y = _load_data(args)
        truth = y if truth is None else truth
        cfg = _pool_config(args)
        pool_obj = generate_pool(X, cfg)
        _write_pool(args.out_dir, pool_obj, cfg, args.data, y)
        pool = pool_obj.labels
        pool_path = args.out_dir / "pool.csv"
    else:
        raise UsageError("one of --pool or --data is required")
    if truth is None:
        raise UsageError("ground truth required: --truth, or --data with --truth-column")
    truth_path = args.truth
    if truth_path is None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        truth_path = args.out_dir / "truth.csv"
        io.write_label_csv(truth_path, truth)
    if pool.shape[0] != truth.size:
        raise io.DataFileError(f"pool has {pool.shape[0]} rows but truth has {truth.size}")
    if not 1 <= args.m <= pool.shape[1]:
        raise UsageError(f"--m must be in [1, {pool.shape[1]}]")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")

    if args.transposed and args.pool is not None:
        # Persist the row-per-sample layout so that the manifest can be replayed.
        args.out_dir.mkdir(parents=True, exist_ok=True)
        pool_path = args.out_dir / "pool.csv"
        io.write_label_csv(pool_path, pool)
    man = RunManifest(
        pool=str(pool_path),
        truth=str(truth_path),
        seed=args.seed,
        m=args.m,
        reps=args.reps,
        lam=args.lam,
        orient=args.orient,
        tol=args.tol,
        max_iter=args.max_iter,
        backend=args.backend,
        linkage=args.linkage,
        baseline=args.baseline,
        k=args.k,
        out_dir=str(args.out_dir),
        save_matrices=args.save_matrices,
        trace=args.trace,
        threads=args.threads,
    )
    return pool, truth, man


def _status(report) -> int:
    if report.failed:
        log.error("repetitions failed: %s", report.failed)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_ensemble(args) -> int:
    pool, truth, man = _inputs(args)
    report = run_ensemble(pool, truth, man)
    sys.stdout.write((Path(man.out_dir) / "summary.txt").read_text())
    if report.non_converged:
        log.warning("solver hit max_iter in repetitions %s", report.non_converged)
    return _status(report)


def cmd_sweep(args) -> int:
    pool, truth, base = _inputs(args)
    out = Path(base.out_dir)
    if args.lambda_grid is not None:
        param, grid = "lambda", args.lambda_grid
    else:
        param, grid = "m", args.m_grid
    rows = []
    status = EXIT_OK
    for value in grid:
        sub = out / f"{param}_{value}"
        if param == "lambda":
            man = replace(base, lam=float(value), out_dir=str(sub), repetition_seeds=[])
        else:
            if not 1 <= value <= pool.shape[1]:
                raise UsageError(f"m grid value {value} outside [1, {pool.shape[1]}]")
            man = replace(base, m=int(value), out_dir=str(sub), repetition_seeds=[])
        report = run_ensemble(pool, truth, man)
        status = max(status, _status(report))
        for method, vals in report.summary.items():
            for key in METRIC_NAMES:
                rows.append([param, value, method, key, f"{vals[key]['mean']:.6f}", f"{vals[key]['std']:.6f}"])
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "value", "method", "metric", "mean", "std"])
        w.writerows(rows)
    log.info("wrote %s", out / "sweep.csv")
    return status


COMMANDS = {"generate": cmd_generate, "ensemble": cmd_ensemble, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ltace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.DataFileError, FileNotFoundError) as exc:
        print(f"ltace: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
