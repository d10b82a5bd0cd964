"""Repeated ensemble experiments: sample base clusterings, refine, extract consensus, score."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .basegen import sample_indices
from .consensus import hierarchical_consensus, spectral_consensus
from .ensemble import co_association, coherent_link_from_labels
from .metrics import METRIC_NAMES, evaluate
from .partition import Partition
from .solver import LtaConfig, solve

log = logging.getLogger(__name__)

__all__ = ["RunManifest", "RunReport", "run_repetition", "run_ensemble", "summarize", "write_summary"]

BACKENDS = {"sc": ("Ours-SC",), "ea": ("Ours-EA",), "both": ("Ours-EA", "Ours-SC")}
LABEL_FILES = {"Ours-SC": "sc", "Ours-EA": "ea", "CA-SC": "ca_sc", "CA-EA": "ca_ea"}


@dataclass
class RunManifest:
    """Everything needed to replay a run."""

    pool: str | None = None
    truth: str | None = None
    seed: int = 0
    m: int = 10
    reps: int = 20
    lam: float = 0.002
    orient: str = "frontal"
    tol: float = 1e-8
    max_iter: int = 500
    mu0: float = 1e-4
    mu_max: float = 1e8
    rho: float = 1.1
    backend: str = "both"
    linkage: str = "average"
    baseline: bool = False
    k: int | None = None
    out_dir: str | None = None
    save_matrices: bool = False
    trace: bool = False
    threads: int = 1
    repetition_seeds: list[int] = field(default_factory=list)

    def solver_config(self, trace_path=None) -> LtaConfig:
        return LtaConfig(
            lam=self.lam,
            mu0=self.mu0,
            mu_max=self.mu_max,
            rho=self.rho,
            tol=self.tol,
            max_iter=self.max_iter,
            orient=self.orient,
            track_objective=self.trace,
            trace_path=trace_path,
        )

    def resolve_seeds(self) -> list[int]:
        if not self.repetition_seeds:
            self.repetition_seeds = [self.seed + i for i in range(1, self.reps + 1)]
        if len(self.repetition_seeds) != self.reps:
            raise ValueError("repetition_seeds does not match reps")
        return self.repetition_seeds

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class RunReport:
    manifest: RunManifest
    records: list[dict]
    summary: dict[str, dict[str, dict[str, float]]]

    @property
    def failed(self) -> list[int]:
        return [r["rep"] for r in self.records if "error" in r]

    @property
    def non_converged(self) -> list[int]:
        return [r["rep"] for r in self.records if r.get("converged") is False]

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest.to_dict(),
            "records": self.records,
            "summary": self.summary,
            "failed": self.failed,
            "non_converged": self.non_converged,
        }


def run_repetition(pool: np.ndarray, truth: np.ndarray, index: int, man: RunManifest, rep_dir: Path | None = None) -> dict:
    """One repetition; the returned record holds metrics per method and solver diagnostics."""
    seed = man.repetition_seeds[index]
    k = man.k if man.k is not None else Partition.from_labels(truth).k
    t0 = time.perf_counter()
    if rep_dir is not None:
        rep_dir.mkdir(parents=True, exist_ok=True)
    cols = sample_indices(pool.shape[1], man.m, seed)
    pi = pool[:, cols]
    A = co_association(pi)
    M = coherent_link_from_labels(pi)
    trace_path = rep_dir / "trace.csv" if (rep_dir is not None and man.trace) else None
    res = solve(A, M, man.solver_config(trace_path))

    methods: dict[str, Partition] = {}
    for name in BACKENDS[man.backend]:
        if name == "Ours-SC":
            methods[name] = spectral_consensus(res.refined, k, seed)
        else:
            methods[name] = hierarchical_consensus(res.refined, k, man.linkage)
    if man.baseline:
        methods["CA-SC"] = spectral_consensus(A, k, seed)
        methods["CA-EA"] = hierarchical_consensus(A, k, man.linkage)
    scores = {name: evaluate(p, truth) for name, p in methods.items()}
    base = [evaluate(c, truth) for c in pi.T]
    scores["Base"] = {key: float(np.mean([b[key] for b in base])) for key in METRIC_NAMES}

    record = {
        "rep": index + 1,
        "seed": int(seed),
        "columns": [int(c) for c in cols],
        "k": int(k),
        "iterations": res.iterations,
        "converged": res.converged,
        "final_residual": res.final_residual,
        "seconds": time.perf_counter() - t0,
        "metrics": scores,
    }
    if rep_dir is not None:
        for name, p in methods.items():
            io.write_label_csv(rep_dir / f"labels_{LABEL_FILES[name]}.csv", p.labels)
        io.write_json(rep_dir / "metrics.json", {key: record[key] for key in ("rep", "k", "iterations", "converged", "metrics")})
        if man.save_matrices:
            io.write_matrix_csv(rep_dir / "refined.csv", res.refined)
    return record


def summarize(records: list[dict]) -> dict[str, dict[str, dict[str, float]]]:
    """Mean and population standard deviation of every metric per method."""
    ok = [r for r in records if "metrics" in r]
    out: dict[str, dict[str, dict[str, float]]] = {}
    if not ok:
        return out
    for method in ok[0]["metrics"]:
        out[method] = {}
        for key in METRIC_NAMES:
            vals = np.array([r["metrics"][method][key] for r in ok])
            out[method][key] = {"mean": float(vals.mean()), "std": float(vals.std())}
    return out


def run_ensemble(pool, truth, man: RunManifest) -> RunReport:
    pool = np.asarray(pool)
    truth = np.asarray(truth).ravel()
    if pool.shape[0] != truth.size:
        raise ValueError(f"pool has {pool.shape[0]} rows but truth has {truth.size}")
    man.resolve_seeds()
    out = Path(man.out_dir) if man.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "manifest.json", man.to_dict())

    def one(i):
        rep_dir = out / f"rep_{i + 1}" if out is not None else None
        try:
            return run_repetition(pool, truth, i, man, rep_dir)
        except Exception as exc:  # a failed repetition is recorded, the run goes on
            log.warning("repetition %d failed: %s", i + 1, exc)
            return {"rep": i + 1, "seed": int(man.repetition_seeds[i]), "error": f"{type(exc).__name__}: {exc}"}

    if man.threads > 1:
        with ThreadPoolExecutor(max_workers=man.threads) as ex:
            records = list(ex.map(one, range(man.reps)))
    else:
        records = [one(i) for i in range(man.reps)]

    report = RunReport(man, records, summarize(records))
    if out is not None:
        write_summary(out, report.summary)
        io.write_json(out / "report.json", report.to_dict())
    return report


def summary_rows(summary) -> list[list]:
    rows = []
    for method, vals in summary.items():
        row = [method]
        for key in METRIC_NAMES:
            row += [f"{vals[key]['mean']:.6f}", f"{vals[key]['std']:.6f}"]
        rows.append(row)
    return rows


def write_summary(out: Path, summary) -> None:
    header = ["method"] + [f"{k}_{s}" for k in METRIC_NAMES for s in ("mean", "std")]
    rows = summary_rows(summary)
    with open(out / "summary.csv", "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    (out / "summary.txt").write_text(format_table(summary))


def format_table(summary) -> str:
    cols = ["method"] + list(METRIC_NAMES)
    body = [[m] + [f"{v[k]['mean']:.3f}±{v[k]['std']:.3f}" for k in METRIC_NAMES] for m, v in summary.items()]
    widths = [max(len(str(r[i])) for r in [cols] + body) for i in range(len(cols))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in [cols] + body]
    return "\n".join(lines) + "\n"
