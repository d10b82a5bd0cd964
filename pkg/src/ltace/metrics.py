"""External clustering quality scores against a reference partition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "ContingencyTable",
    "contingency",
    "accuracy",
    "nmi",
    "purity",
    "pair_counts",
    "ari",
    "precision_recall_f1",
    "evaluate",
    "METRIC_NAMES",
]

METRIC_NAMES = ("acc", "nmi", "purity", "ari", "f1", "precision", "recall")


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # (k_pred, k_true)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _labels(x) -> np.ndarray:
    x = np.asarray(getattr(x, "labels", x)).ravel()
    return x


def contingency(pred, truth) -> ContingencyTable:
    p, t = _labels(pred), _labels(truth)
    if p.size != t.size:
        raise ValueError(f"length mismatch: {p.size} predicted vs {t.size} reference labels")
    if p.size == 0:
        raise ValueError("empty partitions")
    _, pi = np.unique(p, return_inverse=True)
    _, ti = np.unique(t, return_inverse=True)
    counts = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(counts, (pi, ti), 1)
    return ContingencyTable(counts)


def accuracy(pred, truth) -> float:
    """Fraction of samples matched under the best one-to-one cluster mapping."""
    c = contingency(pred, truth).counts
    rows, cols = linear_sum_assignment(c, maximize=True)
    return float(c[rows, cols].sum() / c.sum())


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of the two entropies."""
    table = contingency(pred, truth)
    c, n = table.counts, table.n
    hp = _entropy(table.row_sums, n)
    ht = _entropy(table.col_sums, n)
    if hp == 0.0 or ht == 0.0:
        return 1.0 if hp == ht == 0.0 else 0.0
    nz = c > 0
    pij = c[nz] / n
    outer = np.outer(table.row_sums, table.col_sums)[nz] / (n * n)
    mi = float(np.sum(pij * np.log(pij / outer)))
    return float(min(max(mi / np.sqrt(hp * ht), 0.0), 1.0))


def purity(pred, truth) -> float:
    c = contingency(pred, truth).counts
    return float(c.max(axis=1).sum() / c.sum())


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def pair_counts(pred, truth) -> tuple[int, int, int, int]:
    """``(TP, FP, FN, TN)`` over all unordered sample pairs."""
    table = contingency(pred, truth)
    tp = int(_comb2(table.counts).sum())
    same_pred = int(_comb2(table.row_sums).sum())
    same_true = int(_comb2(table.col_sums).sum())
    total = int(_comb2(table.n))
    fp = same_pred - tp
    fn = same_true - tp
    return tp, fp, fn, total - tp - fp - fn


def ari(pred, truth) -> float:
    table = contingency(pred, truth)
    index = float(_comb2(table.counts).sum())
    sa = float(_comb2(table.row_sums).sum())
    sb = float(_comb2(table.col_sums).sum())
    total = float(_comb2(table.n))
    expected = sa * sb / total if total else 0.0
    max_index = 0.5 * (sa + sb)
    denom = max_index - expected
    if denom == 0.0:
        # Only reachable when both partitions are all-singletons or both one cluster.
        return 1.0
    return float((index - expected) / denom)


def precision_recall_f1(pred, truth) -> tuple[float, float, float]:
    """Pairwise precision, recall and F1; any ``0/0`` is taken as ``0``."""
    tp, fp, fn, _ = pair_counts(pred, truth)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return float(precision), float(recall), float(f1)


def evaluate(pred, truth) -> dict[str, float]:
    """All seven scores keyed by :data:`METRIC_NAMES`."""
    precision, recall, f1 = precision_recall_f1(pred, truth)
    return {
        "acc": accuracy(pred, truth),
        "nmi": nmi(pred, truth),
        "purity": purity(pred, truth),
        "ari": ari(pred, truth),
        "f1": f1,
        "precision": precision,
        "recall": recall,
    }
