"""Candidate pools of base clusterings from K-means with randomized cluster counts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .partition import Partition

__all__ = ["PoolConfig", "Pool", "kmeans", "generate_pool", "sample_indices", "sample_pool"]

KMEANS_MAX_ITER = 300


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_data(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"data matrix must be 2-D, got shape {X.shape}")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    if not np.all(np.isfinite(X)):
        raise ValueError("data matrix contains non-finite entries")
    return X


def _sqdist(X: np.ndarray, C: np.ndarray, xsq: np.ndarray) -> np.ndarray:
    d = xsq[:, None] - 2.0 * (X @ C.T) + np.sum(C * C, axis=1)[None, :]
    return np.maximum(d, 0.0)


def _plusplus(X: np.ndarray, k: int, rng: np.random.Generator, xsq: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sqdist(X, centers[:1], xsq)[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[c] = X[idx]
        closest = np.minimum(closest, _sqdist(X, centers[c : c + 1], xsq)[:, 0])
    return centers


def _lloyd(X, k, rng, max_iter, xsq):
    centers = _plusplus(X, k, rng, xsq)
    labels = np.full(X.shape[0], -1)
    for _ in range(max_iter):
        d = _sqdist(X, centers, xsq)
        new = np.argmin(d, axis=1)
        counts = np.bincount(new, minlength=k)
        # Repair empty clusters with the point farthest from its own center.
        for c in np.flatnonzero(counts == 0):
            own = d[np.arange(X.shape[0]), new]
            far = int(np.argmax(own))
            if own[far] <= 0:
                break
            new[far] = c
            d[far] = 0.0
            counts = np.bincount(new, minlength=k)
        if np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            members = labels == c
            if members.any():
                centers[c] = X[members].mean(axis=0)
    inertia = float(np.sum(_sqdist(X, centers, xsq)[np.arange(X.shape[0]), labels]))
    return labels, inertia


def kmeans(X, k: int, seed=0, n_init: int = 1, max_iter: int = KMEANS_MAX_ITER) -> Partition:
    """Lloyd's algorithm from k-means++ seeding.

    With ``n_init > 1`` the run of smallest inertia is kept. The result
    may hold fewer than ``k`` clusters when the data has fewer than ``k``
    distinct points.
    """
    X = _check_data(X)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = _rng(seed)
    xsq = np.sum(X * X, axis=1)
    best_labels, best_inertia = None, np.inf
    for _ in range(n_init):
        labels, inertia = _lloyd(X, k, rng, max_iter, xsq)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return Partition.from_labels(best_labels)


@dataclass(frozen=True)
class PoolConfig:
    pool_size: int = 100
    k_min: int = 2
    k_max: int | None = None  # floor(sqrt(n)) when None
    kmeans_iters: int = KMEANS_MAX_ITER
    seed: int = 0

    def resolve_k_max(self, n: int) -> int:
        k_max = self.k_max if self.k_max is not None else math.isqrt(n)
        if not 2 <= self.k_min <= k_max <= n:
            raise ValueError(f"need 2 <= k_min <= k_max <= n, got k_min={self.k_min}, k_max={k_max}, n={n}")
        return k_max


@dataclass
class Pool:
    labels: np.ndarray  # (n, pool_size)
    ks: list[int] = field(default_factory=list)
    column_seeds: list[list[int]] = field(default_factory=list)


def generate_pool(X, cfg: PoolConfig = PoolConfig()) -> Pool:
    """Run ``cfg.pool_size`` K-means clusterings, each with its own K and RNG stream.

    Column ``j`` draws from ``SeedSequence([cfg.seed, j])`` so any subset of
    columns can be regenerated independently.
    """
    X = _check_data(X)
    if cfg.pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    n = X.shape[0]
    k_max = cfg.resolve_k_max(n)
    cols, ks, seeds = [], [], []
    for j in range(cfg.pool_size):
        entropy = [int(cfg.seed), j]
        rng = np.random.default_rng(np.random.SeedSequence(entropy))
        k = int(rng.integers(cfg.k_min, k_max + 1))
        cols.append(kmeans(X, k, rng, max_iter=cfg.kmeans_iters).labels)
        ks.append(k)
        seeds.append(entropy)
    return Pool(labels=np.stack(cols, axis=1), ks=ks, column_seeds=seeds)


def sample_indices(n_columns: int, m: int, seed) -> np.ndarray:
    if not 1 <= m <= n_columns:
        raise ValueError(f"cannot sample {m} base clusterings from a pool of {n_columns}")
    return _rng(seed).choice(n_columns, size=m, replace=False)


def sample_pool(pool, m: int, seed) -> np.ndarray:
    """``m`` distinct pool columns chosen uniformly without replacement."""
    pool = np.asarray(pool)
    return pool[:, sample_indices(pool.shape[1], m, seed)]
