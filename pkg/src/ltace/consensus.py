"""Consensus partitions from a (refined) co-association matrix."""

from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.linalg import eigh
from scipy.spatial.distance import squareform

from .basegen import kmeans
from .partition import Partition

__all__ = ["spectral_consensus", "hierarchical_consensus", "cut_linkage", "spectral_embedding"]

SYMMETRY_TOL = 1e-10
DEGREE_FLOOR = 1e-12
SPECTRAL_RESTARTS = 20
LINKAGES = ("average", "single", "complete")


def _check_similarity(S, k: int) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"similarity matrix must be square, got shape {S.shape}")
    n = S.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if not np.all(np.isfinite(S)):
        raise ValueError("similarity matrix contains non-finite entries")
    if np.max(np.abs(S - S.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("similarity matrix is not symmetric")
    return 0.5 * (S + S.T)


def spectral_embedding(S, k: int) -> np.ndarray:
    """Row-normalized eigenvectors of the ``k`` smallest eigenvalues of ``I - D^-1/2 S D^-1/2``."""
    S = _check_similarity(S, k)
    n = S.shape[0]
    deg = np.maximum(S.sum(axis=1), DEGREE_FLOOR)
    dinv = 1.0 / np.sqrt(deg)
    lap = np.eye(n) - dinv[:, None] * S * dinv[None, :]
    _, vecs = eigh(0.5 * (lap + lap.T), subset_by_index=[0, k - 1])
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return vecs / np.where(norms > 0, norms, 1.0)


def spectral_consensus(S, k: int, seed=0, n_init: int = SPECTRAL_RESTARTS) -> Partition:
    """Normalized spectral clustering followed by K-means on the embedded rows."""
    emb = spectral_embedding(S, k)
    return kmeans(emb, k, seed, n_init=n_init)


def cut_linkage(Z: np.ndarray, n: int, k: int) -> np.ndarray:
    """Labels after replaying the first ``n - k`` merges of linkage matrix ``Z``."""
    parent = np.arange(2 * n - 1)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for step in range(n - k):
        a, b = int(Z[step, 0]), int(Z[step, 1])
        parent[find(a)] = n + step
        parent[find(b)] = n + step
    roots = np.array([find(i) for i in range(n)])
    return Partition.from_labels(roots).labels


def hierarchical_consensus(S, k: int, method: str = "average") -> Partition:
    """Agglomerative clustering on the dissimilarity ``1 - S``, cut at ``k`` clusters."""
    if method not in LINKAGES:
        raise ValueError(f"unknown linkage {method!r}; expected one of {LINKAGES}")
    S = _check_similarity(S, k)
    n = S.shape[0]
    if k == n:
        return Partition.from_labels(np.arange(n))
    D = np.clip(1.0 - S, 0.0, None)
    np.fill_diagonal(D, 0.0)
    Z = linkage(squareform(D, checks=False), method=method)
    return Partition.from_labels(cut_linkage(Z, n, k))
