"""Pairwise evidence from base clusterings: connective, co-association and coherent-link matrices."""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_label_matrix",
    "connective_matrix",
    "cooccurrence_counts",
    "co_association",
    "coherent_link",
    "coherent_link_from_labels",
]


def as_label_matrix(labels) -> np.ndarray:
    """Validate and return an ``(n, m)`` integer label matrix.

    A 1-D input is read as a single base clustering (``m = 1``).
    """
    arr = np.asarray(labels)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"label matrix must be 2-D, got shape {arr.shape}")
    n, m = arr.shape
    if m == 0:
        raise ValueError("label matrix has no base clusterings (m = 0)")
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise ValueError("labels must be integers")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"labels must be integers, got dtype {arr.dtype}")
    if np.any(arr < 0):
        raise ValueError("labels must be non-negative")
    return arr.astype(np.int64, copy=False)


def connective_matrix(pi) -> np.ndarray:
    """Binary co-membership matrix of one clustering: ``1`` where ``pi[i] == pi[j]``."""
    pi = np.asarray(pi).ravel()
    if pi.size == 0:
        raise ValueError("empty label vector")
    if pi.size < 2:
        raise ValueError("need at least 2 samples")
    return (pi[:, None] == pi[None, :]).astype(float)


def cooccurrence_counts(labels) -> np.ndarray:
    """Integer count of base clusterings in which each pair shares a cluster."""
    pi = as_label_matrix(labels)
    n, m = pi.shape
    counts = np.zeros((n, n), dtype=np.int64)
    for col in pi.T:
        # Labels are opaque ids; compress to 0..k-1 to build a one-hot indicator.
        _, codes = np.unique(col, return_inverse=True)
        onehot = np.zeros((n, codes.max() + 1), dtype=np.int64)
        onehot[np.arange(n), codes] = 1
        counts += onehot @ onehot.T
    return counts


def co_association(labels) -> np.ndarray:
    """Mean of the ``m`` connective matrices; entries are multiples of ``1/m``."""
    pi = as_label_matrix(labels)
    return cooccurrence_counts(pi) / pi.shape[1]


def coherent_link_from_labels(labels) -> np.ndarray:
    """Pairs co-clustered in every base clustering, decided on integer counts."""
    pi = as_label_matrix(labels)
    return (cooccurrence_counts(pi) == pi.shape[1]).astype(float)


def coherent_link(coassoc, m: int | None = None) -> np.ndarray:
    """Coherent-link matrix of a co-association matrix.

    When ``m`` is given the counts ``round(A * m)`` are compared with ``m``
    as integers, so no entry is missed through rounding in ``A``. Without
    ``m`` the input must already hold exact ones where the pair is unanimous.
    """
    a = np.asarray(coassoc, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"co-association matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or a.min() < 0 or a.max() > 1:
        raise ValueError("co-association entries must lie in [0, 1]")
    if not np.array_equal(a, a.T):
        raise ValueError("co-association matrix must be symmetric")
    if m is not None:
        counts = np.rint(a * m).astype(np.int64)
        return (counts == m).astype(float)
    return (a == 1.0).astype(float)
