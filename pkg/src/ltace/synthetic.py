"""Synthetic benchmark data."""

from __future__ import annotations

import numpy as np

__all__ = ["triangle_blobs"]


def triangle_blobs(n_per: int = 100, separation: float = 4.0, scale: float = 1.0, shuffle: bool = True, seed=0):
    """Three isotropic 2-D Gaussian blobs centred on an equilateral triangle.

    Parameters
    ----------
    n_per : int
        Points per blob.
    separation : float
        Side length of the triangle, i.e. the distance between any two centres.
    scale : float
        Standard deviation of each blob.
    shuffle : bool
        Randomly permute the samples. Without it the blobs are stored
        contiguously, which order-sensitive methods can exploit.
    seed : int or numpy.random.Generator

    Returns
    -------
    X : ndarray of shape (3 * n_per, 2)
    y : ndarray of shape (3 * n_per,)
        Blob index of every point.
    """
    rng = np.random.default_rng(seed)
    s = float(separation)
    centers = np.array([[0.0, 0.0], [s, 0.0], [s / 2, s * 0.866]])
    y = np.repeat(np.arange(3), n_per)
    X = centers[y] + scale * rng.standard_normal((y.size, 2))
    if shuffle:
        perm = rng.permutation(y.size)
        X, y = X[perm], y[perm]
    return X, y
