"""Third-order tensors under the t-product: t-SVD, tensor nuclear norm and its prox.

A tensor here is a plain ``numpy.ndarray`` of shape ``(n1, n2, n3)``. The
third axis is the *tube* axis along which the DFT is taken. With the
``"lateral"`` orientation the second and third axes are swapped first, so a
stack of two ``n x n`` matrices (shape ``(n, n, 2)``) is treated as ``n``
lateral ``n x 2`` slices coupled by a length-``n`` DFT.

DFT convention: ``numpy.fft.fft`` (unnormalized forward) and
``numpy.fft.ifft`` (``1/n3`` inverse).

Two nuclear norms are exposed:

``tensor_nuclear_norm``
    ``sum_i sum_k |S(i, i, k)|`` over the spatial-domain f-diagonal core
    returned by :func:`tsvd`.
``tnn_fourier``
    ``(1/n3) sum_k ||A_f(:, :, k)||_*``. This is the convex function whose
    proximal operator is :func:`tnn_prox`. It equals ``sum_i S(i, i, 0)``,
    so it never exceeds ``tensor_nuclear_norm``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Orientation",
    "TSvdFactors",
    "orient",
    "t_product",
    "t_transpose",
    "tsvd",
    "tensor_nuclear_norm",
    "tnn_fourier",
    "tnn_prox",
    "TensorConsistencyError",
]

# Imaginary residue tolerated after the inverse DFT of a conjugate-symmetric spectrum.
IMAG_TOL = 1e-10


class TensorConsistencyError(RuntimeError):
    """Raised when a result that must be real comes back with a sizeable imaginary part."""


class Orientation(str, Enum):
    FRONTAL = "frontal"
    LATERAL = "lateral"


def _as_orientation(value) -> Orientation:
    try:
        return Orientation(value)
    except ValueError:
        raise ValueError(f"unknown orientation {value!r}; expected 'frontal' or 'lateral'") from None


def _check_tensor(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 3:
        raise ValueError(f"expected a 3-D array, got shape {t.shape}")
    if min(t.shape) < 1:
        raise ValueError(f"every mode must have size >= 1, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite entries")
    return t


def orient(t: np.ndarray, orientation) -> np.ndarray:
    """Return ``t`` arranged so that the tube axis is last.

    The lateral permutation swaps axes 1 and 2 and is its own inverse.
    """
    if _as_orientation(orientation) is Orientation.LATERAL:
        return np.ascontiguousarray(np.transpose(t, (0, 2, 1)))
    return t


def _real_part(x: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(x.real), initial=0.0)))
    residue = float(np.max(np.abs(x.imag), initial=0.0))
    if residue > IMAG_TOL * scale:
        raise TensorConsistencyError(f"imaginary residue {residue:.3e} after inverse DFT")
    return np.ascontiguousarray(x.real)


def _half_spectrum(n3: int) -> int:
    # Slices 0..n3//2 determine the rest by conjugate symmetry.
    return n3 // 2 + 1


def _fill_conjugate(f: np.ndarray) -> np.ndarray:
    """Complete slices ``n3//2+1 .. n3-1`` (last axis) from their mirrored partners."""
    n3 = f.shape[-1]
    for k in range(_half_spectrum(n3), n3):
        f[..., k] = np.conj(f[..., n3 - k])
    return f


def t_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """t-product ``a * b`` of ``(n1, n2, n3)`` and ``(n2, n4, n3)`` tensors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 3 or b.ndim != 3 or a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ValueError(f"incompatible shapes for t-product: {a.shape} and {b.shape}")
    af = np.fft.fft(a, axis=2)
    bf = np.fft.fft(b, axis=2)
    cf = np.einsum("ijk,jlk->ilk", af, bf)
    c = np.fft.ifft(cf, axis=2)
    if np.isrealobj(a) and np.isrealobj(b):
        return _real_part(c)
    return c


def t_transpose(a: np.ndarray) -> np.ndarray:
    """Tensor transpose: transpose every frontal slice, reverse slices 2..n3."""
    a = np.asarray(a)
    at = np.conj(np.transpose(a, (1, 0, 2)))
    return np.concatenate([at[:, :, :1], at[:, :, :0:-1]], axis=2)


@dataclass(frozen=True)
class TSvdFactors:
    """t-SVD factors of the oriented tensor, ``A = U * S * V^T``.

    ``U`` is ``(n1, n1, n3)``, ``S`` is f-diagonal ``(n1, n2, n3)`` and ``V`` is
    ``(n2, n2, n3)``, all in the oriented frame. ``S_fourier`` holds the
    singular values of each Fourier slice, shape ``(min(n1, n2), n3)``.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    S_fourier: np.ndarray
    orientation: Orientation = Orientation.FRONTAL

    def reconstruct(self) -> np.ndarray:
        """Return ``U * S * V^T`` mapped back to the input's axis order."""
        oriented = t_product(t_product(self.U, self.S), t_transpose(self.V))
        return orient(oriented, self.orientation)

    def diagonals(self) -> np.ndarray:
        """Spatial-domain diagonals ``S(i, i, k)``, shape ``(min(n1, n2), n3)``."""
        r = min(self.S.shape[0], self.S.shape[1])
        idx = np.arange(r)
        return self.S[idx, idx, :]


def tsvd(t, orientation=Orientation.FRONTAL) -> TSvdFactors:
    """Compute the t-SVD by a DFT along the tube axis and one SVD per Fourier slice.

    Singular values within every Fourier slice are non-negative and sorted
    in non-increasing order. Slices ``k`` and ``n3 - k`` use conjugate
    factors so that the inverse DFT of every factor is real.
    """
    orientation = _as_orientation(orientation)
    x = orient(_check_tensor(t), orientation)
    n1, n2, n3 = x.shape
    r = min(n1, n2)
    xf = np.fft.fft(x, axis=2)

    uf = np.zeros((n1, n1, n3), dtype=complex)
    sf = np.zeros((n1, n2, n3), dtype=complex)
    vf = np.zeros((n2, n2, n3), dtype=complex)
    sv = np.zeros((r, n3))
    for k in range(_half_spectrum(n3)):
        slc = xf[:, :, k]
        if k == 0 or 2 * k == n3:
            # These slices of a real tensor are real; a real SVD keeps the factors real.
            slc = slc.real
        u, s, vh = np.linalg.svd(slc, full_matrices=True)
        uf[:, :, k] = u
        vf[:, :, k] = np.conj(vh.T)
        sf[np.arange(r), np.arange(r), k] = s
        sv[:, k] = s
    _fill_conjugate(uf)
    _fill_conjugate(sf)
    _fill_conjugate(vf)
    for k in range(_half_spectrum(n3), n3):
        sv[:, k] = sv[:, n3 - k]

    return TSvdFactors(
        U=_real_part(np.fft.ifft(uf, axis=2)),
        S=_real_part(np.fft.ifft(sf, axis=2)),
        V=_real_part(np.fft.ifft(vf, axis=2)),
        S_fourier=sv,
        orientation=orientation,
    )


def tensor_nuclear_norm(t, orientation=Orientation.FRONTAL) -> float:
    """Sum of absolute values of the spatial-domain diagonal tubes of ``S``."""
    return float(np.sum(np.abs(tsvd(t, orientation).diagonals())))


def _self_conjugate(n3: int) -> list[int]:
    # Fourier slices of a real tensor that are themselves real.
    return [0, n3 // 2] if n3 % 2 == 0 and n3 > 1 else [0]


def _fourier_singular_values(x: np.ndarray) -> np.ndarray:
    n3 = x.shape[2]
    xf = np.fft.fft(x, axis=2)
    real = _self_conjugate(n3)
    rest = [k for k in range(n3) if k not in real]
    out = np.empty((n3, min(x.shape[:2])))
    out[real] = np.linalg.svd(np.moveaxis(xf[:, :, real].real, 2, 0), compute_uv=False)
    if rest:
        out[rest] = np.linalg.svd(np.moveaxis(xf[:, :, rest], 2, 0), compute_uv=False)
    return out  # (n3, r)


def _threshold_slices(slices: np.ndarray, tau: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(slices, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    return (u * s[:, None, :]) @ vh


def tnn_fourier(t, orientation=Orientation.FRONTAL) -> float:
    """``(1/n3) * sum_k ||A_f(:, :, k)||_*``, the norm minimized by :func:`tnn_prox`."""
    x = orient(_check_tensor(t), orientation)
    return float(np.sum(_fourier_singular_values(x)) / x.shape[2])


def tnn_prox(t, tau: float, orientation=Orientation.FRONTAL) -> np.ndarray:
    """Proximal operator ``argmin_X tau * tnn_fourier(X) + 0.5 * ||X - t||_F^2``.

    Each Fourier slice is replaced by its singular-value soft-thresholding at
    level ``tau``. With the ``1/n3`` weighting inside ``tnn_fourier`` and
    Parseval (``||X||_F^2 = (1/n3) sum_k ||X_f^k||_F^2``) the problem
    separates into ``n3`` matrix problems with that same threshold, so
    ``n3 == 1`` is exactly matrix singular value thresholding.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    orientation = _as_orientation(orientation)
    x = orient(_check_tensor(t), orientation)
    n3 = x.shape[2]
    h = _half_spectrum(n3)

    xf = np.fft.fft(x, axis=2)
    real = _self_conjugate(n3)
    rest = [k for k in range(h) if k not in real]
    out = np.empty_like(xf)
    out[:, :, real] = np.moveaxis(_threshold_slices(np.moveaxis(xf[:, :, real].real, 2, 0), tau), 0, 2)
    if rest:
        out[:, :, rest] = np.moveaxis(_threshold_slices(np.moveaxis(xf[:, :, rest], 2, 0), tau), 0, 2)
    _fill_conjugate(out)
    return orient(_real_part(np.fft.ifft(out, axis=2)), orientation)
