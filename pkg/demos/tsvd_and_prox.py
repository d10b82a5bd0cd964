"""
t-SVD and singular value thresholding on a small tensor
=======================================================

Factor a random tensor, rebuild it, and watch the proximal step shrink its
nuclear norm.
"""

import numpy as np

from ltace.tensor import t_product, t_transpose, tensor_nuclear_norm, tnn_fourier, tnn_prox, tsvd

rng = np.random.default_rng(0)
a = rng.standard_normal((6, 5, 3))

###############################################################################
# The factors multiply back to the input under the t-product.
f = tsvd(a)
rebuilt = t_product(t_product(f.U, f.S), t_transpose(f.V))
print("relative reconstruction error:", np.linalg.norm(rebuilt - a) / np.linalg.norm(a))

# Singular values per Fourier slice, largest first.
print("Fourier-domain singular values:\n", np.round(f.S_fourier, 3))

###############################################################################
# Two nuclear norms: the spatial one sums |S(i, i, k)| over every tube entry,
# the Fourier one averages the per-slice matrix nuclear norms. The proximal
# operator minimizes the second.
print("spatial norm:", tensor_nuclear_norm(a))
print("Fourier norm:", tnn_fourier(a))

for tau in (0.1, 1.0, 3.0):
    p = tnn_prox(a, tau)
    ranks = [int(np.linalg.matrix_rank(s)) for s in np.moveaxis(np.fft.fft(p, axis=2), 2, 0)]
    print(f"tau={tau:<4} Fourier norm {tnn_fourier(p):7.3f}  slice ranks {ranks}")

###############################################################################
# Lateral orientation swaps the last two modes first, so the FFT runs along
# the second axis instead of the third.
lat = tnn_prox(a, 1.0, "lateral")
same = tnn_prox(a.transpose(0, 2, 1), 1.0).transpose(0, 2, 1)
print("lateral == frontal of swapped tensor:", np.allclose(lat, same))
