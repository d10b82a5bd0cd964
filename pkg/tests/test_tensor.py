import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ltace.tensor import (
    Orientation,
    orient,
    t_product,
    t_transpose,
    tensor_nuclear_norm,
    tnn_fourier,
    tnn_prox,
    tsvd,
)


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def test_t_product_matches_block_circulant(rng):
    a = rng.standard_normal((4, 3, 5))
    b = rng.standard_normal((3, 2, 5))
    assert np.allclose(t_product(a, b), oracles.t_product(a, b), atol=1e-12)


def test_t_transpose_is_involution(rng):
    a = rng.standard_normal((3, 4, 5))
    assert np.array_equal(t_transpose(t_transpose(a)), a)
    assert np.array_equal(t_transpose(a), oracles.t_transpose(a))


def test_tsvd_single_slice_is_matrix_svd(rng):
    a = rng.standard_normal((4, 3, 1))
    f = tsvd(a)
    s = np.linalg.svd(a[:, :, 0], compute_uv=False)
    assert np.allclose(f.diagonals()[:, 0], s, atol=1e-12)
    assert tensor_nuclear_norm(a) == pytest.approx(s.sum(), abs=1e-10)


def test_tsvd_zero_tensor():
    f = tsvd(np.zeros((3, 4, 2)))
    assert np.all(f.S == 0)
    assert tensor_nuclear_norm(np.zeros((3, 4, 2))) == 0.0


def test_tsvd_random_reconstruction_against_oracle_product(rng):
    a = rng.standard_normal((4, 3, 2))
    f = tsvd(a)
    rebuilt = oracles.t_product(oracles.t_product(f.U, f.S), oracles.t_transpose(f.V))
    assert rel_err(rebuilt, a) < 1e-8


@pytest.mark.parametrize("shape", [(5, 5, 2), (4, 6, 3), (6, 2, 4), (3, 3, 1)])
@pytest.mark.parametrize("orientation", ["frontal", "lateral"])
def test_tsvd_factor_invariants(rng, shape, orientation):
    a = rng.standard_normal(shape)
    f = tsvd(a, orientation)
    assert rel_err(f.reconstruct(), a) < 1e-8
    off = f.S.copy()
    r = min(off.shape[:2])
    off[np.arange(r), np.arange(r), :] = 0
    assert np.max(np.abs(off)) < 1e-10
    sv = f.S_fourier
    assert np.all(sv >= 0)
    assert np.all(np.diff(sv, axis=0) <= 1e-12)


def test_u_and_v_are_orthogonal_tensors(rng):
    f = tsvd(rng.standard_normal((4, 3, 3)))
    eye = np.zeros((4, 4, 3))
    eye[:, :, 0] = np.eye(4)
    assert np.allclose(t_product(t_transpose(f.U), f.U), eye, atol=1e-10)


def test_nuclear_norm_diag_example():
    a = np.diag([3.0, 1.0])[:, :, None]
    assert tensor_nuclear_norm(a) == pytest.approx(4.0)
    assert tnn_fourier(a) == pytest.approx(4.0)


def test_nuclear_norm_random_matches_oracle(rng):
    a = rng.standard_normal((5, 5, 2))
    assert tensor_nuclear_norm(a) == pytest.approx(oracles.tnn_spatial(a), abs=1e-10)
    assert tnn_fourier(a) == pytest.approx(oracles.tnn_fourier(a), abs=1e-10)


def test_fourier_norm_is_first_spatial_diagonal(rng):
    a = rng.standard_normal((4, 5, 3))
    f = tsvd(a)
    assert tnn_fourier(a) == pytest.approx(f.diagonals()[:, 0].sum(), abs=1e-10)
    assert tnn_fourier(a) <= tensor_nuclear_norm(a) + 1e-12


def test_lateral_equals_frontal_of_permuted(rng):
    a = rng.standard_normal((6, 6, 2))
    perm = np.transpose(a, (0, 2, 1))
    assert tensor_nuclear_norm(a, "lateral") == pytest.approx(tensor_nuclear_norm(perm, "frontal"), abs=1e-12)
    p_lat = tnn_prox(a, 0.3, Orientation.LATERAL)
    p_front = tnn_prox(perm, 0.3, Orientation.FRONTAL)
    assert np.allclose(p_lat, np.transpose(p_front, (0, 2, 1)), atol=1e-12)
    assert np.array_equal(orient(orient(a, "lateral"), "lateral"), a)


def test_tsvd_rejects_non_finite():
    a = np.zeros((2, 2, 2))
    a[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        tsvd(a)
    with pytest.raises(ValueError):
        tsvd(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        tsvd(np.zeros((2, 2, 2)), "sideways")


def test_prox_matrix_svt_example():
    a = np.diag([3.0, 1.0])[:, :, None]
    assert np.allclose(tnn_prox(a, 2.0)[:, :, 0], np.diag([1.0, 0.0]), atol=1e-12)


def test_prox_small_tau_is_identity(rng):
    a = rng.standard_normal((4, 4, 2))
    assert np.allclose(tnn_prox(a, 1e-14), a, atol=1e-12)


def test_prox_rejects_bad_tau():
    with pytest.raises(ValueError):
        tnn_prox(np.zeros((2, 2, 2)), 0.0)
    with pytest.raises(ValueError):
        tnn_prox(np.zeros((2, 2, 2)), -1.0)


@pytest.mark.parametrize("n3", [1, 2, 3, 4])
def test_prox_single_matrix_agrees_with_matrix_svt(rng, n3):
    a = rng.standard_normal((3, 4, n3))
    if n3 == 1:
        u, s, vh = np.linalg.svd(a[:, :, 0], full_matrices=False)
        expected = (u * np.maximum(s - 0.7, 0)) @ vh
        assert np.allclose(tnn_prox(a, 0.7)[:, :, 0], expected, atol=1e-10)
    # Fourier-slice view holds for every n3.
    xf = oracles.to_fourier(a)
    pf = oracles.to_fourier(tnn_prox(a, 0.7))
    for k in range(n3):
        u, s, vh = np.linalg.svd(xf[:, :, k], full_matrices=False)
        assert np.allclose(pf[:, :, k], (u * np.maximum(s - 0.7, 0)) @ vh, atol=1e-10)


def test_prox_local_optimality_and_subgradient_reference(rng):
    tau = 0.5
    t = rng.standard_normal((3, 3, 2))
    p = tnn_prox(t, tau)
    f0 = oracles.prox_objective(p, t, tau)
    for _ in range(200):
        eta = rng.standard_normal(t.shape)
        eta *= 1e-3 / np.linalg.norm(eta)
        assert f0 <= oracles.prox_objective(p + eta, t, tau) + 1e-12
    ref = oracles.subgradient_minimize(t[None], tau, iters=5000)[0]
    assert abs(ref - f0) < 1e-4


def test_prox_of_n_times_weighted_norm_needs_larger_threshold(rng):
    # Thresholding at tau is optimal for the 1/n3-weighted norm; the unweighted sum
    # would need tau * n3. The subgradient reference separates the two.
    tau = 0.5
    t = rng.standard_normal((4, 3, 3, 2))
    ref = oracles.subgradient_minimize(t, tau, iters=5000)
    ours = np.array([oracles.prox_objective(tnn_prox(x, tau), x, tau) for x in t])
    doubled = np.array([oracles.prox_objective(tnn_prox(x, 2 * tau), x, tau) for x in t])
    assert np.all(np.abs(ref - ours) < 1e-4)
    assert np.all(doubled > ref + 1e-2)


arrays = st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s))


@settings(max_examples=40, deadline=None)
@given(arrays, st.floats(0.01, 3.0), st.sampled_from(["frontal", "lateral"]))
def test_prox_nonexpansive_and_norm_decreasing(gen, tau, orientation):
    shape = tuple(gen.integers(1, 6, size=3))
    x = gen.standard_normal(shape)
    y = gen.standard_normal(shape)
    px, py = tnn_prox(x, tau, orientation), tnn_prox(y, tau, orientation)
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-10
    assert tnn_fourier(px, orientation) <= tnn_fourier(x, orientation) + 1e-10


@settings(max_examples=30, deadline=None)
@given(arrays)
def test_tsvd_reconstruction_property(gen):
    shape = tuple(gen.integers(1, 17, size=2)) + (int(gen.integers(1, 5)),)
    a = gen.standard_normal(shape)
    assert rel_err(tsvd(a).reconstruct(), a) < 1e-8
