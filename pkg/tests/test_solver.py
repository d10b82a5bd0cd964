import warnings

import numpy as np
import pytest

import oracles
from ltace.ensemble import co_association, coherent_link_from_labels
from ltace.solver import (
    LtaConfig,
    initial_state,
    objective,
    residuals,
    solve,
    update_B,
    update_C,
    update_E,
    update_multipliers,
    update_P,
)
from ltace.tensor import tnn_prox


def random_state(rng, n=5, mu=0.7):
    cfg = LtaConfig(mu0=mu, mu_max=max(mu, 1e8))
    st = initial_state(n, cfg)
    st.P = rng.random((n, n, 2))
    for name in ("E", "B", "C", "L1", "L2", "L3"):
        setattr(st, name, rng.standard_normal((n, n)))
    return st, cfg


def random_ensemble(seed, n=40, m=10):
    rng = np.random.default_rng(seed)
    truth = rng.integers(0, 3, n)
    cols = []
    for _ in range(m):
        if rng.random() < 0.6:
            # noisy refinement of the truth
            col = truth * 10 + rng.integers(0, 2, n)
            flip = rng.random(n) < 0.1
            col[flip] = rng.integers(0, 30, flip.sum())
        else:
            col = rng.integers(0, int(rng.integers(2, 7)), n)
        cols.append(col)
    pi = np.stack(cols, axis=1)
    return co_association(pi), coherent_link_from_labels(pi)


# ---- single updates -------------------------------------------------------


def test_update_P_assembles_target(rng=np.random.default_rng(0)):
    st, cfg = random_state(rng)
    A = rng.random((5, 5))
    mu = st.mu
    t = np.empty((5, 5, 2))
    for i in range(5):
        for j in range(5):
            t[i, j, 0] = st.B[i, j] - st.L1[i, j] / mu
            t[i, j, 1] = 0.5 * (A[i, j] + st.C[i, j] - st.E[i, j] - (st.L2[i, j] + st.L3[i, j]) / mu)
    assert np.allclose(update_P(st, A, cfg), tnn_prox(t, 1 / mu, cfg.orient), atol=1e-13)


def test_update_P_zero_state():
    cfg = LtaConfig()
    st = initial_state(4, cfg)
    assert np.array_equal(update_P(st, np.zeros((4, 4)), cfg), np.zeros((4, 4, 2)))


def test_update_P_large_mu_returns_target():
    rng = np.random.default_rng(1)
    st, cfg = random_state(rng, mu=1e12)
    A = rng.random((5, 5))
    p = update_P(st, A, cfg)
    assert np.allclose(p[:, :, 0], st.B, atol=1e-9)
    assert np.allclose(p[:, :, 1], 0.5 * (A + st.C - st.E), atol=1e-9)


def test_update_E_examples():
    rng = np.random.default_rng(2)
    st, cfg = random_state(rng)
    A = rng.random((5, 5))
    st.P[:, :, 1] = A
    st.L2[:] = 0
    assert np.allclose(update_E(st, A, cfg), 0)

    st.P[:, :, 1] = rng.random((5, 5))
    zero_lam = LtaConfig(lam=0.0)
    assert np.allclose(update_E(st, A, zero_lam), A - st.P[:, :, 1], atol=1e-14)

    st = initial_state(2, LtaConfig(mu0=1.0))
    E = update_E(st, np.eye(2), LtaConfig(lam=0.5, mu0=1.0))
    assert np.array_equal(E, np.eye(2) / 2)


def test_update_B_branches():
    cfg = LtaConfig(mu0=1.0)
    st = initial_state(2, cfg)
    st.P[:, :, 0] = [[1.5, -0.2], [-0.2, 0.4]]
    M = np.array([[0.0, 0.0], [0.0, 1.0]])
    B = update_B(st, M, cfg)
    assert B[0, 0] == 1.0  # clipped from 1.5
    assert B[0, 1] == B[1, 0] == 0.0  # clipped from -0.2
    assert B[1, 1] == 1.0  # pinned, although T1 = 0.4


def test_update_C_examples():
    rng = np.random.default_rng(3)
    cfg = LtaConfig(mu0=2.0)
    st = initial_state(4, cfg)
    sym = rng.random((4, 4))
    sym = 0.5 * (sym + sym.T)
    st.P[:, :, 1] = sym
    assert np.array_equal(update_C(st, cfg), sym)

    st, cfg = random_state(rng, n=4)
    C = update_C(st, cfg)
    assert np.array_equal(C, C.T)
    p2 = st.P[:, :, 1]
    for i in range(4):
        for j in range(4):
            t2 = 0.5 * (p2[i, j] + p2[j, i] + (st.L3[i, j] + st.L3[j, i]) / st.mu)
            assert C[i, j] == min(max(t2, 0.0), 1.0)


def test_update_multipliers():
    cfg = LtaConfig(mu0=0.5)
    st = initial_state(3, cfg)
    A = np.eye(3)
    st.P[:, :, 0] = st.B = np.full((3, 3), 0.2)
    st.P[:, :, 1] = st.C = np.eye(3)
    L1, L2, L3, mu = update_multipliers(st, A, cfg)
    assert not L1.any() and not L2.any() and not L3.any()
    assert mu == pytest.approx(0.55)

    st.mu = cfg.mu_max
    assert update_multipliers(st, A, cfg)[3] == cfg.mu_max


def test_one_step_from_fresh_state():
    A, M = random_ensemble(0, n=6, m=3)
    cfg = LtaConfig(lam=0.1, mu0=0.5)
    st = initial_state(6, cfg)
    # fresh state: T = (0, A/2); prox threshold 2
    P = tnn_prox(np.stack([np.zeros((6, 6)), A / 2], axis=2), 2.0, cfg.orient)
    E = (0.5 * A - 0.5 * P[:, :, 1]) / (0.2 + 0.5)
    B = np.clip(0.5 * (P[:, :, 0] + P[:, :, 0].T), 0, 1)
    B[M == 1] = 1
    C = np.clip(0.5 * (P[:, :, 1] + P[:, :, 1].T), 0, 1)
    L1 = 0.5 * (P[:, :, 0] - B)
    L2 = 0.5 * (P[:, :, 1] + E - A)
    L3 = 0.5 * (P[:, :, 1] - C)

    st.P = update_P(st, A, cfg)
    st.E = update_E(st, A, cfg)
    st.B = update_B(st, M, cfg)
    st.C = update_C(st, cfg)
    got = update_multipliers(st, A, cfg)
    for ours, ref in zip((st.P, st.E, st.B, st.C, *got[:3]), (P, E, B, C, L1, L2, L3)):
        assert np.allclose(ours, ref, atol=1e-14)
    assert got[3] == pytest.approx(0.55)


# ---- full solve -----------------------------------------------------------


@pytest.mark.parametrize("orient", ["lateral", "frontal"])
def test_contract_on_random_ensembles(orient):
    for seed in range(3):
        A, M = random_ensemble(seed)
        cfg = LtaConfig(orient=orient)
        mus = []

        def check(st):
            assert np.all(st.B[M == 1] == 1)
            assert np.array_equal(st.B, st.B.T) and st.B.min() >= 0 and st.B.max() <= 1
            assert np.array_equal(st.C, st.C.T) and st.C.min() >= 0 and st.C.max() <= 1
            mus.append(st.mu)

        res = solve(A, M, cfg, callback=check)
        assert res.converged and res.final_residual < 1e-8
        assert np.all(np.diff(mus) >= 0) and max(mus) <= cfg.mu_max
        assert np.array_equal(res.refined, res.refined.T)
        assert res.refined.min() >= 0 and res.refined.max() <= 1
        running_min = np.minimum.accumulate(res.residual_trace)
        assert running_min[-1] < running_min[len(running_min) // 2]


@pytest.mark.parametrize(
    "orient",
    [
        "lateral",
        pytest.param(
            "frontal",
            marks=pytest.mark.xfail(
                strict=True,
                reason="frontal iterates stop about 0.1 above the feasible point P = (A, A), E = 0 at lam = 0.002",
            ),
        ),
    ],
)
def test_objective_beats_feasible_comparison_points(orient):
    for seed in range(3):
        A, M = random_ensemble(seed, n=30)
        cfg = LtaConfig(orient=orient)
        res = solve(A, M, cfg)
        ours = res.objective_trace[-1]
        for p1 in (M, A):
            assert ours <= objective(np.stack([p1, A], axis=2), np.zeros_like(A), cfg) + 1e-9


def test_feasibility_at_convergence():
    A, M = random_ensemble(4)
    cfg = LtaConfig()
    final = {}
    res = solve(A, M, cfg, callback=lambda st: final.update(r=residuals(st, A)))
    assert res.converged
    assert final["r"][2] < 1e-8


def test_determinism():
    A, M = random_ensemble(5)
    r1 = solve(A, M, LtaConfig())
    r2 = solve(A, M, LtaConfig())
    assert r1.residual_trace == r2.residual_trace
    assert r1.objective_trace == r2.objective_trace
    assert np.array_equal(r1.refined, r2.refined)


def test_non_convergence_is_reported():
    A, M = random_ensemble(6)
    res = solve(A, M, LtaConfig(max_iter=3))
    assert not res.converged
    assert res.iterations == 3
    assert res.final_residual == min(res.residual_trace)


def test_input_errors():
    with pytest.raises(ValueError):
        solve(np.eye(3), np.eye(4))
    A = np.full((3, 3), 0.5)
    np.fill_diagonal(A, 1)
    with pytest.raises(ValueError):
        solve(A, np.ones((3, 3)))
    with pytest.raises(ValueError):
        LtaConfig(rho=1.0)


def test_trace_dump(tmp_path):
    A, M = random_ensemble(7, n=10)
    path = tmp_path / "trace.csv"
    res = solve(A, M, LtaConfig(trace_path=path))
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,res_B,res_C,res_A,mu,objective"
    assert len(lines) == res.iterations + 1


def test_all_ones_coherent_links():
    ones = np.ones((5, 5))
    for orient in ("lateral", "frontal"):
        res = solve(ones, ones, LtaConfig(orient=orient))
        assert res.converged
        assert np.allclose(res.completed_link, 1, atol=1e-8)


@pytest.mark.parametrize("S", [np.eye(3), np.ones((4, 4))])
def test_unanimous_inputs_are_fixpoints_when_error_is_expensive(S):
    # E carries the nuclear-norm subgradient scaled by 1/(2 lam), so the
    # fixpoint is approached as lam grows rather than met at the default lam.
    res = solve(S, S, LtaConfig(orient="frontal", lam=1.0))
    assert np.allclose(res.refined, S, atol=1e-5)
    gaps = [np.abs(solve(S, S, LtaConfig(lam=lam)).refined - S).max() for lam in (1.0, 1e2, 1e4)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4


TOY = np.array([[1, 1, 1, 2, 2, 2], [1, 1, 2, 2, 2, 2], [1, 1, 1, 2, 3, 3]]).T
TOY_TRUTH = np.array([0, 0, 0, 1, 1, 1])


def block_contrast(S):
    same = TOY_TRUTH[:, None] == TOY_TRUTH[None, :]
    return S[same].min() - S[~same].max()


@pytest.mark.parametrize("orient", ["lateral", "frontal"])
def test_toy_instance_concentrates_on_blocks(orient):
    A, M = co_association(TOY), coherent_link_from_labels(TOY)
    lam = 1.0
    res = solve(A, M, LtaConfig(lam=lam, orient=orient))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, ref, _ = oracles.lta_reference(A, M, lam / 2, orient)
    assert block_contrast(res.refined) > 0
    assert block_contrast(ref) > 0


@pytest.mark.parametrize("orient", ["lateral", "frontal"])
def test_fixed_point_tracks_half_lambda_optimum(orient):
    # The P-update thresholds both slices with one weight although slice two
    # appears in two penalty terms; the iterates settle at the optimum for lam/2.
    A, M = co_association(TOY), coherent_link_from_labels(TOY)
    lam = 1.0
    res = solve(A, M, LtaConfig(lam=lam, orient=orient))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, half, _ = oracles.lta_reference(A, M, lam / 2, orient)
    assert np.abs(res.refined - half).max() < 5e-3


def test_frontal_is_equivariant_to_sample_order_and_lateral_is_not():
    A, M = random_ensemble(8, n=30)
    perm = np.random.default_rng(0).permutation(30)
    Ap, Mp = A[np.ix_(perm, perm)], M[np.ix_(perm, perm)]
    gaps = {}
    for orient in ("frontal", "lateral"):
        base = solve(A, M, LtaConfig(orient=orient)).refined
        moved = solve(Ap, Mp, LtaConfig(orient=orient)).refined
        gaps[orient] = np.abs(base[np.ix_(perm, perm)] - moved).max()
    assert gaps["frontal"] < 1e-6
    assert gaps["lateral"] > 1e-3
