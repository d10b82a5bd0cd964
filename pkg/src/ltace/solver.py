"""Low-rank tensor approximation of the stacked coherent-link / co-association tensor.

Solves::

    min_{P, E}  ||P||_*  +  lam * ||E||_F^2
    s.t.  P[:, :, 0] == 1 where M == 1,
          P[:, :, 1] + E == A,
          each frontal slice of P symmetric with entries in [0, 1]

by inexact augmented Lagrangian iterations with auxiliary copies ``B`` and
``C`` of the two slices that absorb the symmetry, bound and pinning
constraints. ``||.||_*`` is :func:`ltace.tensor.tnn_fourier`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .tensor import Orientation, tnn_fourier, tnn_prox

__all__ = [
    "LtaConfig",
    "SolverState",
    "LtaResult",
    "initial_state",
    "update_P",
    "update_E",
    "update_B",
    "update_C",
    "update_multipliers",
    "residuals",
    "objective",
    "solve",
]


@dataclass(frozen=True)
class LtaConfig:
    lam: float = 0.002
    mu0: float = 1e-4
    mu_max: float = 1e8
    rho: float = 1.1
    tol: float = 1e-8
    max_iter: int = 500
    orient: Orientation = Orientation.FRONTAL
    track_objective: bool = True
    trace_path: str | Path | None = None

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if not self.mu0 > 0 or not self.mu_max >= self.mu0:
            raise ValueError("need 0 < mu0 <= mu_max")
        if not self.rho > 1:
            raise ValueError(f"rho must exceed 1, got {self.rho}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        object.__setattr__(self, "orient", Orientation(self.orient))


@dataclass
class SolverState:
    P: np.ndarray
    E: np.ndarray
    B: np.ndarray
    C: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    mu: float
    iter: int = 0
    residuals: tuple[float, float, float] = (np.inf, np.inf, np.inf)


@dataclass
class LtaResult:
    refined: np.ndarray
    completed_link: np.ndarray
    iterations: int
    converged: bool
    final_residual: float
    objective_trace: list[float] = field(default_factory=list)
    residual_trace: list[float] = field(default_factory=list)


def initial_state(n: int, cfg: LtaConfig) -> SolverState:
    z = lambda: np.zeros((n, n))  # noqa: E731
    return SolverState(P=np.zeros((n, n, 2)), E=z(), B=z(), C=z(), L1=z(), L2=z(), L3=z(), mu=cfg.mu0)


def update_P(state: SolverState, A: np.ndarray, cfg: LtaConfig) -> np.ndarray:
    mu = state.mu
    target = np.empty_like(state.P)
    target[:, :, 0] = state.B - state.L1 / mu
    target[:, :, 1] = 0.5 * (A + state.C - state.E - (state.L2 + state.L3) / mu)
    return tnn_prox(target, 1.0 / mu, cfg.orient)


def update_E(state: SolverState, A: np.ndarray, cfg: LtaConfig) -> np.ndarray:
    mu = state.mu
    return (mu * A - state.L2 - mu * state.P[:, :, 1]) / (2.0 * cfg.lam + mu)


def update_B(state: SolverState, M: np.ndarray, cfg: LtaConfig) -> np.ndarray:
    p1 = state.P[:, :, 0]
    t1 = 0.5 * (p1 + p1.T + (state.L1 + state.L1.T) / state.mu)
    b = np.clip(t1, 0.0, 1.0)
    b[M == 1] = 1.0
    return b


def update_C(state: SolverState, cfg: LtaConfig) -> np.ndarray:
    p2 = state.P[:, :, 1]
    t2 = 0.5 * (p2 + p2.T + (state.L3 + state.L3.T) / state.mu)
    return np.clip(t2, 0.0, 1.0)


def update_multipliers(state: SolverState, A: np.ndarray, cfg: LtaConfig):
    """Dual ascent on the three equality constraints, then grow ``mu`` up to ``mu_max``."""
    mu = state.mu
    p1, p2 = state.P[:, :, 0], state.P[:, :, 1]
    L1 = state.L1 + mu * (p1 - state.B)
    L2 = state.L2 + mu * (p2 + state.E - A)
    L3 = state.L3 + mu * (p2 - state.C)
    return L1, L2, L3, min(cfg.rho * mu, cfg.mu_max)


def residuals(state: SolverState, A: np.ndarray) -> tuple[float, float, float]:
    p1, p2 = state.P[:, :, 0], state.P[:, :, 1]
    return (
        float(np.max(np.abs(state.B - p1))),
        float(np.max(np.abs(state.C - p2))),
        float(np.max(np.abs(A - state.E - p2))),
    )


def objective(P: np.ndarray, E: np.ndarray, cfg: LtaConfig) -> float:
    return tnn_fourier(P, cfg.orient) + cfg.lam * float(np.sum(E * E))


def _validate(A, M):
    A = np.asarray(A, dtype=float)
    M = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"co-association matrix must be square, got {A.shape}")
    if M.shape != A.shape:
        raise ValueError(f"dimension mismatch: A is {A.shape}, M is {M.shape}")
    for name, x in (("A", A), ("M", M)):
        if not np.all(np.isfinite(x)) or x.min() < 0 or x.max() > 1:
            raise ValueError(f"{name} entries must lie in [0, 1]")
    if np.any((M == 1) & (A != 1)):
        raise ValueError("coherent links must be a subset of unanimous co-association entries")
    return A, M


def _write_trace(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "res_B", "res_C", "res_A", "mu", "objective"])
        w.writerows(rows)


def solve(A, M, cfg: LtaConfig | None = None, callback: Callable[[SolverState], None] | None = None) -> LtaResult:
    """Refine co-association ``A`` using coherent links ``M``.

    Returns the symmetrized and clipped second slice of ``P`` as
    ``refined``. Hitting ``max_iter`` is not an error: ``converged`` is then
    ``False`` and the iterate with the smallest stopping residual is returned.
    ``callback`` sees the live state after every iteration and must not mutate it.
    """
    cfg = cfg or LtaConfig()
    A, M = _validate(A, M)
    n = A.shape[0]
    st = initial_state(n, cfg)

    obj_trace: list[float] = []
    res_trace: list[float] = []
    rows = []
    best = (np.inf, None, None)
    converged = False
    for it in range(1, int(cfg.max_iter) + 1):
        st.P = update_P(st, A, cfg)
        st.E = update_E(st, A, cfg)
        st.B = update_B(st, M, cfg)
        st.C = update_C(st, cfg)
        mu_used = st.mu
        st.L1, st.L2, st.L3, st.mu = update_multipliers(st, A, cfg)
        st.iter = it
        st.residuals = residuals(st, A)
        res = max(st.residuals)
        res_trace.append(res)
        obj = objective(st.P, st.E, cfg) if cfg.track_objective else float("nan")
        obj_trace.append(obj)
        if callback is not None:
            callback(st)
        if cfg.trace_path is not None:
            rows.append([it, *st.residuals, mu_used, obj])
        if res < best[0]:
            best = (res, st.P[:, :, 1].copy(), st.P[:, :, 0].copy())
        if res < cfg.tol:
            converged = True
            break

    if cfg.trace_path is not None:
        _write_trace(cfg.trace_path, rows)

    if converged:
        p2, p1, final_res = st.P[:, :, 1], st.P[:, :, 0], res
    else:
        final_res, p2, p1 = best
    refined = np.clip(0.5 * (p2 + p2.T), 0.0, 1.0)
    return LtaResult(
        refined=refined,
        completed_link=p1.copy(),
        iterations=st.iter,
        converged=converged,
        final_residual=float(final_res),
        objective_trace=obj_trace,
        residual_trace=res_trace,
    )

