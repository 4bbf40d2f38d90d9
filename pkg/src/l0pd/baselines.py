"""Reference solvers: dual ascent without CD, primal CD, and exhaustive search."""

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .duality import dual_from_primal, duality_gap, primal_objective
from .errors import UnsupportedConfigurationError
from .inner import InnerConfig, _cd_sweep, inner_solve
from .losses import LossModel

ORACLE_MAX_P = 15


def dual_ascent_solve(data, hp, loss, config=None, init=None):
    """Projected super-gradient ascent on the dual, primal taken from the link only."""
    return inner_solve(data, hp, loss, config or InnerConfig(), init, primal_cd=False)


@dataclass(frozen=True)
class CDConfig:
    max_sweeps: int = 10_000
    tol: float = 1e-10


@dataclass
class CDResult:
    beta: np.ndarray
    alpha: np.ndarray
    primal_value: float
    gap: float
    support: tuple
    sweeps: int
    wall_time: float
    trace: list

    @property
    def nnz(self):
        return len(self.support)


def cd_solve(data, hp, config=None, beta0=None):
    """Cyclic coordinate descent on the least-squares problem over all features.

    Stops when a sweep moves no coordinate by more than ``config.tol``.  The
    reported gap uses the dual point ``X beta - y``.
    """
    config = config or CDConfig()
    loss = LossModel.square()
    start = time.perf_counter()
    beta = np.zeros(data.p) if beta0 is None else np.array(beta0, dtype=float)
    r = data.y - data.X @ beta
    col_sq = data.column_norms**2
    trace = []
    sweeps = 0
    for sweeps in range(1, config.max_sweeps + 1):
        prev = beta.copy()
        _cd_sweep(data.X, r, beta, col_sq, hp.lambda0, hp.lambda1, hp.lambda2)
        trace.append(primal_objective(beta, data, hp, loss))
        if np.max(np.abs(beta - prev), initial=0.0) < config.tol:
            break
    primal = primal_objective(beta, data, hp, loss)
    if hp.lambda2 > 0:
        alpha = dual_from_primal(beta, data, loss)
        gap = duality_gap(beta, alpha, data, hp, loss)
    else:
        alpha, gap = data.X @ beta - data.y, float("nan")
    return CDResult(
        beta, alpha, primal, gap, tuple(int(j) for j in np.flatnonzero(beta)),
        sweeps, time.perf_counter() - start, trace,
    )


@dataclass
class OracleResult:
    beta: np.ndarray
    support: tuple
    objective: float
    supports_evaluated: int


def _ridge_on_support(G, b, lam2, S):
    if not S:
        return np.zeros(0)
    idx = list(S)
    A = G[np.ix_(idx, idx)] + 2.0 * lam2 * np.eye(len(idx))
    return np.linalg.lstsq(A, b[idx], rcond=None)[0]


def oracle_solve(data, hp):
    """Global minimizer of the least-squares problem by enumerating every support.

    Requires ``p <= 15`` and ``lambda1 == 0`` so that each support's
    sub-problem is a ridge regression with a closed-form solution.  Ties go
    to the smaller support, then the lexicographically first one.
    """
    if data.p > ORACLE_MAX_P:
        raise UnsupportedConfigurationError(f"oracle needs p <= {ORACLE_MAX_P}, got {data.p}")
    if hp.lambda1 != 0:
        raise UnsupportedConfigurationError("oracle needs lambda1 == 0")
    X, y = data.X, data.y
    G, b = X.T @ X, X.T @ y
    yy = float(y @ y)
    best_f, best_S, best_coef = None, (), np.zeros(0)
    count = 0
    for k in range(data.p + 1):
        for S in itertools.combinations(range(data.p), k):
            count += 1
            coef = _ridge_on_support(G, b, hp.lambda2, S)
            if k:
                idx = list(S)
                fit = yy - 2.0 * coef @ b[idx] + coef @ G[np.ix_(idx, idx)] @ coef
                f = 0.5 * fit + hp.lambda2 * coef @ coef + hp.lambda0 * k
            else:
                f = 0.5 * yy
            if best_f is None or f < best_f - 1e-12 * max(1.0, abs(best_f)):
                best_f, best_S, best_coef = f, S, coef
    beta = np.zeros(data.p)
    beta[list(best_S)] = best_coef
    # the objective is reported exactly at the returned vector
    objective = primal_objective(beta, data, hp, LossModel.square())
    support = tuple(int(j) for j in np.flatnonzero(beta))
    return OracleResult(beta, support, objective, count)
