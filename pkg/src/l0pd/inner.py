"""Sub-problem solver: projected dual super-gradient ascent with a primal CD pass."""

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .duality import duality_gap, penalty_value, primal_from_dual, psi
from .errors import DomainError, NumericalDivergenceError
from .losses import LossKind, LossModel


@dataclass(frozen=True)
class FixedStep:
    """Constant dual step size."""

    omega: float = 5e-4

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be positive")

    def __call__(self, t):
        return self.omega


@dataclass(frozen=True)
class InverseTimeStep:
    """Decreasing step ``1 / (t * gamma)``."""

    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")

    def __call__(self, t):
        return 1.0 / (t * self.gamma)


def lipschitz_step(data, hp, loss):
    """Fixed step ``1 / (mu + sigma_max(X)^2 / (2 lambda2))``.

    The inverse curvature of the dual on a fixed support; stable where the
    default 5e-4 would diverge (small ``lambda2`` or large column norms).
    """
    sigma = np.linalg.norm(data.X, 2) if data.p else 0.0
    return FixedStep(1.0 / (loss.smoothness_mu() + sigma * sigma / (2.0 * hp.lambda2)))


@dataclass(frozen=True)
class InnerConfig:
    step: object = field(default_factory=FixedStep)
    max_iters: int = 10_000
    gap_tol: float = 1e-6
    gap_change_tol: float = 1e-6
    cd_passes_per_iter: int = 1
    # "best": start CD from the lower-objective of the link output and the
    # previous CD iterate; "link": always from the link output
    cd_seed: str = "best"

    def __post_init__(self):
        if self.cd_seed not in ("best", "link"):
            raise DomainError(f"unknown cd_seed {self.cd_seed!r}")
        if self.max_iters < 1 or self.cd_passes_per_iter < 1:
            raise DomainError("max_iters and cd_passes_per_iter must be positive")
        if not (self.gap_tol > 0 and self.gap_change_tol > 0):
            raise DomainError("tolerances must be positive")


@dataclass
class InnerResult:
    alpha: np.ndarray
    beta: np.ndarray
    gap: float
    iterations: int
    trace: list
    stop_reason: str = ""

    @property
    def converged(self):
        return self.stop_reason == "gap_tol"


def cd_threshold(beta_tilde, hp, col_sq=1.0):
    """Exact minimizer of the one-coordinate l0-l1-l2 least-squares problem.

    ``beta_tilde`` is ``x_j'(y - X beta) + beta_j * col_sq`` and ``col_sq``
    the squared column norm; ``col_sq = 1`` is the unit-norm case.
    """
    denom = col_sq + 2.0 * hp.lambda2
    if denom <= 0:
        return 0.0
    s = (abs(beta_tilde) - hp.lambda1) / denom
    if s > 0 and s >= math.sqrt(2.0 * hp.lambda0 / denom):
        return math.copysign(s, beta_tilde)
    return 0.0


@numba.njit(cache=True, nogil=True)
def _cd_sweep(X, r, beta, col_sq, lam0, lam1, lam2):
    n, p = X.shape
    for j in range(p):
        bt = beta[j] * col_sq[j]
        for i in range(n):
            bt += X[i, j] * r[i]
        denom = col_sq[j] + 2.0 * lam2
        new = 0.0
        if denom > 0.0:
            s = (abs(bt) - lam1) / denom
            if s > 0.0 and s >= math.sqrt(2.0 * lam0 / denom):
                new = s if bt >= 0.0 else -s
        delta = new - beta[j]
        if delta != 0.0:
            for i in range(n):
                r[i] -= X[i, j] * delta
            beta[j] = new


@numba.njit(cache=True, nogil=True)
def _sq_penalty(beta, lam0, lam1, lam2):
    out = 0.0
    for j in range(beta.shape[0]):
        b = beta[j]
        if b != 0.0:
            out += lam1 * abs(b) + lam2 * b * b + lam0
    return out


@numba.njit(cache=True, nogil=True)
def _square_loop(X, y, alpha, beta, col_sq, lam0, lam1, lam2, steps,
                 gap_tol, change_tol, use_cd, seed_best):
    """Whole iteration loop for the least-squares loss.

    Returns best alpha, best beta, iteration count, stop code
    (0 max_iters, 1 gap_tol, 2 gap_change_tol, 3 non-finite) and the
    per-iteration gaps and primal values.
    """
    n, p = X.shape
    max_iters = steps.shape[0]
    two_l2 = 2.0 * lam2
    eta0 = (2.0 * math.sqrt(lam0 * lam2) + lam1) / two_l2
    shift = lam1 / two_l2
    Xb = X @ beta
    beta_prev = beta.copy()
    r = np.empty(n)
    eta_v = np.empty(p)
    gaps = np.empty(max_iters)
    prims = np.empty(max_iters)
    best_gap = np.inf
    best_a = alpha.copy()
    best_b = beta.copy()
    code = 0
    t = 0
    for t in range(1, max_iters + 1):
        w = steps[t - 1]
        for i in range(n):
            alpha[i] += w * (Xb[i] - (alpha[i] + y[i]))
        psi_sum = 0.0
        for j in range(p):
            acc = 0.0
            for i in range(n):
                acc += X[i, j] * alpha[i]
            e = -acc / two_l2
            eta_v[j] = e
            a = abs(e)
            if a >= eta0:
                sh = a - shift
                psi_sum += -lam2 * sh * sh + lam0
                beta[j] = sh if e > 0.0 else (-sh if e < 0.0 else 0.0)
            else:
                beta[j] = 0.0
        if use_cd:
            Xl = X @ beta
            for i in range(n):
                r[i] = y[i] - Xl[i]
            if seed_best:
                obj_link = 0.5 * (r @ r) + _sq_penalty(beta, lam0, lam1, lam2)
                rp = y - Xb
                obj_prev = 0.5 * (rp @ rp) + _sq_penalty(beta_prev, lam0, lam1, lam2)
                if obj_prev < obj_link:
                    beta[:] = beta_prev
                    r[:] = rp
            _cd_sweep(X, r, beta, col_sq, lam0, lam1, lam2)
            for i in range(n):
                Xb[i] = y[i] - r[i]
        else:
            Xb = X @ beta
        fit = 0.0
        conj = 0.0
        for i in range(n):
            d = Xb[i] - y[i]
            fit += 0.5 * d * d
            conj += 0.5 * alpha[i] * alpha[i] + y[i] * alpha[i]
        primal = fit + _sq_penalty(beta, lam0, lam1, lam2)
        gap = primal - (-conj + psi_sum)
        gaps[t - 1] = gap
        prims[t - 1] = primal
        if not math.isfinite(gap):
            code = 3
            break
        if gap < best_gap:
            best_gap = gap
            best_a[:] = alpha
            best_b[:] = beta
        beta_prev[:] = beta
        if gap <= gap_tol:
            code = 1
            break
        if t > 2 and abs(gaps[t - 3] - gap) <= change_tol:
            code = 2
            break
    return best_a, best_b, t, code, gaps[:t], prims[:t]


def _sq_objective(r, beta, hp):
    return 0.5 * r @ r + penalty_value(beta, hp)


def cd_pass(beta, data, hp, passes=1):
    """Cyclic coordinate sweeps in index order (square loss); returns a new vector."""
    beta = np.array(beta, dtype=float)
    r = data.y - data.X @ beta
    col_sq = data.column_norms**2
    for _ in range(passes):
        _cd_sweep(data.X, r, beta, col_sq, hp.lambda0, hp.lambda1, hp.lambda2)
    return beta


def inner_solve(data, hp, loss, config=None, init=None, *, primal_cd=True):
    """Solve the problem restricted to ``data``'s columns from ``init=(alpha0, beta0)``.

    Each iteration takes a projected super-gradient step on the dual, maps it
    to the primal through the link, refines the primal by coordinate descent
    (square loss only) and evaluates the duality gap.  Stops on small gap, on
    ``|gap[t-2] - gap[t]| <= gap_change_tol`` or at ``max_iters``, and returns
    the iterate with the smallest gap.
    """
    config = config or InnerConfig()
    X, y = data.X, data.y
    n, p = X.shape
    loss.check_labels(y)
    if init is None:
        alpha = loss.project_feasible(np.zeros(n), y)
        beta = np.zeros(p)
    else:
        alpha = np.array(init[0], dtype=float)
        beta = np.array(init[1], dtype=float)
    use_cd = primal_cd and loss.kind is LossKind.SQUARE
    if _USE_KERNEL and loss.kind is LossKind.SQUARE and config.cd_passes_per_iter == 1:
        return _square_solve(data, hp, config, alpha, beta, use_cd)
    col_sq = data.column_norms**2
    two_l2 = 2.0 * hp.lambda2
    Xb = X @ beta
    beta_prev = beta

    best = (math.inf, alpha.copy(), beta.copy())
    gaps = []
    trace = []
    reason = "max_iters"
    t = 0
    for t in range(1, config.max_iters + 1):
        g = Xb - loss.conjugate_derivative(alpha, y)
        alpha = loss.project_feasible(alpha + config.step(t) * g, y)
        eta_v = -(X.T @ alpha) / two_l2
        beta_link = primal_from_dual(eta_v, hp)
        if use_cd:
            beta = beta_link
            r = y - X @ beta
            if config.cd_seed == "best":
                r_prev = y - Xb
                if _sq_objective(r_prev, beta_prev, hp) < _sq_objective(r, beta, hp):
                    beta, r = beta_prev.copy(), r_prev
            for _ in range(config.cd_passes_per_iter):
                _cd_sweep(X, r, beta, col_sq, hp.lambda0, hp.lambda1, hp.lambda2)
            Xb = y - r
        else:
            beta = beta_link
            Xb = X @ beta
        primal = float(loss.value(Xb, y).sum() + penalty_value(beta, hp))
        dual = float(-loss.conjugate_value(alpha, y).sum() + psi(eta_v, hp).sum())
        gap = primal - dual
        if not (math.isfinite(gap) and np.all(np.isfinite(alpha))):
            raise NumericalDivergenceError(t)
        gaps.append(gap)
        trace.append((t, gap, primal))
        if gap < best[0]:
            best = (gap, alpha.copy(), beta.copy())
        beta_prev = beta
        if gap <= config.gap_tol:
            reason = "gap_tol"
            break
        if t > 2 and abs(gaps[-3] - gap) <= config.gap_change_tol:
            reason = "gap_change_tol"
            break
    _, alpha, beta = best
    gap = duality_gap(beta, alpha, data, hp, loss)
    return InnerResult(alpha, beta, gap, t, trace, reason)


_USE_KERNEL = True
_STOP_REASONS = ("max_iters", "gap_tol", "gap_change_tol")


def _square_solve(data, hp, config, alpha, beta, use_cd):
    hp._require_dual()
    if isinstance(config.step, FixedStep):
        steps = np.full(config.max_iters, config.step.omega)
    else:
        steps = np.array([config.step(t) for t in range(1, config.max_iters + 1)], dtype=float)
    alpha, beta, t, code, gaps, prims = _square_loop(
        data.X, data.y, alpha, beta, data.column_norms**2,
        hp.lambda0, hp.lambda1, hp.lambda2, steps,
        config.gap_tol, config.gap_change_tol, use_cd, config.cd_seed == "best",
    )
    if code == 3:
        raise NumericalDivergenceError(t)
    trace = list(zip(range(1, t + 1), gaps.tolist(), prims.tolist()))
    gap = duality_gap(beta, alpha, data, hp, LossModel.square())
    return InnerResult(alpha, beta, gap, t, trace, _STOP_REASONS[code])
