"""Primal-dual solver with gap-safe screening and an incremental working set."""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import active_set as fs
from .data import normalize_columns
from .duality import (
    ball_radius,
    dual_from_primal,
    dual_objective,
    primal_objective,
)
from .errors import DomainError
from .inner import InnerConfig, inner_solve


@dataclass(frozen=True)
class OuterConfig:
    global_gap_tol: float = 1e-6
    inner: InnerConfig = field(default_factory=InnerConfig)
    add_c: float = 4.0
    init_size: int = None  # None: one adding batch, ceil(add_c * ln p)
    max_outer_iters: int = 200
    normalize_columns: bool = False
    stop_on_stall: bool = True
    # a stalled step must beat the best gap so far by this fraction to continue
    stall_rel_tol: float = 1e-3
    # cap on inner iterations summed over all outer steps; None for no cap
    max_total_inner_iters: int = None

    def __post_init__(self):
        if not self.global_gap_tol > 0:
            raise DomainError("global_gap_tol must be positive")
        if self.max_outer_iters < 1:
            raise DomainError("max_outer_iters must be positive")
        if self.max_total_inner_iters is not None and self.max_total_inner_iters < 1:
            raise DomainError("max_total_inner_iters must be positive")


@dataclass(frozen=True)
class OuterStep:
    step: int
    n_active: int
    n_screened: int
    gap: float
    primal: float
    dual: float
    radius: float
    n_certified: int
    inner_iters: int
    screened: frozenset


@dataclass
class SolveReport:
    beta: np.ndarray
    alpha: np.ndarray
    primal_value: float
    gap: float
    support: tuple
    outer_iters: int
    inner_iters_total: int
    wall_time: float
    trace: list
    converged: bool
    screened: frozenset = frozenset()
    scales: np.ndarray = None

    @property
    def nnz(self):
        return len(self.support)


def _best_dual(beta, alpha_sub, data, hp, loss):
    """Pick the better of the sub-problem dual and the dual mapped from ``beta``."""
    alpha_map = dual_from_primal(beta, data, loss)
    d_sub = dual_objective(alpha_sub, data, hp, loss)
    d_map = dual_objective(alpha_map, data, hp, loss)
    return (alpha_map, d_map) if d_map > d_sub else (alpha_sub, d_sub)


def solve(data, hp, loss, config=None):
    """Minimize ``P`` over all features, growing the working set from a small start.

    Each outer step solves the sub-problem on the active features, evaluates
    the duality gap of the full problem, stops once it drops below
    ``global_gap_tol``, then screens features with the gap ball and adds the
    best-correlated remaining ones.
    """
    config = config or OuterConfig()
    start = time.perf_counter()
    scales = None
    if config.normalize_columns:
        data, scales = normalize_columns(data)
    loss.check_labels(data.y)
    p, mu = data.p, loss.smoothness_mu()

    size = config.init_size or fs.batch_size(config.add_c, p)
    sets = fs.init_active_set(data, loss, min(size, p))
    beta = np.zeros(p)
    alpha = loss.project_feasible(np.zeros(data.n), data.y)
    primal = primal_objective(beta, data, hp, loss)
    do_add = True

    best = None
    trace = []
    inner_total = 0
    converged = False
    for s in range(config.max_outer_iters):
        act = np.asarray(sets.active, dtype=np.intp)
        inner_cfg = config.inner
        if config.max_total_inner_iters is not None:
            left = config.max_total_inner_iters - inner_total
            if left <= 0:
                break
            inner_cfg = replace(inner_cfg, max_iters=min(inner_cfg.max_iters, left))
        res = inner_solve(data.columns(act), hp, loss, inner_cfg, (alpha, beta[act]))
        inner_total += res.iterations
        cand = np.zeros(p)
        cand[act] = res.beta
        cand_primal = primal_objective(cand, data, hp, loss)
        # the gap is valid for any primal point: never trade a lower objective away
        if cand_primal <= primal:
            beta, primal = cand, cand_primal
        alpha, dual = _best_dual(beta, res.alpha, data, hp, loss)
        gap = primal - dual
        r = ball_radius(gap, mu)
        prev_best = math.inf if best is None else best[0]
        if best is None or gap < best[0]:
            best = (gap, beta.copy(), alpha.copy())
        certified = fs.certified_active(alpha, r, data, hp, sets.active)
        trace.append(
            OuterStep(s, len(sets.active), len(sets.screened), gap, primal, dual, r,
                      len(certified), res.iterations, sets.screened)
        )
        if gap < config.global_gap_tol:
            converged = True
            break
        before = sets
        sets = fs.screen(alpha, r, data, hp, sets)
        if do_add:
            if fs.adding_exhausted(alpha, r, data, hp, sets.remaining):
                do_add = False
            else:
                sets = fs.add_features(alpha, data, sets, config.add_c)
        trace[-1] = replace(trace[-1], n_screened=len(sets.screened), screened=sets.screened)
        # nothing left to add or screen and the best gap has stopped improving
        if (
            config.stop_on_stall
            and not do_add
            and sets == before
            and gap > prev_best - max(config.inner.gap_change_tol, config.stall_rel_tol * prev_best)
        ):
            break

    gap, beta, alpha = best
    return SolveReport(
        beta=beta if scales is None else beta / scales,
        alpha=alpha,
        primal_value=primal_objective(beta, data, hp, loss),
        gap=gap,
        support=tuple(int(j) for j in np.flatnonzero(beta)),
        outer_iters=len(trace),
        inner_iters_total=inner_total,
        wall_time=time.perf_counter() - start,
        trace=trace,
        converged=converged,
        screened=sets.screened,
        scales=scales,
    )
