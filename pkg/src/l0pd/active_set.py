"""Safe feature screening and incremental working-set growth."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class FeatureSets:
    """Partition of the feature indices.

    ``active`` is the working set handed to the sub-problem solver,
    ``remaining`` the features not yet added, ``screened`` the features
    certified to be outside the optimal support (removed for good).
    """

    active: tuple
    remaining: tuple
    screened: frozenset = frozenset()

    def check_partition(self, p):
        a, r, s = set(self.active), set(self.remaining), set(self.screened)
        if a & r or a & s or r & s or (a | r | s) != set(range(p)):
            raise AssertionError("feature sets are not a partition of range(p)")


def batch_size(c, p):
    """Number of features added per step, ``ceil(c * ln p)`` (at least one)."""
    if not c > 0:
        raise DomainError("c must be positive")
    return max(1, math.ceil(c * math.log(p)))


def _top(scores, candidates, k):
    # stable sort on -score keeps lower indices first among ties
    order = np.argsort(-scores[candidates], kind="stable")
    return candidates[order[:k]]


def init_active_set(data, loss, size):
    """Start from the ``size`` features with largest ``|x_j' l'(0)|``."""
    if not 1 <= size <= data.p:
        raise DomainError(f"size must lie in [1, {data.p}], got {size}")
    scores = np.abs(data.X.T @ loss.derivative(np.zeros(data.n), data.y))
    chosen = _top(scores, np.arange(data.p), size)
    rest = np.setdiff1d(np.arange(data.p), chosen)
    return FeatureSets(tuple(sorted(int(j) for j in chosen)), tuple(int(j) for j in rest))


def add_features(alpha, data, sets, c):
    """Move the ``ceil(c ln p)`` remaining features with largest ``|x_j' alpha|`` into the active set."""
    if not sets.remaining:
        return sets
    remaining = np.asarray(sets.remaining, dtype=np.intp)
    h = batch_size(c, data.p)
    scores = np.zeros(data.p)
    scores[remaining] = np.abs(data.X[:, remaining].T @ alpha)
    chosen = set(int(j) for j in _top(scores, remaining, h))
    return FeatureSets(
        tuple(sorted(set(sets.active) | chosen)),
        tuple(j for j in sets.remaining if j not in chosen),
        sets.screened,
    )


def score_bounds(alpha, radius, data, idx):
    """Upper bound ``|x_j' alpha| + |x_j| r`` on ``|x_j' alpha_opt|`` and the correlations."""
    idx = np.asarray(idx, dtype=np.intp)
    corr = np.abs(data.X[:, idx].T @ alpha)
    with np.errstate(invalid="ignore"):
        return corr + data.column_norms[idx] * radius, corr


def screen(alpha, radius, data, hp, sets):
    """Remove every feature whose dual upper bound falls below ``2 sqrt(l0 l2) + l1``."""
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    candidates = np.asarray(sets.active + sets.remaining, dtype=np.intp)
    if candidates.size == 0:
        return sets
    upper, _ = score_bounds(alpha, radius, data, candidates)
    out = set(int(j) for j in candidates[upper < hp.screen_threshold])
    if not out:
        return sets
    return FeatureSets(
        tuple(j for j in sets.active if j not in out),
        tuple(j for j in sets.remaining if j not in out),
        sets.screened | out,
    )


def adding_exhausted(alpha, radius, data, hp, remaining):
    """True when every remaining feature already satisfies the screening inequality."""
    if len(remaining) == 0:
        return True
    upper, _ = score_bounds(alpha, radius, data, remaining)
    return bool(np.all(upper < hp.screen_threshold))


def certified_active(alpha, radius, data, hp, idx):
    """Features whose lower bound ``|x_j' alpha| - |x_j| r`` exceeds the threshold.

    Diagnostic only; the solver never acts on it.
    """
    idx = np.asarray(idx, dtype=np.intp)
    if idx.size == 0:
        return idx
    upper, corr = score_bounds(alpha, radius, data, idx)
    lower = 2.0 * corr - upper
    return idx[lower > hp.screen_threshold]
