"""Closed-form quantities of the l0-l1-l2 primal-dual pair.

The primal problem is::

    P(beta) = sum_i l(x_i' beta, y_i) + lam1 |beta|_1 + lam2 |beta|_2^2 + lam0 |beta|_0

and its dual, for ``alpha`` in the feasible set of the loss conjugate::

    D(alpha) = -sum_i l*(alpha_i) + sum_j psi(eta_j(alpha)),
    eta(alpha) = -X' alpha / (2 lam2).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .losses import LossKind, LossModel


@dataclass(frozen=True)
class Hyperparams:
    """Regularization weights ``lambda0`` (l0), ``lambda1`` (l1), ``lambda2`` (l2).

    ``lambda2 = 0`` is accepted so that purely primal routines (oracle, CD)
    can run unregularized; every dual quantity requires ``lambda2 > 0``.
    """

    lambda0: float
    lambda1: float = 0.0
    lambda2: float = 1.0

    def __post_init__(self):
        for name in ("lambda0", "lambda1", "lambda2"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be a finite nonnegative number, got {v}")
            object.__setattr__(self, name, v)

    def _require_dual(self):
        if self.lambda2 <= 0:
            raise DomainError("dual quantities need lambda2 > 0")

    @property
    def eta0(self):
        """Activity threshold ``(2 sqrt(lam0 lam2) + lam1) / (2 lam2)``."""
        self._require_dual()
        return (2.0 * math.sqrt(self.lambda0 * self.lambda2) + self.lambda1) / (2.0 * self.lambda2)

    @property
    def screen_threshold(self):
        """``2 lam2 eta0``, the bound a feature score must reach to be active."""
        return 2.0 * math.sqrt(self.lambda0 * self.lambda2) + self.lambda1


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProblemData:
    """Dense design ``X`` (n samples x p features), response ``y``.

    Arrays are copied and frozen on construction.  ``beta_true`` optionally
    carries ground-truth coefficients of synthetic data.
    """

    X: np.ndarray
    y: np.ndarray
    beta_true: np.ndarray = None
    column_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise ShapeError(f"X must be 2-D, got shape {X.shape}")
        X = _readonly(np.asfortranarray(X))
        y = _readonly(np.ravel(self.y))
        if y.shape[0] != X.shape[0]:
            raise ShapeError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DomainError("X and y must not contain NaN or Inf")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.beta_true is not None:
            bt = _readonly(np.ravel(self.beta_true))
            if bt.shape[0] != X.shape[1]:
                raise ShapeError("beta_true length does not match the number of columns")
            object.__setattr__(self, "beta_true", bt)
        object.__setattr__(self, "column_norms", _readonly(np.linalg.norm(X, axis=0)))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def columns(self, idx):
        """Sub-problem restricted to the given feature indices."""
        idx = np.asarray(idx, dtype=np.intp)
        bt = None if self.beta_true is None else self.beta_true[idx]
        return ProblemData(self.X[:, idx], self.y, bt)


def _check_len(v, size, what):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != size:
        raise ShapeError(f"{what} must have length {size}, got shape {v.shape}")
    return v


# -- link functions ------------------------------------------------------


def eta(alpha, data, hp):
    """``-X' alpha / (2 lambda2)``."""
    hp._require_dual()
    alpha = _check_len(alpha, data.n, "alpha")
    return -(data.X.T @ alpha) / (2.0 * hp.lambda2)


def primal_from_dual(eta_values, hp):
    """Primal-dual link: soft-shrink ``eta`` when ``|eta| >= eta0``, else zero.

    The tie ``|eta| == eta0`` resolves to the nonzero branch.
    """
    e = np.asarray(eta_values, dtype=float)
    a = np.abs(e)
    return np.where(a >= hp.eta0, np.sign(e) * (a - hp.lambda1 / (2.0 * hp.lambda2)), 0.0)


def psi(eta_values, hp):
    """Per-feature dual term: ``-lam2 (|eta| - lam1/(2 lam2))^2 + lam0`` above ``eta0``, else 0."""
    e = np.abs(np.asarray(eta_values, dtype=float))
    shrunk = e - hp.lambda1 / (2.0 * hp.lambda2)
    return np.where(e >= hp.eta0, -hp.lambda2 * shrunk * shrunk + hp.lambda0, 0.0)


# -- objectives ------------------------------------------------------------


def penalty_value(beta, hp):
    beta = np.asarray(beta, dtype=float)
    return (
        hp.lambda1 * np.abs(beta).sum()
        + hp.lambda2 * beta @ beta
        + hp.lambda0 * np.count_nonzero(beta)
    )


def primal_objective(beta, data, hp, loss):
    """``P(beta)``; the l0 term counts exact nonzeros."""
    beta = _check_len(beta, data.p, "beta")
    return float(loss.value(data.X @ beta, data.y).sum() + penalty_value(beta, hp))


def _dual_from_eta(alpha, eta_values, y, hp, loss):
    return float(-loss.conjugate_value(alpha, y).sum() + psi(eta_values, hp).sum())


def dual_objective(alpha, data, hp, loss):
    """``D(alpha)``; raises :class:`FeasibilityError` outside the feasible set."""
    alpha = _check_len(alpha, data.n, "alpha")
    return _dual_from_eta(alpha, eta(alpha, data, hp), data.y, hp, loss)


def square_dual_objective(alpha, data, hp):
    """Least-squares dual written out: ``-a'a/2 - y'a + sum psi``."""
    alpha = _check_len(alpha, data.n, "alpha")
    return float(-0.5 * alpha @ alpha - data.y @ alpha + psi(eta(alpha, data, hp), hp).sum())


def duality_gap(beta, alpha, data, hp, loss):
    """``P(beta) - D(alpha)``."""
    return primal_objective(beta, data, hp, loss) - dual_objective(alpha, data, hp, loss)


def linked_gap(alpha, data, hp, loss):
    """Gap at ``(beta(alpha), alpha)`` through ``sum_i (l + l*) - alpha' X beta``.

    Independent evaluation path for :func:`duality_gap` when the primal point
    is produced by the link from ``alpha``.
    """
    alpha = _check_len(alpha, data.n, "alpha")
    beta = primal_from_dual(eta(alpha, data, hp), hp)
    u = data.X @ beta
    return float((loss.value(u, data.y) + loss.conjugate_value(alpha, data.y)).sum() - alpha @ u)


def super_gradient(beta, alpha, data, loss):
    """``X beta - l*'(alpha)``, an element of the dual super-differential when ``beta = beta(alpha)``."""
    beta = _check_len(beta, data.p, "beta")
    alpha = _check_len(alpha, data.n, "alpha")
    return data.X @ beta - loss.conjugate_derivative(alpha, data.y)


def dual_from_primal(beta, data, loss):
    """Dual point ``l'(X beta)`` projected onto the feasible set."""
    beta = _check_len(beta, data.p, "beta")
    return loss.project_feasible(loss.derivative(data.X @ beta, data.y), data.y)


def ball_radius(gap, gamma):
    """Radius ``sqrt(2 gap / gamma)`` of the ball known to contain the dual optimum."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return math.sqrt(2.0 * max(float(gap), 0.0) / gamma)


def is_square(loss):
    return loss.kind is LossKind.SQUARE


__all__ = [
    "Hyperparams",
    "ProblemData",
    "LossModel",
    "eta",
    "primal_from_dual",
    "psi",
    "penalty_value",
    "primal_objective",
    "dual_objective",
    "square_dual_objective",
    "duality_gap",
    "linked_gap",
    "super_gradient",
    "dual_from_primal",
    "ball_radius",
]
