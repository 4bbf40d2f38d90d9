"""Per-sample convex losses and their Fenchel conjugates.

Every method is vectorized: ``u``, ``y`` and ``a`` may be scalars or arrays
that broadcast against each other.  Labels follow the margin conventions

* square:   any real ``y``
* logistic: ``y in {0, 1}``, loss ``-y*u + log(1 + exp(u))``
* huber:    ``y in {-1, +1}``, smoothed hinge on the margin ``y*u``
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, xlogy

from .errors import DomainError, FeasibilityError

# distance kept from the logistic conjugate's log singularities
LOGISTIC_BOUNDARY_EPS = 1e-12
_FEAS_TOL = 1e-12


class LossKind(enum.Enum):
    SQUARE = "square"
    LOGISTIC = "logistic"
    HUBER = "huber"


@dataclass(frozen=True)
class LossModel:
    """A convex per-sample loss ``l(u; y)`` with its conjugate ``l*(a; y)``.

    ``huber_gamma`` is the width of the quadratic zone of the Huber loss and
    is ignored for the other kinds.
    """

    kind: LossKind = LossKind.SQUARE
    huber_gamma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LossKind(self.kind))
        if self.kind is LossKind.HUBER and not self.huber_gamma > 0:
            raise DomainError(f"huber_gamma must be positive, got {self.huber_gamma}")

    @classmethod
    def square(cls):
        return cls(LossKind.SQUARE)

    @classmethod
    def logistic(cls):
        return cls(LossKind.LOGISTIC)

    @classmethod
    def huber(cls, gamma=1.0):
        return cls(LossKind.HUBER, float(gamma))

    @classmethod
    def from_name(cls, name, huber_gamma=1.0):
        return cls(LossKind(name.lower()), float(huber_gamma))

    def __str__(self):
        if self.kind is LossKind.HUBER:
            return f"huber(gamma={self.huber_gamma:g})"
        return self.kind.value

    # -- labels ---------------------------------------------------------

    def check_labels(self, y):
        """Raise :class:`DomainError` if ``y`` is not a valid label array."""
        y = np.asarray(y, dtype=float)
        if self.kind is LossKind.LOGISTIC:
            if not np.all((y == 0.0) | (y == 1.0)):
                raise DomainError("logistic loss requires labels in {0, 1}")
        elif self.kind is LossKind.HUBER:
            if not np.all(np.abs(y) == 1.0):
                raise DomainError("huber loss requires labels in {-1, +1}")
        elif not np.all(np.isfinite(y)):
            raise DomainError("responses must be finite")
        return y

    # -- primal ---------------------------------------------------------

    def value(self, u, y):
        """Per-sample loss ``l(u; y)``."""
        u = np.asarray(u, dtype=float)
        y = self.check_labels(y)
        if self.kind is LossKind.SQUARE:
            return 0.5 * (y - u) ** 2
        if self.kind is LossKind.LOGISTIC:
            return np.logaddexp(0.0, u) - y * u
        g = self.huber_gamma
        m = y * u
        return np.where(
            m >= 1.0,
            0.0,
            np.where(m < 1.0 - g, 1.0 - m - 0.5 * g, (1.0 - m) ** 2 / (2.0 * g)),
        )

    def derivative(self, u, y):
        """Derivative of ``l(u; y)`` with respect to ``u``."""
        u = np.asarray(u, dtype=float)
        y = self.check_labels(y)
        if self.kind is LossKind.SQUARE:
            return u - y
        if self.kind is LossKind.LOGISTIC:
            return expit(u) - y
        g = self.huber_gamma
        m = y * u
        dm = np.where(m >= 1.0, 0.0, np.where(m < 1.0 - g, -1.0, -(1.0 - m) / g))
        return y * dm

    # -- dual -----------------------------------------------------------

    def _check_feasible(self, a, y, strict=False):
        if self.kind is LossKind.LOGISTIC:
            q = a + y
            if strict:
                ok = (q > 0.0) & (q < 1.0)
            else:
                ok = (q >= -_FEAS_TOL) & (q <= 1.0 + _FEAS_TOL)
        elif self.kind is LossKind.HUBER:
            m = y * a
            ok = (m >= -1.0 - _FEAS_TOL) & (m <= _FEAS_TOL)
        else:
            ok = np.isfinite(a)
        if not np.all(ok):
            where = "strictly inside" if strict else "inside"
            raise FeasibilityError(f"dual variable not {where} the feasible set of {self}")

    def conjugate_value(self, a, y):
        """Fenchel conjugate ``l*(a; y) = sup_u a*u - l(u; y)`` on the feasible set."""
        a = np.asarray(a, dtype=float)
        y = self.check_labels(y)
        self._check_feasible(a, y)
        if self.kind is LossKind.SQUARE:
            return 0.5 * a * a + y * a
        if self.kind is LossKind.LOGISTIC:
            q = np.clip(a + y, 0.0, 1.0)
            return xlogy(q, q) + xlogy(1.0 - q, 1.0 - q)
        return y * a + 0.5 * self.huber_gamma * a * a

    def conjugate_derivative(self, a, y):
        """Derivative of the conjugate; logistic requires a strictly interior ``a``."""
        a = np.asarray(a, dtype=float)
        y = self.check_labels(y)
        if self.kind is LossKind.SQUARE:
            self._check_feasible(a, y)
            return a + y
        if self.kind is LossKind.LOGISTIC:
            self._check_feasible(a, y, strict=True)
            q = a + y
            return np.log(q) - np.log1p(-q)
        self._check_feasible(a, y)
        return y + self.huber_gamma * a

    def project_feasible(self, a, y):
        """Euclidean projection of ``a`` onto the feasible set."""
        a = np.asarray(a, dtype=float)
        if self.kind is LossKind.SQUARE:
            return a.copy() if a.ndim else a
        y = np.asarray(y, dtype=float)
        # fixed clip bounds keep the projection exactly idempotent
        if self.kind is LossKind.LOGISTIC:
            eps = LOGISTIC_BOUNDARY_EPS
            return np.clip(a, eps - y, (1.0 - eps) - y)
        return np.clip(a, np.minimum(-y, 0.0), np.maximum(-y, 0.0))

    def smoothness_mu(self):
        """Reciprocal of the Lipschitz constant of ``l'``."""
        if self.kind is LossKind.SQUARE:
            return 1.0
        if self.kind is LossKind.LOGISTIC:
            return 4.0
        return self.huber_gamma
