"""Synthetic data, libsvm text I/O and column utilities."""

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .duality import ProblemData
from .errors import BoundsError, DomainError, ParseError


@dataclass(frozen=True)
class SyntheticSpec:
    """Sparse linear model with AR(1)-correlated Gaussian features.

    ``snr`` is ``Var(X beta) / sigma^2`` with the empirical signal variance.
    """

    n: int
    p: int
    rho: float = 0.4
    snr: float = 20.0
    support_fraction: float = 0.03
    coef_range: tuple = (-1.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise DomainError("n and p must be at least 1")
        if not 0 <= self.rho < 1:
            raise DomainError("rho must lie in [0, 1)")
        if not 0 <= self.support_fraction <= 1:
            raise DomainError("support_fraction must lie in [0, 1]")
        if not self.snr > 0:
            raise DomainError("snr must be positive")


def generate_synthetic(spec):
    """Draw ``(ProblemData, beta_true)`` for ``y = X beta + eps``; deterministic in ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    n, p, rho = spec.n, spec.p, spec.rho
    Z = rng.standard_normal((n, p))
    X = np.empty((n, p), order="F")
    X[:, 0] = Z[:, 0]
    # x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j has corr(x_i, x_j) = rho^|i-j|
    tail = math.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + tail * Z[:, j]

    k = int(math.floor(spec.support_fraction * p))
    beta = np.zeros(p)
    pos = rng.choice(p, size=k, replace=False)
    beta[pos] = rng.uniform(spec.coef_range[0], spec.coef_range[1], size=k)

    signal = X @ beta
    sigma = math.sqrt(np.var(signal) / spec.snr) if k else 0.0
    y = signal + sigma * rng.standard_normal(n)
    return ProblemData(X, y, beta), beta


# -- libsvm text format --------------------------------------------------------


def load_libsvm(path, expected_p=None):
    """Read ``label idx:val ...`` lines (1-based increasing indices) into a dense problem.

    Lines starting with ``#`` and blank lines are skipped; anything after a
    ``#`` on a data line is a comment.  A ``<path>.beta`` sidecar, if
    present, is not read here (see :func:`load_beta`).
    """
    labels, rows = [], []
    max_idx = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                label = float(tokens[0])
            except ValueError:
                raise ParseError(lineno, f"bad label {tokens[0]!r}") from None
            entries = []
            last = 0
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                try:
                    if not sep:
                        raise ValueError
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise ParseError(lineno, f"bad feature token {tok!r}") from None
                if idx <= last:
                    raise ParseError(lineno, f"indices must be 1-based and increasing, got {idx}")
                if not math.isfinite(val):
                    raise ParseError(lineno, f"non-finite value in {tok!r}")
                if expected_p is not None and idx > expected_p:
                    raise BoundsError(f"line {lineno}: index {idx} exceeds expected p={expected_p}")
                entries.append((idx - 1, val))
                last = idx
            max_idx = max(max_idx, last)
            labels.append(label)
            rows.append(entries)
    p = expected_p if expected_p is not None else max_idx
    X = np.zeros((len(rows), p))
    for i, entries in enumerate(rows):
        for j, v in entries:
            X[i, j] = v
    return ProblemData(X, np.asarray(labels, dtype=float))


def _fmt(v):
    return format(float(v), ".17g")


def write_libsvm(path, data, beta_true=None, header=None):
    """Write ``data`` in libsvm format; ``beta_true`` goes to ``<path>.beta``, one value per line."""
    path = Path(path)
    lines = []
    if header:
        lines.append("# " + " ".join(f"{k}={v}" for k, v in header.items()))
    for i in range(data.n):
        row = data.X[i]
        feats = " ".join(f"{j + 1}:{_fmt(row[j])}" for j in np.flatnonzero(row))
        lines.append(f"{_fmt(data.y[i])} {feats}".rstrip())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    if beta_true is not None:
        beta_path(path).write_text(
            "".join(_fmt(b) + "\n" for b in beta_true), encoding="utf-8", newline="\n"
        )


def beta_path(path):
    return Path(str(path) + ".beta")


def load_beta(path):
    """Read a one-coefficient-per-line vector."""
    vals = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise ParseError(lineno, f"bad coefficient {line!r}") from None
    return np.asarray(vals)


# -- column utilities ------------------------------------------------------------


def subsample(data, n_rows, p_cols, seed):
    """Uniform row and column subsets without replacement, kept in original order."""
    if not (1 <= n_rows <= data.n and 1 <= p_cols <= data.p):
        raise BoundsError(f"cannot take {n_rows}x{p_cols} from a {data.n}x{data.p} problem")
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(data.n, size=n_rows, replace=False))
    cols = np.sort(rng.choice(data.p, size=p_cols, replace=False))
    bt = None if data.beta_true is None else data.beta_true[cols]
    return ProblemData(data.X[np.ix_(rows, cols)], data.y[rows], bt)


def normalize_columns(data):
    """Scale columns to unit l2 norm; returns ``(data, scales)``.

    Coefficients map back as ``beta_original = beta_scaled / scales``.
    All-zero columns keep scale 1.
    """
    scales = np.array(data.column_norms, dtype=float)
    zero = scales == 0
    if np.any(zero):
        warnings.warn(f"{int(zero.sum())} all-zero column(s) left unscaled", stacklevel=2)
        scales[zero] = 1.0
    bt = None if data.beta_true is None else data.beta_true * scales
    return ProblemData(data.X / scales, data.y, bt), scales
