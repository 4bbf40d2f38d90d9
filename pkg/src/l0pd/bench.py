"""Replicated synthetic experiments, recovery metrics and CSV output."""

import csv
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import CDConfig, cd_solve, dual_ascent_solve
from .data import SyntheticSpec, generate_synthetic
from .duality import Hyperparams, dual_from_primal, duality_gap, primal_objective
from .errors import DomainError, L0PDError
from .losses import LossModel
from .outer import OuterConfig, solve

SOLVERS = ("PrimDual", "DualAst", "CD")
CSV_HEADER = (
    "solver", "n", "p", "snr", "replicate", "wall_time_s", "gap", "nnz",
    "support_recovered", "est_error", "primal_value", "status",
)
DIAGNOSTIC_COLUMNS = ("support_precision", "support_recall")


def estimation_error(beta, beta_true):
    """``||beta - beta_true|| / ||beta_true||``."""
    beta_true = np.asarray(beta_true, dtype=float)
    denom = np.linalg.norm(beta_true)
    if denom == 0:
        raise DomainError("estimation error is undefined for a zero true coefficient vector")
    return float(np.linalg.norm(np.asarray(beta, dtype=float) - beta_true) / denom)


def support_of(beta):
    return frozenset(int(j) for j in np.flatnonzero(beta))


@dataclass
class MetricRow:
    solver: str
    n: int
    p: int
    snr: float
    replicate: int
    wall_time_s: float
    gap: float
    nnz: int
    support_recovered: bool
    est_error: float
    primal_value: float
    status: str = "ok"
    support_precision: float = float("nan")
    support_recall: float = float("nan")
    beta: np.ndarray = field(default=None, repr=False)


def pssr(rows):
    """Fraction of replicates whose estimated support equals the true one."""
    rows = list(rows)
    if not rows:
        raise DomainError("pssr needs at least one row")
    return sum(bool(r.support_recovered) for r in rows) / len(rows)


@dataclass(frozen=True)
class ExperimentConfig:
    ns: tuple = (100, 150, 200, 300)
    p: int = 300
    rho: float = 0.4
    snrs: tuple = (20.0,)
    # per-snr hyperparameters; snrs missing from the map use ``default_hp``
    hp_by_snr: dict = field(default_factory=dict)
    default_hp: Hyperparams = Hyperparams(0.03, 0.02, 1.0)
    solvers: tuple = ("PrimDual",)
    replicates: int = 50
    base_seed: int = 0
    support_fraction: float = 0.03
    loss: LossModel = LossModel.square()
    outer: OuterConfig = field(default_factory=OuterConfig)
    cd: CDConfig = field(default_factory=CDConfig)
    output: str = None
    record_wall_time: bool = True
    diagnostics: bool = False
    threads: int = None

    def __post_init__(self):
        if self.replicates < 1:
            raise DomainError("replicates must be at least 1")
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown:
            raise DomainError(f"unknown solvers {sorted(unknown)}; choose from {SOLVERS}")

    def hp_for(self, snr):
        return self.hp_by_snr.get(snr, self.default_hp)


def run_solver(name, data, hp, loss, config):
    """Run one solver; returns ``(beta, own_gap, wall_time, status)``."""
    start = time.perf_counter()
    if name == "PrimDual":
        rep = solve(data, hp, loss, config.outer)
        beta, gap, status = rep.beta, rep.gap, "ok" if rep.converged else "not_converged"
    elif name == "DualAst":
        res = dual_ascent_solve(data, hp, loss, config.outer.inner)
        beta, gap, status = res.beta, res.gap, "ok" if res.converged else "not_converged"
    else:
        res = cd_solve(data, hp, config.cd)
        beta, gap, status = res.beta, res.gap, "ok"
    return beta, gap, time.perf_counter() - start, status


def _replicate(config, n, snr, rep):
    spec = SyntheticSpec(n, config.p, config.rho, snr, config.support_fraction, seed=config.base_seed + rep)
    data, beta_true = generate_synthetic(spec)
    hp = config.hp_for(snr)
    truth = support_of(beta_true)
    rows = []
    for name in config.solvers:
        try:
            beta, _, wall, status = run_solver(name, data, hp, config.loss, config)
        except L0PDError as exc:
            rows.append(MetricRow(name, n, config.p, snr, rep, float("nan"), float("nan"), 0,
                                  False, float("nan"), float("nan"), f"error:{type(exc).__name__}"))
            continue
        est = support_of(beta)
        # one gap definition for every solver: mapped dual point of the returned beta
        gap = duality_gap(beta, dual_from_primal(beta, data, config.loss), data, hp, config.loss)
        hits = len(est & truth)
        rows.append(MetricRow(
            solver=name, n=n, p=config.p, snr=snr, replicate=rep,
            wall_time_s=wall if config.record_wall_time else 0.0,
            gap=gap, nnz=len(est), support_recovered=est == truth,
            est_error=estimation_error(beta, beta_true) if truth else float("nan"),
            primal_value=primal_objective(beta, data, hp, config.loss), status=status,
            support_precision=hits / len(est) if est else float("nan"),
            support_recall=hits / len(truth) if truth else float("nan"),
            beta=beta,
        ))
    return rows


def _threads(config):
    if config.threads:
        return config.threads
    env = os.environ.get("L0PD_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(config):
    """Run every (n, snr) setting x solver x replicate; rows come back in a fixed order.

    Writes the CSV to ``config.output`` when set.
    """
    jobs = [(n, snr, rep) for n in config.ns for snr in config.snrs for rep in range(config.replicates)]
    workers = _threads(config)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: _replicate(config, *j), jobs))
    else:
        results = [_replicate(config, *j) for j in jobs]
    order = {name: i for i, name in enumerate(config.solvers)}
    rows = [row for chunk in results for row in chunk]
    rows.sort(key=lambda r: (config.ns.index(r.n), config.snrs.index(r.snr), order[r.solver], r.replicate))
    if config.output:
        write_csv(rows, config.output, diagnostics=config.diagnostics)
    return rows


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    return str(v)


def format_csv(rows, diagnostics=False):
    cols = CSV_HEADER + (DIAGNOSTIC_COLUMNS if diagnostics else ())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_fmt(getattr(r, c)) for c in cols])
    return buf.getvalue()


def write_csv(rows, path, diagnostics=False):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(rows, diagnostics))


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def summarize(rows):
    """Per (solver, n, snr): PSSR, mean estimation error, median wall time, median gap."""
    groups = {}
    for r in rows:
        groups.setdefault((r.solver, r.n, r.snr), []).append(r)
    out = []
    for (solver, n, snr), grp in groups.items():
        errs = [r.est_error for r in grp if np.isfinite(r.est_error)]
        out.append({
            "solver": solver, "n": n, "snr": snr, "pssr": pssr(grp),
            "est_error": float(np.mean(errs)) if errs else float("nan"),
            "wall_time_s": float(np.median([r.wall_time_s for r in grp])),
            "gap": float(np.median([r.gap for r in grp])),
        })
    return out


__all__ = [
    "ExperimentConfig", "MetricRow", "estimation_error", "pssr", "run_experiment",
    "format_csv", "write_csv", "read_csv", "summarize",
]
