"""Command-line front end: ``l0pd {generate,solve,bench,oracle}``.

Settings come from an optional ``--config`` file of ``key=value`` lines and
from flags; flags win.  Exit codes: 0 success, 1 usage or input problems,
2 numerical failure.
"""

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from .baselines import CDConfig, cd_solve, dual_ascent_solve, oracle_solve
from .bench import SOLVERS, ExperimentConfig, run_experiment, summarize
from .data import SyntheticSpec, beta_path, generate_synthetic, load_beta, load_libsvm, write_libsvm
from .duality import Hyperparams, dual_from_primal, duality_gap, primal_objective
from .errors import L0PDError, NumericalDivergenceError
from .inner import FixedStep, InnerConfig
from .losses import LossModel
from .outer import OuterConfig, solve

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _flag(text):
    v = str(text).lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _int_list(text):
    return tuple(int(v) for v in str(text).replace(",", " ").split())


def _float_list(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _str_list(text):
    return tuple(v for v in str(text).replace(",", " ").split())


# key -> (type, default); shared by the config file and the flags
SETTINGS = {
    "lambda0": (float, 0.1),
    "lambda1": (float, 0.0),
    "lambda2": (float, 1.0),
    "loss": (str, "square"),
    "huber_gamma": (float, 1.0),
    "omega": (float, 5e-4),
    "eps": (float, 1e-6),
    "zeta": (float, 1e-6),
    "c": (float, 4.0),
    "max_inner_iters": (int, 10_000),
    "max_outer_iters": (int, 200),
    "normalize": (_flag, False),
    "wall_time": (_flag, True),
    "seed": (int, 0),
    "input": (str, None),
    "output": (str, None),
    "trace": (str, None),
    "beta": (str, None),
    "solver": (str, "PrimDual"),
    "n": (int, 100),
    "p": (int, 300),
    "rho": (float, 0.4),
    "snr": (float, 20.0),
    "support_fraction": (float, 0.03),
    "ns": (_int_list, (100, 150, 200, 300)),
    "snrs": (_float_list, (20.0,)),
    "solvers": (_str_list, ("PrimDual",)),
    "replicates": (int, 10),
    "threads": (int, None),
}

COMMAND_KEYS = {
    "generate": ("n", "p", "rho", "snr", "support_fraction", "seed", "output"),
    "solve": ("lambda0", "lambda1", "lambda2", "loss", "huber_gamma", "omega", "eps", "zeta",
              "c", "max_inner_iters", "max_outer_iters", "normalize", "input", "output",
              "trace", "solver"),
    "bench": ("lambda0", "lambda1", "lambda2", "omega", "eps", "zeta", "c", "max_inner_iters",
              "max_outer_iters", "normalize", "seed", "output", "ns", "p", "rho", "snrs",
              "support_fraction", "solvers", "replicates", "threads", "wall_time"),
    "oracle": ("lambda0", "lambda1", "lambda2", "input", "beta"),
}


def read_config(path):
    """Parse a ``key=value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}: line {lineno}: expected key=value")
        if key not in SETTINGS:
            raise UsageError(f"{path}: line {lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def build_parser():
    parser = _Parser(prog="l0pd", description="l0-l1-l2 regularized learning by primal-dual ascent")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys in COMMAND_KEYS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value settings file; flags override it")
        for key in keys:
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"default: {SETTINGS[key][1]}")
    return parser


def resolve(command, args):
    """Merge defaults, config file and flags for one subcommand."""
    raw = read_config(args.config) if args.config else {}
    for key in COMMAND_KEYS[command]:
        flag = getattr(args, key)
        if flag is not None:
            raw[key] = flag
    settings = {}
    for key in COMMAND_KEYS[command]:
        conv, default = SETTINGS[key]
        if key in raw:
            try:
                settings[key] = conv(raw[key])
            except ValueError:
                raise UsageError(f"invalid value for {key}: {raw[key]!r}") from None
        else:
            settings[key] = default
    return settings


def _require(settings, key):
    if settings.get(key) is None:
        raise UsageError(f"--{key} is required")
    return settings[key]


def _loss(settings):
    try:
        return LossModel.from_name(settings["loss"], settings.get("huber_gamma", 1.0))
    except ValueError:
        raise UsageError(f"unknown loss {settings['loss']!r}") from None


def _hp(s):
    return Hyperparams(s["lambda0"], s["lambda1"], s["lambda2"])


def _outer_config(s):
    inner = InnerConfig(step=FixedStep(s["omega"]), max_iters=s["max_inner_iters"],
                        gap_tol=s["eps"], gap_change_tol=s["zeta"])
    return OuterConfig(global_gap_tol=s["eps"], inner=inner, add_c=s["c"],
                       max_outer_iters=s["max_outer_iters"], normalize_columns=s["normalize"])


def cmd_generate(s, out):
    spec = SyntheticSpec(s["n"], s["p"], s["rho"], s["snr"], s["support_fraction"], seed=s["seed"])
    path = _require(s, "output")
    data, beta = generate_synthetic(spec)
    header = {"seed": spec.seed, "n": spec.n, "p": spec.p, "rho": spec.rho, "snr": spec.snr,
              "support_fraction": spec.support_fraction}
    write_libsvm(path, data, beta, header)
    print(f"wrote {path} and {beta_path(path)} (n={spec.n}, p={spec.p}, nnz={np.count_nonzero(beta)})",
          file=out)


def _write_vector(path, values, name):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", name])
        for j, v in enumerate(values):
            w.writerow([j, format(float(v), ".17g")])


def _write_trace(path, rows, columns):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


def cmd_solve(s, out):
    data = load_libsvm(_require(s, "input"))
    hp, loss = _hp(s), _loss(s)
    cfg = _outer_config(s)
    solver = s["solver"]
    if solver not in SOLVERS:
        raise UsageError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
    if solver == "PrimDual":
        rep = solve(data, hp, loss, cfg)
        beta, gap, wall = rep.beta, rep.gap, rep.wall_time
        trace_cols = ("step", "n_active", "n_screened", "gap", "primal", "dual", "radius", "inner_iters")
        trace = [(t.step, t.n_active, t.n_screened, t.gap, t.primal, t.dual, t.radius, t.inner_iters)
                 for t in rep.trace]
        primal = rep.primal_value
    elif solver == "DualAst":
        start = time.perf_counter()
        res = dual_ascent_solve(data, hp, loss, cfg.inner)
        beta, gap, wall = res.beta, res.gap, time.perf_counter() - start
        trace_cols, trace = ("iteration", "gap", "primal"), res.trace
        primal = primal_objective(beta, data, hp, loss)
    else:
        if loss.kind.value != "square":
            raise UsageError("the CD solver supports the square loss only")
        res = cd_solve(data, hp, CDConfig())
        beta, wall = res.beta, res.wall_time
        gap = duality_gap(beta, dual_from_primal(beta, data, loss), data, hp, loss)
        trace_cols, trace = ("sweep", "primal"), list(enumerate(res.trace, 1))
        primal = res.primal_value
    print(f"solver     {solver}", file=out)
    print(f"objective  {primal:.10g}", file=out)
    print(f"gap        {gap:.6g}", file=out)
    print(f"nnz        {np.count_nonzero(beta)}", file=out)
    print(f"time_s     {wall:.4g}", file=out)
    if s["output"]:
        _write_vector(s["output"], beta, "beta")
    if s["trace"]:
        _write_trace(s["trace"], trace, trace_cols)


def cmd_bench(s, out):
    hp = _hp(s)
    unknown = set(s["solvers"]) - set(SOLVERS)
    if unknown:
        raise UsageError(f"unknown solvers {sorted(unknown)}")
    cfg = ExperimentConfig(
        ns=s["ns"], p=s["p"], rho=s["rho"], snrs=s["snrs"], default_hp=hp,
        solvers=s["solvers"], replicates=s["replicates"], base_seed=s["seed"],
        support_fraction=s["support_fraction"], outer=_outer_config(s), output=s["output"],
        threads=s["threads"], record_wall_time=s["wall_time"],
    )
    rows = run_experiment(cfg)
    for g in summarize(rows):
        print(f"{g['solver']:9s} n={g['n']:<5d} snr={g['snr']:<5g} pssr={g['pssr']:.2f} "
              f"est_error={g['est_error']:.4f} median_time_s={g['wall_time_s']:.3g} "
              f"median_gap={g['gap']:.3g}", file=out)
    if s["output"]:
        print(f"wrote {s['output']} ({len(rows)} rows)", file=out)


def cmd_oracle(s, out):
    data = load_libsvm(_require(s, "input"))
    hp = _hp(s)
    res = oracle_solve(data, hp)
    print(f"objective  {res.objective:.10g}", file=out)
    print(f"support    {' '.join(map(str, res.support)) or '(empty)'}", file=out)
    print(f"supports   {res.supports_evaluated}", file=out)
    if s["beta"]:
        beta = load_beta(s["beta"])
        if beta.shape[0] != data.p:
            raise UsageError(f"{s['beta']} has {beta.shape[0]} coefficients, expected {data.p}")
        other = primal_objective(beta, data, hp, LossModel.square())
        same = set(np.flatnonzero(beta).tolist()) == set(res.support)
        print(f"given_objective  {other:.10g}", file=out)
        print(f"excess           {other - res.objective:.6g}", file=out)
        print(f"same_support     {'yes' if same else 'no'}", file=out)


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "bench": cmd_bench, "oracle": cmd_oracle}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        settings = resolve(args.command, args)
        COMMANDS[args.command](settings, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except NumericalDivergenceError as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    except OSError as exc:
        where = f" {exc.filename}" if getattr(exc, "filename", None) else ""
        print(f"io error:{where} {exc.strerror or exc}", file=err)
        return EXIT_USAGE
    except L0PDError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    return EXIT_OK


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
