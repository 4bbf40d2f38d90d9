"""A small benchmark: primal-dual with screening, plain dual ascent, and CD.

Runs the synthetic protocol at a desk-friendly size and prints per-setting
summaries; the full rows go to a CSV in the temp directory.
"""
import os
import tempfile

from l0pd import ExperimentConfig, Hyperparams, InnerConfig, OuterConfig, run_experiment
from l0pd.bench import summarize

out = os.path.join(tempfile.gettempdir(), "compare_solvers.csv")

cfg = ExperimentConfig(
    ns=(100, 200),
    p=300,
    snrs=(20.0,),
    default_hp=Hyperparams(0.03, 0.02, 1.0),
    solvers=("PrimDual", "DualAst", "CD"),
    replicates=3,
    outer=OuterConfig(inner=InnerConfig(max_iters=2_000), max_total_inner_iters=10_000),
    output=out,
)
rows = run_experiment(cfg)

print(f"{'solver':9s} {'n':>4s} {'pssr':>5s} {'est_err':>8s} {'time_s':>7s} {'gap':>9s}")
for s in summarize(rows):
    print(f"{s['solver']:9s} {s['n']:4d} {s['pssr']:5.2f} {s['est_error']:8.3f} {s['wall_time_s']:7.3f} {s['gap']:9.3g}")
print("rows written to", out)
