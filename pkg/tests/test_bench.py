import numpy as np
import pytest

from l0pd import DomainError, ExperimentConfig, FixedStep, Hyperparams, InnerConfig, OuterConfig, estimation_error, pssr, run_experiment
from l0pd.bench import CSV_HEADER, MetricRow, format_csv, read_csv, summarize
from l0pd.data import SyntheticSpec, generate_synthetic
from l0pd.duality import dual_from_primal, duality_gap
from l0pd.losses import LossModel

QUICK = OuterConfig(inner=InnerConfig(max_iters=200), max_outer_iters=5)


def quick_config(**kw):
    base = dict(ns=(30,), p=20, replicates=2, support_fraction=0.1, outer=QUICK,
                record_wall_time=False, threads=1)
    base.update(kw)
    return ExperimentConfig(**base)


def row(ok):
    return MetricRow("CD", 10, 5, 20.0, 0, 0.0, 0.0, 1, ok, 0.0, 0.0)


class TestMetrics:
    def test_estimation_error(self):
        b = np.array([1.0, 0.0, -2.0])
        assert estimation_error(b, b) == 0.0
        assert estimation_error(np.zeros(3), b) == 1.0
        assert estimation_error(2 * b, b) == 1.0

    def test_estimation_error_zero_truth(self):
        with pytest.raises(DomainError):
            estimation_error(np.ones(2), np.zeros(2))

    def test_pssr(self):
        assert pssr([row(True)] * 3) == 1.0
        assert pssr([row(False)] * 2) == 0.0
        assert pssr([row(True)] * 3 + [row(False)]) == 0.75
        with pytest.raises(DomainError):
            pssr([])


class TestExperiment:
    def test_row_count_and_order(self):
        cfg = quick_config(ns=(30, 40), solvers=("PrimDual", "DualAst", "CD"))
        rows = run_experiment(cfg)
        assert len(rows) == 2 * 3 * 2
        keys = [(r.n, r.solver, r.replicate) for r in rows]
        assert keys == [(n, s, k) for n in (30, 40) for s in ("PrimDual", "DualAst", "CD") for k in (0, 1)]

    def test_stored_gap_recomputes(self):
        cfg = quick_config(solvers=("PrimDual", "CD"))
        hp = cfg.hp_for(20.0)
        for r in run_experiment(cfg):
            data, _ = generate_synthetic(SyntheticSpec(r.n, cfg.p, cfg.rho, r.snr, cfg.support_fraction,
                                                       seed=cfg.base_seed + r.replicate))
            sq = LossModel.square()
            gap = duality_gap(r.beta, dual_from_primal(r.beta, data, sq), data, hp, sq)
            assert abs(gap - r.gap) <= 1e-8

    def test_csv_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(quick_config(output=str(a), solvers=("PrimDual", "CD")))
        run_experiment(quick_config(output=str(b), solvers=("PrimDual", "CD"), threads=3))
        assert a.read_bytes() == b.read_bytes()

    def test_csv_format(self, tmp_path):
        out = tmp_path / "r.csv"
        rows = run_experiment(quick_config(output=str(out), solvers=("CD",)))
        raw = out.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        parsed = read_csv(out)
        assert len(parsed) == len(rows)
        assert float(parsed[0]["primal_value"]) == float(format(rows[0].primal_value, ".10g"))
        assert parsed[0]["support_recovered"] in ("0", "1")

    def test_diagnostic_columns(self):
        rows = run_experiment(quick_config(solvers=("CD",)))
        text = format_csv(rows, diagnostics=True)
        assert text.splitlines()[0].endswith("support_precision,support_recall")

    def test_failures_become_rows(self):
        # a huge fixed step makes the dual iteration blow up
        bad = OuterConfig(inner=InnerConfig(step=FixedStep(1e6), max_iters=500), max_outer_iters=2)
        rows = run_experiment(quick_config(outer=bad, solvers=("PrimDual", "CD")))
        statuses = {r.solver: r.status for r in rows}
        assert statuses["PrimDual"] == "error:NumericalDivergenceError"
        assert statuses["CD"] == "ok"

    def test_per_snr_hyperparameters(self):
        hp5 = Hyperparams(0.1, 0.2, 1.0)
        cfg = quick_config(snrs=(5.0, 20.0), hp_by_snr={5.0: hp5})
        assert cfg.hp_for(5.0) is hp5
        assert cfg.hp_for(20.0) == Hyperparams(0.03, 0.02, 1.0)

    def test_summarize(self):
        rows = run_experiment(quick_config(solvers=("CD",)))
        (s,) = summarize(rows)
        assert s["solver"] == "CD" and 0.0 <= s["pssr"] <= 1.0

    def test_validation(self):
        with pytest.raises(DomainError):
            ExperimentConfig(solvers=("Nope",))
        with pytest.raises(DomainError):
            ExperimentConfig(replicates=0)

    def test_thread_env(self, monkeypatch):
        from l0pd.bench import _threads

        monkeypatch.setenv("L0PD_THREADS", "3")
        assert _threads(ExperimentConfig()) == 3
        assert _threads(ExperimentConfig(threads=2)) == 2
