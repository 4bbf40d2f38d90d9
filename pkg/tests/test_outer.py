import numpy as np
import pytest

from l0pd import (
    DomainError,
    FixedStep,
    Hyperparams,
    InnerConfig,
    LossModel,
    OuterConfig,
    ProblemData,
    SyntheticSpec,
    generate_synthetic,
    lipschitz_step,
    oracle_solve,
    solve,
)
from l0pd.active_set import screen, FeatureSets
from l0pd.duality import dual_from_primal, dual_objective, duality_gap, primal_objective

SQ = LossModel.square()
WORKED = ProblemData([[1.0], [1.0]], [1.0, 1.0])
WORKED_HP = Hyperparams(0.01, 0.0, 0.5)


def small(seed, n=20, p=10):
    return generate_synthetic(SyntheticSpec(n, p, 0.4, 20.0, 0.3, seed=seed))[0]


def fast_config(data, hp, **kw):
    return OuterConfig(inner=InnerConfig(step=lipschitz_step(data, hp, SQ)), **kw)


class TestSolve:
    def test_worked_instance(self):
        cfg = OuterConfig(global_gap_tol=1e-8, init_size=1,
                          inner=InnerConfig(step=FixedStep(0.5), gap_tol=1e-9, gap_change_tol=1e-14))
        rep = solve(WORKED, WORKED_HP, SQ, cfg)
        assert rep.converged and rep.gap <= 1e-8
        assert rep.support == (0,)
        np.testing.assert_allclose(rep.beta, [2 / 3], atol=1e-6)

    def test_huge_lambda0(self):
        d = small(1)
        hp = Hyperparams(1e6, 0.0, 1.0)
        bound = np.max(d.column_norms) * np.linalg.norm(d.y) / 2.0
        assert hp.eta0 > bound
        rep = solve(d, hp, SQ)
        assert np.all(rep.beta == 0) and rep.converged and rep.outer_iters == 1
        assert abs(rep.gap) <= 1e-9
        # the exit check comes first; screening with this dual point would remove everything
        out = screen(rep.alpha, 0.0, d, hp, FeatureSets(tuple(range(d.p)), ()))
        assert len(out.screened) == d.p

    def test_report_gap_is_full_problem_gap(self):
        d = small(2, n=30, p=25)
        hp = Hyperparams(0.05, 0.02, 1.0)
        rep = solve(d, hp, SQ, fast_config(d, hp, init_size=3))
        direct = duality_gap(rep.beta, rep.alpha, d, hp, SQ)
        assert abs(rep.gap - direct) <= 1e-12
        mapped = duality_gap(rep.beta, dual_from_primal(rep.beta, d, SQ), d, hp, SQ)
        assert rep.gap <= mapped + 1e-12
        assert rep.support == tuple(np.flatnonzero(rep.beta))
        assert abs(rep.primal_value - primal_objective(rep.beta, d, hp, SQ)) <= 1e-12

    def test_primal_non_increasing(self):
        for seed in range(5):
            d = small(seed, n=40, p=30)
            hp = Hyperparams(0.05, 0.02, 1.0)
            rep = solve(d, hp, SQ, fast_config(d, hp, init_size=2, add_c=1.0))
            primals = [s.primal for s in rep.trace]
            assert all(b <= a + 1e-12 for a, b in zip(primals, primals[1:]))

    def test_best_gap_returned(self):
        d = small(3, n=40, p=30)
        hp = Hyperparams(0.05, 0.02, 1.0)
        rep = solve(d, hp, SQ, fast_config(d, hp, init_size=2, add_c=1.0))
        assert rep.gap <= min(s.gap for s in rep.trace) + 1e-12

    def test_screened_features_outside_oracle_support(self):
        for seed in range(10):
            d = small(seed, n=20, p=8)
            hp = Hyperparams(0.3, 0.0, 0.5)
            truth = set(oracle_solve(d, hp).support)
            rep = solve(d, hp, SQ, fast_config(d, hp, init_size=1))
            for step in rep.trace:
                assert not (step.screened & truth)

    def test_alpha_stays_feasible_for_logistic(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(30, 12))
        y = (rng.random(30) < 0.5).astype(float)
        d = ProblemData(X, y)
        hp = Hyperparams(0.05, 0.05, 1.0)
        loss = LossModel.logistic()
        rep = solve(d, hp, loss, OuterConfig(inner=InnerConfig(step=FixedStep(0.01), max_iters=500), init_size=2))
        assert np.isfinite(dual_objective(rep.alpha, d, hp, loss))
        assert rep.gap >= -1e-10

    def test_normalized_columns_rescaled(self):
        d = small(4, n=40, p=12)
        hp = Hyperparams(0.05, 0.0, 1.0)
        rep = solve(d, hp, SQ, fast_config(d, hp, normalize_columns=True))
        assert rep.scales is not None
        np.testing.assert_allclose(rep.scales, d.column_norms)
        # beta is reported in original coordinates
        scaled = rep.beta * rep.scales
        assert rep.support == tuple(np.flatnonzero(scaled))

    def test_inner_budget(self):
        d = small(5, n=40, p=30)
        hp = Hyperparams(0.05, 0.02, 1.0)
        rep = solve(d, hp, SQ, OuterConfig(max_total_inner_iters=1500, init_size=2))
        assert rep.inner_iters_total <= 1500
        assert rep.outer_iters == len(rep.trace)

    def test_not_converged_flag(self):
        d = small(7, n=40, p=30)
        hp = Hyperparams(0.03, 0.02, 1.0)
        rep = solve(d, hp, SQ, OuterConfig(max_outer_iters=1, inner=InnerConfig(max_iters=5)))
        assert not rep.converged and rep.outer_iters == 1

    @pytest.mark.parametrize("kw", [dict(global_gap_tol=0.0), dict(max_outer_iters=0), dict(max_total_inner_iters=0)])
    def test_config_validation(self, kw):
        with pytest.raises(DomainError):
            OuterConfig(**kw)
