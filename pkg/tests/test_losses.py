import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l0pd import DomainError, FeasibilityError, LossModel
from l0pd.losses import LOGISTIC_BOUNDARY_EPS

SQ, LOG, HUB = LossModel.square(), LossModel.logistic(), LossModel.huber(0.5)
ALL = [SQ, LOG, HUB, LossModel.huber(1.0), LossModel.huber(2.0)]


def grid_conjugate(loss, a, y, lo=-20.0, hi=20.0, step=1e-4):
    u = np.arange(lo, hi + step, step)
    return float(np.max(a * u - loss.value(u, np.full_like(u, y))))


def random_feasible(loss, rng, size):
    if loss is SQ or loss.kind.value == "square":
        y = rng.normal(size=size)
        return rng.normal(scale=2.0, size=size), y
    if loss.kind.value == "logistic":
        y = rng.integers(0, 2, size=size).astype(float)
        return rng.uniform(0.01, 0.99, size=size) - y, y
    y = rng.choice([-1.0, 1.0], size=size)
    return -y * rng.uniform(0.0, 1.0, size=size), y


class TestValues:
    def test_square_zero(self):
        assert SQ.value(0.0, 0.0) == 0.0

    def test_square_half(self):
        assert SQ.value(0.5, 1.0) == 0.125

    def test_huber_flat_region(self):
        assert HUB.value(1.2, 1.0) == 0.0

    def test_huber_pieces_continuous(self):
        g = HUB.huber_gamma
        for m in (1.0, 1.0 - g):
            left, right = HUB.value(m - 1e-9, 1.0), HUB.value(m + 1e-9, 1.0)
            assert abs(left - right) < 1e-8

    def test_logistic_matches_log1p(self):
        u = np.linspace(-5, 5, 11)
        np.testing.assert_allclose(LOG.value(u, np.ones(11)), np.log1p(np.exp(u)) - u, rtol=1e-12)

    def test_logistic_large_margin_is_finite(self):
        assert np.isfinite(LOG.value(800.0, 0.0))

    @pytest.mark.parametrize("loss,y", [(LOG, 0.5), (LOG, -1.0), (HUB, 0.0), (HUB, 2.0)])
    def test_bad_labels(self, loss, y):
        with pytest.raises(DomainError):
            loss.value(0.0, y)


class TestDerivatives:
    def test_square(self):
        assert SQ.derivative(0.5, 1.0) == -0.5

    @pytest.mark.parametrize("y", [-3.0, 0.0, 2.5])
    def test_square_at_minimum(self, y):
        assert SQ.derivative(y, y) == 0.0

    def test_logistic_at_zero(self):
        assert LOG.derivative(0.0, 0.0) == 0.5

    @pytest.mark.parametrize("loss", ALL, ids=str)
    def test_matches_finite_difference(self, loss):
        rng = np.random.default_rng(1)
        _, y = random_feasible(loss, rng, 200)
        u = rng.normal(scale=2.0, size=200)
        h = 1e-6
        fd = (loss.value(u + h, y) - loss.value(u - h, y)) / (2 * h)
        # skip the Huber kinks
        if loss.kind.value == "huber":
            m = y * u
            keep = (np.abs(m - 1) > 1e-3) & (np.abs(m - 1 + loss.huber_gamma) > 1e-3)
        else:
            keep = np.ones(200, bool)
        np.testing.assert_allclose(loss.derivative(u, y)[keep], fd[keep], atol=1e-6)


class TestConjugate:
    def test_square_example(self):
        assert SQ.conjugate_value(0.5, 1.0) == 0.625
        assert abs(grid_conjugate(SQ, 0.5, 1.0, -10, 10) - 0.625) < 1e-4

    @pytest.mark.parametrize("y", [-2.0, 0.0, 3.0])
    def test_square_zero(self, y):
        assert SQ.conjugate_value(0.0, y) == 0.0

    def test_logistic_example(self):
        expected = math.log(0.5)
        assert abs(LOG.conjugate_value(0.5, 0.0) - expected) < 1e-12
        assert abs(grid_conjugate(LOG, 0.5, 0.0) - expected) < 1e-4

    def test_logistic_boundary_is_finite(self):
        assert LOG.conjugate_value(0.0, 0.0) == 0.0
        assert LOG.conjugate_value(-1.0, 1.0) == 0.0

    @pytest.mark.parametrize("loss,a,y", [(LOG, 0.2, 1.0), (LOG, -0.1, 0.0), (HUB, 0.5, 1.0), (HUB, -1.5, 1.0)])
    def test_infeasible_raises(self, loss, a, y):
        with pytest.raises(FeasibilityError):
            loss.conjugate_value(a, y)

    @pytest.mark.parametrize("loss", ALL, ids=str)
    def test_grid_oracle(self, loss):
        rng = np.random.default_rng(7)
        a, y = random_feasible(loss, rng, 20)
        for ai, yi in zip(a, y):
            assert abs(loss.conjugate_value(ai, yi) - grid_conjugate(loss, ai, yi)) < 1e-4

    @pytest.mark.parametrize("loss", ALL, ids=str)
    def test_fenchel_young(self, loss):
        rng = np.random.default_rng(3)
        a, y = random_feasible(loss, rng, 10_000)
        u = rng.normal(scale=5.0, size=10_000)
        assert np.all(loss.value(u, y) + loss.conjugate_value(a, y) >= a * u - 1e-10)

    @pytest.mark.parametrize("loss", ALL, ids=str)
    def test_derivative_of_conjugate(self, loss):
        rng = np.random.default_rng(5)
        a, y = random_feasible(loss, rng, 200)
        if loss.kind.value == "huber":
            # strictly interior margin
            a = -y * rng.uniform(0.05, 0.95, size=200)
        h = 1e-6
        fd = (loss.conjugate_value(a + h, y) - loss.conjugate_value(a - h, y)) / (2 * h)
        d = loss.conjugate_derivative(a, y)
        np.testing.assert_allclose(d, fd, rtol=1e-5, atol=1e-7)

    def test_conjugate_derivative_examples(self):
        assert SQ.conjugate_derivative(0.5, 1.0) == 1.5
        assert SQ.conjugate_derivative(-4.0, 4.0) == 0.0
        # a + y = 1/2 is the symmetric point of the logistic conjugate
        assert LOG.conjugate_derivative(0.5, 0.0) == 0.0
        assert LOG.conjugate_derivative(-0.5, 1.0) == 0.0

    def test_logistic_derivative_needs_interior(self):
        with pytest.raises(FeasibilityError):
            LOG.conjugate_derivative(0.0, 0.0)

    def test_inverse_relation(self):
        # l*'(l'(u)) = u for the smooth losses
        u = np.linspace(-3, 3, 13)
        for loss, y in ((SQ, np.full(13, 0.7)), (LOG, np.ones(13))):
            np.testing.assert_allclose(loss.conjugate_derivative(loss.derivative(u, y), y), u, atol=1e-9)


class TestProjection:
    def test_square_identity(self):
        assert SQ.project_feasible(7.3, 2.0) == 7.3

    def test_logistic_upper_clamp(self):
        assert LOG.project_feasible(2.0, 0.0) == 1.0 - LOGISTIC_BOUNDARY_EPS

    def test_huber_clamp(self):
        assert HUB.project_feasible(0.5, 1.0) == 0.0
        assert HUB.project_feasible(-3.0, 1.0) == -1.0
        assert HUB.project_feasible(3.0, -1.0) == 1.0

    @pytest.mark.parametrize("loss", ALL, ids=str)
    @settings(max_examples=200, deadline=None)
    @given(a=st.floats(-1e6, 1e6), label=st.integers(0, 1))
    def test_idempotent_and_feasible(self, loss, a, label):
        y = {"square": float(label), "logistic": float(label), "huber": 2.0 * label - 1.0}[loss.kind.value]
        once = loss.project_feasible(a, y)
        assert loss.project_feasible(once, y) == once
        assert np.isfinite(loss.conjugate_value(once, y))

    def test_projection_is_nearest_point(self):
        rng = np.random.default_rng(0)
        y = rng.choice([-1.0, 1.0], size=50)
        a = rng.normal(scale=2, size=50)
        pa = HUB.project_feasible(a, y)
        for _ in range(20):
            b = HUB.project_feasible(rng.normal(scale=2, size=50), y)
            assert np.all(np.abs(a - pa) <= np.abs(a - b) + 1e-15)


class TestSmoothness:
    def test_values(self):
        assert SQ.smoothness_mu() == 1.0
        assert LOG.smoothness_mu() == 4.0
        assert HUB.smoothness_mu() == 0.5

    @pytest.mark.parametrize("loss", ALL, ids=str)
    def test_derivative_lipschitz(self, loss):
        rng = np.random.default_rng(2)
        _, y = random_feasible(loss, rng, 2000)
        u, v = rng.normal(scale=3, size=(2, 2000))
        ratio = np.abs(loss.derivative(u, y) - loss.derivative(v, y)) / np.abs(u - v)
        assert np.all(ratio <= 1.0 / loss.smoothness_mu() + 1e-9)

    def test_huber_gamma_positive(self):
        with pytest.raises(DomainError):
            LossModel.huber(0.0)

    def test_from_name(self):
        assert LossModel.from_name("Huber", 2.0) == LossModel.huber(2.0)
        with pytest.raises(ValueError):
            LossModel.from_name("hinge")
