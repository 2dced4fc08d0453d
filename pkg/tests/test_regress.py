import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize, stats

from eoll.eollw import LeollwParams, leollw_logsf, leollw_quantile, leollw_survival
from eoll.errors import DataError, OptimizerFailure, RankDeficientError
from eoll.mcstudy import SimConfig, generate_replicate
from eoll.regress import (
    CensoredDataset,
    FitOptions,
    RegressionModel,
    _loglik_core,
    chi2_sf,
    fit,
    fit_families,
    information_criteria,
    lr_test,
    loglik,
    loglik_direct,
    loglik_natural,
    predict_location_scale,
    predict_survival,
    score,
    standard_errors,
)

LEOLLW = RegressionModel("leollw", mu=("v1",))
LW = RegressionModel("lw", mu=("v1",))


def simulate(n, beta=(1.0, 2.0), sigma=0.5, a=0.5, b=0.9, tau=None, seed=0, x=None):
    rng = np.random.default_rng(seed)
    v = rng.uniform(size=n) if x is None else np.asarray(x, float)
    z = leollw_quantile(LeollwParams(0.0, 1.0, a, b), rng.uniform(size=n))
    ystar = beta[0] + beta[1] * v + sigma * z
    if tau is None:
        return CensoredDataset(ystar, np.ones(n, int), v[:, None], ("v1",))
    c = beta[0] + rng.uniform(0, tau, size=n)
    delta = (ystar <= c).astype(int)
    return CensoredDataset(np.minimum(ystar, c), delta, v[:, None], ("v1",))


@pytest.fixture(scope="module")
def data():
    return simulate(400, tau=4.0, seed=11)


@pytest.fixture(scope="module")
def fitted(data):
    return fit(LEOLLW, data)


class TestLoglik:
    def test_single_gumbel_point(self):
        d = CensoredDataset([0.0], [1], np.empty((1, 0)))
        assert loglik([0.0, 0.0, 0.0, 0.0], d, RegressionModel()) == pytest.approx(-1.0, abs=1e-15)

    def test_all_censored_is_sum_of_log_survival(self):
        rng = np.random.default_rng(1)
        y = rng.normal(size=30)
        ones = np.ones((30, 1))
        ll, *_ = _loglik_core(y, np.zeros(30, int), ones, ones, np.array([0.2]), np.array([-0.3]), 0.6, 1.7,
                              want_grad=False)
        ref = sum(float(leollw_logsf(LeollwParams(0.2, math.exp(-0.3), 0.6, 1.7), v)) for v in y)
        assert ll == pytest.approx(ref, rel=1e-13)

    def test_gumbel_aft_identity(self, data):
        beta1, beta2 = np.array([0.8, 1.9]), np.array([-0.6])
        sigma = math.exp(beta2[0])
        z = (data.y - beta1[0] - beta1[1] * data.column("v1")) / sigma
        ref = np.sum(data.delta * (z - math.log(sigma)) - np.exp(z))
        assert loglik_natural(beta1, beta2, 1.0, 1.0, data, LEOLLW) == pytest.approx(ref, rel=1e-12)
        assert loglik([*beta1, *beta2], data, LW) == pytest.approx(ref, rel=1e-12)

    def test_matches_term_by_term(self, data):
        args = ([0.9, 2.2], [-0.5], 0.45, 1.3)
        assert loglik_natural(*args, data, LEOLLW) == pytest.approx(loglik_direct(*args, data, LEOLLW), rel=1e-12)

    def test_reparameterization(self, data):
        theta = np.array([0.9, 2.2, -0.5, math.log(0.45), math.log(1.3)])
        nat = loglik_natural(theta[:2], theta[2:3], 0.45, 1.3, data, LEOLLW)
        assert loglik(theta, data, LEOLLW) == pytest.approx(nat, rel=1e-14)

    def test_score_against_finite_differences(self):
        d = simulate(50, tau=3.0, seed=7)
        rng = np.random.default_rng(3)
        for _ in range(5):
            theta = np.array([1.0, 2.0, math.log(0.5), math.log(0.5), math.log(0.9)]) + rng.normal(0, 0.3, 5)
            g = score(theta, d, LEOLLW)
            fd = np.empty(5)
            for j in range(5):
                h = 1e-6 * (1 + abs(theta[j]))
                e = np.zeros(5)
                e[j] = h
                fd[j] = (loglik(theta + e, d, LEOLLW) - loglik(theta - e, d, LEOLLW)) / (2 * h)
            np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-5 * np.max(np.abs(fd)))

    @settings(max_examples=30, deadline=None)
    @given(la=st.floats(-1.5, 1.5), lb=st.floats(-1.5, 1.5), ls=st.floats(-1.5, 0.5))
    def test_direct_agreement_property(self, la, lb, ls):
        d = simulate(40, tau=3.0, seed=5)
        a, b = math.exp(la), math.exp(lb)
        ll = loglik_natural([1.0, 2.0], [ls], a, b, d, LEOLLW)
        assert ll == pytest.approx(loglik_direct([1.0, 2.0], [ls], a, b, d, LEOLLW), rel=1e-10)


class TestData:
    def test_nan_rejected(self):
        with pytest.raises(DataError):
            CensoredDataset([0.0, np.nan], [1, 1], np.zeros((2, 1)))

    def test_bad_indicator(self):
        with pytest.raises(DataError):
            CensoredDataset([0.0, 1.0], [1, 2], np.zeros((2, 1)))

    def test_needs_failure(self):
        with pytest.raises(DataError):
            CensoredDataset([0.0, 1.0], [0, 0], np.zeros((2, 1)))

    def test_row_mismatch(self):
        with pytest.raises(DataError):
            CensoredDataset([0.0, 1.0], [1, 1], np.zeros((3, 1)))

    def test_rank_deficient(self):
        x = np.random.default_rng(0).uniform(size=50)
        d = CensoredDataset(x, np.ones(50, int), np.column_stack([x, 2 * x]), ("v1", "v2"))
        with pytest.raises(RankDeficientError):
            fit(RegressionModel("lw", mu=("v1", "v2")), d)


class TestFit:
    def test_converges_with_positive_se(self, fitted):
        assert fitted.converged
        assert fitted.se is not None and np.all(fitted.se > 0)
        assert fitted.grad_norm < 1e-3

    def test_paper_design_fit(self):
        cfg = SimConfig(n=500, censoring=0.0, replicates=1)
        res = fit(RegressionModel("leollw", mu=("v1", "v2")), generate_replicate(cfg, 123))
        assert res.converged and np.all(res.se > 0)

    def test_history_nondecreasing(self, fitted):
        h = np.array(fitted.history)
        assert h.size > 1
        assert np.all(np.diff(h) >= -1e-9 * np.abs(h[1:]))

    def test_basin_stability(self, data, fitted):
        rng = np.random.default_rng(99)
        start = fitted.theta + 0.1 * rng.normal(size=fitted.theta.size)
        again = fit(LEOLLW, data, FitOptions(start=start))
        assert again.loglik == pytest.approx(fitted.loglik, abs=1e-6)

    def test_translation_equivariance(self, data, fitted):
        c = 3.7
        shifted = fit(LEOLLW, CensoredDataset(data.y + c, data.delta, data.X, data.columns))
        assert shifted.beta1[0] - fitted.beta1[0] == pytest.approx(c, abs=1e-4)
        np.testing.assert_allclose(shifted.theta[1:], fitted.theta[1:], atol=1e-4)

    def test_noiseless_recovery(self):
        x = np.linspace(0, 1, 60)
        d = simulate(60, beta=(0.4, -1.2), sigma=1e-6, a=1.0, b=1.0, x=x, seed=2)
        res = fit(LW, d)
        np.testing.assert_allclose(res.beta1, [0.4, -1.2], atol=1e-3)

    def test_lw_equals_frozen_leollw(self, data):
        lw = fit(LW, data)

        # independent maximization of the full likelihood with log a = log b = 0 held fixed
        def neg(beta):
            th = np.concatenate([beta, [0.0, 0.0]])
            return -loglik(th, data, LEOLLW), -score(th, data, LEOLLW)[:3]

        ref = optimize.minimize(neg, lw.theta + 0.05, jac=True, method="BFGS", options={"gtol": 1e-9})
        assert lw.loglik == pytest.approx(-ref.fun, abs=1e-8)

    def test_ic_consistency(self, fitted):
        aic, bic, caic = information_criteria(fitted.loglik, fitted.n_params, fitted.n)
        assert (fitted.aic, fitted.bic, fitted.caic) == (aic, bic, caic)

    def test_shape_parameter_count(self):
        assert [RegressionModel(f).n_params for f in ("leollw", "lollw", "lew", "lw")] == [4, 3, 3, 2]


class TestStandardErrors:
    def test_sqrt_n_scaling(self):
        ses = {}
        for n in (100, 400):
            x = np.tile(np.linspace(0, 1, 50), n // 50)
            ses[n] = np.mean(
                [fit(LW, simulate(n, a=1.0, b=1.0, x=x, seed=s)).se for s in range(10)], axis=0
            )
        np.testing.assert_allclose(ses[100] / ses[400], 2.0, rtol=0.15)

    def test_step_halving(self, data, fitted):
        se1, _, _ = standard_errors(fitted, data, step=1e-4)
        se2, _, _ = standard_errors(fitted, data, step=5e-5)
        np.testing.assert_allclose(se2, se1, rtol=1e-2)

    def test_not_positive_definite(self, data):
        # far from the maximum the negative Hessian need not be PD; SEs must then be absent
        se, cov, diag = standard_errors(np.array([5.0, -4.0, 1.0, 3.0, -3.0]), data, LEOLLW)
        assert se is None and cov is None
        assert "positive definite" in diag


class TestInformationCriteria:
    def test_arithmetic(self):
        aic, bic, caic = information_criteria(-80.0, 14, 150)
        assert aic == pytest.approx(188.0, abs=1e-12)
        assert bic - aic == pytest.approx(14 * (math.log(150) - 2), abs=1e-12)
        assert caic - bic == pytest.approx(14.0, abs=1e-12)

    @pytest.mark.slow
    def test_nested_ordering(self):
        cfg = SimConfig(n=500, censoring=0.0, replicates=1)
        model = RegressionModel("leollw", mu=("v1", "v2"))
        wins = 0
        for s in range(100):
            d = generate_replicate(cfg, 1000 + s)
            wins += fit(model, d).aic <= fit(model.with_family("lw"), d).aic
        assert wins > 50


class TestFamilies:
    def test_nested_logliks(self):
        # a replicate where the default LEOLLW start stops at a local maximum below the LEW optimum
        model = RegressionModel("leollw", mu=("v1", "v2"))
        d = generate_replicate(SimConfig(n=500), 9005)
        assert fit(model, d).loglik < fit(model.with_family("lew"), d).loglik
        fits = fit_families(model, d)
        ll = {k: f.loglik for k, f in fits.items()}
        assert ll["leollw"] >= max(ll["lollw"], ll["lew"]) and min(ll["lollw"], ll["lew"]) >= ll["lw"]
        assert all(f.converged for f in fits.values())
        assert any("refitted" in m for m in fits["leollw"].diagnostics)

    def test_embedding(self, data):
        fits = fit_families(LEOLLW, data)
        for sub in ("lollw", "lew", "lw"):
            assert lr_test(fits["leollw"], fits[sub]).statistic >= 0


class TestLikelihoodRatio:
    def test_chi2_tail(self):
        for w, df in [(0.3, 1), (2.0, 2), (7.5, 3), (40.0, 2)]:
            assert chi2_sf(w, df) == pytest.approx(stats.chi2.sf(w, df), rel=1e-10)

    def test_identical(self, fitted):
        res = lr_test(fitted, fitted, df=2)
        assert res.statistic == 0.0 and res.p_value == 1.0

    def test_positive(self, data, fitted):
        sub = fit(LW, data)
        res = lr_test(fitted, sub)
        assert fitted.loglik > sub.loglik and res.statistic > 0 and res.df == 2

    def test_negative_raises(self, data, fitted):
        sub = fit(LW, data)
        with pytest.raises(OptimizerFailure):
            lr_test(sub, fitted, df=2)

    @pytest.mark.slow
    def test_null_mean(self):
        ws = []
        for s in range(200):
            d = simulate(200, a=1.0, b=1.0, tau=4.0, seed=5000 + s)
            ws.append(lr_test(fit(LEOLLW, d), fit(LW, d)).statistic)
        assert 1.0 <= np.mean(ws) <= 3.0


class TestPrediction:
    def test_composition(self, fitted):
        mu, sigma = predict_location_scale(fitted, [0.3])
        p = LeollwParams(fitted.beta1[0] + 0.3 * fitted.beta1[1], math.exp(fitted.beta2[0]), fitted.a, fitted.b)
        for y in (-1.0, 0.5, 1.5, 3.0):
            assert predict_survival(fitted, [0.3], y) == pytest.approx(float(leollw_survival(p, y)), rel=1e-14)
        assert predict_survival(fitted, {"v1": 0.3}, 1.0) == predict_survival(fitted, [0.3], 1.0)

    def test_lower_limit(self, data):
        lw = fit(LW, data)
        mu, sigma = predict_location_scale(lw, [0.5])
        assert predict_survival(lw, [0.5], mu[0] - 30 * sigma[0]) > 1 - 1e-6

    def test_lower_tail_rate(self, fitted):
        # with free shapes the lower tail is F ~ exp(ab z)
        mu, sigma = predict_location_scale(fitted, [0.5])
        z = -60.0
        f = 1 - predict_survival(fitted, [0.5], mu[0] + z * sigma[0])
        assert f == pytest.approx(math.exp(fitted.a * fitted.b * z), rel=1e-3)

    def test_monotone(self, fitted):
        s = predict_survival(fitted, [0.5], np.linspace(-5, 6, 400))
        assert np.all(np.diff(s) <= 0)

    def test_dimension_mismatch(self, fitted):
        with pytest.raises(ValueError):
            predict_survival(fitted, [0.3, 0.1], 1.0)
