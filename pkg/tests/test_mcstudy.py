import csv
import json
import math

import numpy as np
import pytest

from eoll.mcstudy import (
    DESK_REPLICATES,
    PARAM_NAMES,
    SimConfig,
    calibrate_tau,
    expected_censoring,
    generate_replicate,
    residual_normality_study,
    run_study,
    write_reports,
)

TARGETS = (0.1, 0.3)


class TestConfig:
    @pytest.mark.parametrize("kw", [{"replicates": 0}, {"n": 2}, {"censoring": 1.0}, {"censoring": -0.1},
                                    {"a": 0.0}, {"tau": -1.0}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SimConfig(**kw)

    def test_truth(self):
        np.testing.assert_array_equal(SimConfig().truth, [3.0, 2.5, 1.9, 0.3, 0.5, 0.9])


class TestGeneration:
    def test_uncensored_cell(self):
        d = generate_replicate(SimConfig(n=300), 5)
        assert np.all(d.delta == 1)

    def test_deterministic(self):
        cfg = SimConfig(n=100, censoring=0.3)
        tau = calibrate_tau(cfg)
        d1, d2 = generate_replicate(cfg, 17, tau), generate_replicate(cfg, 17, tau)
        assert d1.y.tobytes() == d2.y.tobytes() and d1.X.tobytes() == d2.X.tobytes()
        assert not np.array_equal(d1.y, generate_replicate(cfg, 18, tau).y)

    def test_covariates(self):
        d = generate_replicate(SimConfig(n=5000), 1)
        assert set(np.unique(d.column("v2"))) == {0.0, 1.0}
        assert 0.0 <= d.column("v1").min() and d.column("v1").max() < 1.0
        assert d.column("v2").mean() == pytest.approx(0.5, abs=0.03)

    @pytest.mark.parametrize("target", TARGETS)
    def test_tau_solves_pilot_equation(self, target):
        cfg = SimConfig(censoring=target)
        tau = calibrate_tau(cfg)
        # independent estimate of P(c <= y*) from a fresh draw with explicit censoring times
        rng = np.random.default_rng(8)
        n = 400_000
        v1, v2 = rng.random(n), rng.binomial(1, 0.5, n)
        from eoll.eollw import LeollwParams, leollw_quantile
        z = leollw_quantile(LeollwParams(0.0, 1.0, 0.5, 0.9), rng.random(n))
        ystar = 3.0 + 2.5 * v1 + 1.9 * v2 + 0.3 * z
        c = rng.uniform(0, tau, n)
        assert np.mean(c <= ystar) == pytest.approx(target, abs=0.003)
        assert expected_censoring(ystar, tau) == pytest.approx(target, abs=0.003)

    @pytest.mark.parametrize("target", TARGETS)
    @pytest.mark.parametrize("n", [100, 250, 500])
    def test_realized_censoring(self, n, target):
        cfg = SimConfig(n=n, censoring=target)
        tau = calibrate_tau(cfg)
        seeds = np.random.SeedSequence(cfg.seed).spawn(1000)
        rates = [1 - generate_replicate(cfg, s, tau).delta.mean() for s in seeds]
        assert abs(np.mean(rates) - target) <= 0.02

    def test_zero_target(self):
        assert math.isinf(calibrate_tau(SimConfig()))


@pytest.fixture(scope="module")
def small():
    return run_study(SimConfig(n=250, censoring=0.1, replicates=12, seed=3), keep_residuals=True)


class TestStudy:
    def test_deterministic(self, small):
        again = run_study(SimConfig(n=250, censoring=0.1, replicates=12, seed=3), keep_residuals=True)
        np.testing.assert_array_equal(small.estimates, again.estimates)
        np.testing.assert_array_equal(small.r_d, again.r_d)

    def test_moments(self, small):
        truth = small.config.truth
        err = small.estimates - truth
        np.testing.assert_allclose(small.bias, err.mean(axis=0), rtol=1e-12, atol=1e-15)
        # MSE = population variance + bias^2
        np.testing.assert_allclose(small.mse, small.estimates.var(axis=0) + small.bias**2, rtol=1e-10)
        assert np.all((small.cp >= 0) & (small.cp <= 1))
        assert small.successes + small.failures == 12

    def test_residuals_kept(self, small):
        assert small.r_m.size == small.r_d.size == 250 * small.successes

    def test_write_reports(self, small, tmp_path):
        paths = write_reports([small], tmp_path)
        t1 = list(csv.DictReader(paths["table1"].open()))
        assert [r["parameter"] for r in t1] == list(PARAM_NAMES)
        assert float(t1[0]["AE"]) == small.ae[0]
        t2 = list(csv.DictReader(paths["table2"].open()))
        assert float(t2[4]["CP"]) == small.cp[4]
        meta = json.loads(paths["metadata"].read_text())
        assert meta["cells"][0]["tau"] == small.tau
        assert meta["cells"][0]["failures"] == small.failures

    def test_residual_summary(self):
        s = residual_normality_study(SimConfig(n=250, censoring=0.0, replicates=6, seed=4))
        assert s.r_m_skewness < 0
        assert 0 < s.r_d_ks < 1


def test_desk_default():
    assert DESK_REPLICATES == 200


@pytest.mark.slow
def test_small_sample_shape_bias(study):
    # n=100 at 30% censoring: bias of b about 0.2274
    rep = study(100, 0.3, DESK_REPLICATES)
    assert rep.bias[5] == pytest.approx(0.2274, abs=0.08)


def _inversions(values_by_n) -> int:
    """Pairwise (n_small, n_large) comparisons where the larger n is worse: 6 params x 3 pairs = 18."""
    v = [np.asarray(x) for x in values_by_n]
    return sum(int(np.sum(v[j] > v[i])) for i in range(3) for j in range(i + 1, 3))


@pytest.mark.slow
@pytest.mark.parametrize("metric", ["abs_bias", "mse"])
@pytest.mark.parametrize("censoring", [0.0, 0.1, 0.3])
def test_consistency_trend(study, censoring, metric):
    reps = [study(n, censoring, DESK_REPLICATES) for n in (100, 250, 500)]
    values = [np.abs(r.bias) if metric == "abs_bias" else r.mse for r in reps]
    assert _inversions(values) <= 1


@pytest.mark.slow
@pytest.mark.parametrize("n", [100, 250, 500])
def test_censoring_raises_mse(study, n):
    assert np.sum(study(n, 0.3, DESK_REPLICATES).mse < study(n, 0.0, DESK_REPLICATES).mse) <= 1
