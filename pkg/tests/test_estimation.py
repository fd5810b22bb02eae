"""Mean estimation, profile likelihood, and parameter recovery."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import optimize, stats

from powerdiv import (
    Dataset,
    DomainError,
    SamplerConfig,
    TweedieParams,
    beta_divergence,
    default_p_grid,
    deviance_profile,
    feasible_p,
    fit,
    fit_mu,
    log_densities,
    log_likelihood,
    sample,
)


def test_dataset_basics():
    d = Dataset([1.0, 2.0, 3.0])
    assert d.count == 3
    assert Dataset([]).count == 0
    with pytest.raises(DomainError):
        Dataset([1.0, math.nan])
    with pytest.raises(DomainError):
        Dataset([math.inf])


class TestFitMu:
    def test_spec_values(self):
        assert fit_mu(2.0, Dataset([1.0, 2.0, 3.0])) == 2.0
        assert fit_mu(0.0, Dataset([5.0])) == 5.0
        assert_allclose(fit_mu(1.5, Dataset([0.0, 0.0, 4.0])), 4.0 / 3.0, rtol=1e-15)

    def test_equals_mean_for_every_feasible_p(self):
        rng = np.random.default_rng(17)
        x = rng.gamma(2.0, 1.5, size=200)
        data = Dataset(x)
        mean = float(np.mean(x))
        for p in (-1.0, 0.0, 1.3, 1.5, 2.0, 2.7, 3.0, 3.5):
            assert abs(fit_mu(p, data) - mean) <= 1e-12 * max(1.0, abs(mean))

    def test_agrees_with_brute_force_minimizer(self):
        x = np.array([0.0, 0.0, 4.0])
        for p in (0.0, 1.5, 1.9):
            total = lambda m: float(np.sum(beta_divergence(p, x, m)))
            res = optimize.minimize_scalar(total, bounds=(0.2, 4.0), method="bounded",
                                           options={"xatol": 1e-10})
            assert abs(fit_mu(p, Dataset(x)) - res.x) < 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            fit_mu(2.0, Dataset([]))
        with pytest.raises(DomainError):
            fit_mu(1.5, Dataset([-1.0, 2.0]))
        with pytest.raises(DomainError):
            fit_mu(1.5, Dataset([0.0, 0.0]))     # zero mean, positive required
        assert fit_mu(0.0, Dataset([-1.0, 1.0])) == 0.0


def test_log_likelihood():
    assert log_likelihood(TweedieParams(mu=1.0, phi=1.0, p=2.0), Dataset([])) == 0.0
    got = log_likelihood(TweedieParams(mu=0.0, phi=1.0, p=0.0), Dataset([0.0]))
    assert_allclose(got, -0.9189385332046727, atol=1e-12)
    counts = np.array([0.0, 1.0, 3.0, 2.0, 5.0])
    got = log_likelihood(TweedieParams(mu=2.0, phi=1.0, p=1.0), Dataset(counts))
    oracle = float(np.sum(stats.poisson.logpmf(counts.astype(int), 2.0)))
    assert abs(got - oracle) < 1e-10


def test_sign_relation_divergence_vs_likelihood():
    # moving mu so the divergence grows must shrink the log-likelihood
    x = 2.0
    h = 1e-5
    for p in (0.0, 1.0, 1.5, 2.0, 3.0):
        phi = 1.0
        for mu in (1.3, 2.9):
            d_div = (float(beta_divergence(p, x, mu + h)) -
                     float(beta_divergence(p, x, mu - h))) / (2 * h)
            ll = lambda m: log_densities(TweedieParams(mu=m, phi=phi, p=p), x)
            d_ll = (ll(mu + h) - ll(mu - h)) / (2 * h)
            assert d_div * d_ll < 0.0, p


class TestFeasibility:
    def test_rules(self):
        neg = Dataset([-1.0, 2.0])
        assert feasible_p(0.0, neg)
        for p in (1.0, 1.5, 2.0, 3.0, -1.0):
            assert not feasible_p(p, neg)

        zeros = Dataset([0.0, 1.0, 2.0])
        assert feasible_p(1.0, zeros)
        assert feasible_p(1.5, zeros)
        assert not feasible_p(2.0, zeros)
        assert not feasible_p(3.0, zeros)

        frac = Dataset([0.5, 1.5])
        assert not feasible_p(1.0, frac)
        assert feasible_p(2.0, frac)

        assert not feasible_p(0.5, Dataset([1.0]))          # no model at all
        assert not feasible_p(1.5, Dataset([0.0, 0.0]))     # zero mean

    def test_default_grid(self):
        g = default_p_grid()
        assert set([0.0, 1.0, 2.0, 3.0]).issubset(set(g))
        inner = g[(g > 1.0) & (g < 2.0)]
        assert_allclose(inner, np.arange(1.05, 1.96, 0.1), atol=1e-9)
        clipped = default_p_grid(1.4, 1.6)
        assert clipped.min() >= 1.4 and clipped.max() <= 1.6
        assert 1.4 in clipped and 1.6 in clipped
        with pytest.raises(DomainError):
            default_p_grid(2.0, 1.0)


class TestDevianceProfile:
    def test_gaussian_deviance_is_sum_of_squares(self):
        rng = np.random.default_rng(8)
        x = rng.normal(3.0, 1.0, size=100)
        rows = deviance_profile(Dataset(x), [0.0])
        expected = float(np.sum((x - x.mean()) ** 2))
        assert_allclose(rows[0].total_deviance, expected, rtol=1e-12)
        assert rows[0].feasible

    def test_infeasible_marked_not_fatal(self):
        rows = deviance_profile(Dataset([0.0, 1.0, 2.0]), [0.0, 1.5, 2.0])
        by_p = {r.p: r for r in rows}
        assert by_p[2.0].feasible is False
        assert math.isnan(by_p[2.0].log_likelihood)
        assert math.isinf(by_p[2.0].total_deviance)   # zero at p>=2
        assert by_p[1.5].feasible
        assert all(not (r.total_deviance < 0.0) for r in rows)

    def test_profile_peaks_near_true_p(self):
        x = sample(TweedieParams(mu=2.0, phi=0.5, p=1.5), SamplerConfig(seed=101, n=4000))
        grid = [1.1, 1.3, 1.5, 1.7, 1.9]
        rows = deviance_profile(Dataset(x), grid)
        lls = [r.log_likelihood for r in rows]
        assert grid[int(np.argmax(lls))] in (1.3, 1.5, 1.7)


class TestFit:
    def test_recovery_compound_poisson(self):
        x = sample(TweedieParams(mu=2.0, phi=0.5, p=1.5), SamplerConfig(seed=2024, n=3000))
        res = fit(Dataset(x))
        assert 1.3 <= res.p_hat <= 1.7
        assert abs(res.mu_hat - 2.0) < 0.06
        assert abs(res.phi_hat - 0.5) < 0.08
        assert res.converged
        assert res.density_method.value == "series"
        assert res.p_feasible_interval[0] == 0.0
        assert_allclose(res.total_deviance,
                        float(np.sum(2.0 * beta_divergence(res.p_hat, x, res.mu_hat))),
                        rtol=1e-12)
        assert_allclose(res.phi_tilde, res.total_deviance / (2.0 * len(x)), rtol=1e-15)

    def test_recovery_gaussian(self):
        x = sample(TweedieParams(mu=0.0, phi=1.0, p=0.0), SamplerConfig(seed=9, n=10_000))
        res = fit(Dataset(x))
        assert res.p_hat == 0.0
        assert res.p_feasible_interval == (0.0, 0.0)
        assert abs(res.phi_hat - 1.0) < 0.05
        assert abs(res.mu_hat) < 0.04

    def test_recovery_poisson(self):
        x = sample(TweedieParams(mu=3.0, phi=1.0, p=1.0), SamplerConfig(seed=10, n=5000))
        res = fit(Dataset(x))
        # the free-dispersion family at p slightly above 1 can edge out the
        # rigid phi=1 Poisson on a finite sample, so only require closeness
        assert res.p_hat <= 1.2
        assert abs(res.mu_hat - 3.0) < 0.1
        res2 = fit(Dataset(x), p_grid=[1.0, 2.0])
        assert res2.p_hat == 1.0
        assert res2.phi_hat == 1.0

    def test_explicit_grid_and_interval(self):
        x = sample(TweedieParams(mu=2.0, phi=0.5, p=1.5), SamplerConfig(seed=77, n=1500))
        res = fit(Dataset(x), p_grid=[1.4, 1.5, 1.6])
        assert 1.3 <= res.p_hat <= 1.7
        res2 = fit(Dataset(x), p_min=1.2, p_max=1.8)
        assert 1.2 <= res2.p_hat <= 1.8

    def test_errors(self):
        with pytest.raises(DomainError):
            fit(Dataset([]))
        with pytest.raises(DomainError):
            fit(Dataset([-1.0, -2.0]), p_grid=[2.0])    # nothing feasible
        with pytest.raises(DomainError):
            fit(Dataset([1.0, 2.0]), p_grid=[])

    def test_scale_equivariance_at_fixed_p(self):
        x = sample(TweedieParams(mu=2.0, phi=0.5, p=1.5), SamplerConfig(seed=55, n=800))
        c = 4.0
        p = 1.5
        base = deviance_profile(Dataset(x), [p])[0]
        scaled = deviance_profile(Dataset(c * x), [p])[0]
        assert abs(scaled.phi_hat / base.phi_hat - c ** (2.0 - p)) < 1e-3 * c ** (2.0 - p)
