import math
import random

import pytest
from scipy import special, stats

from relkit.errors import NumericalError, ValidationError
from relkit.inference import (
    BinomialModel,
    NormalKnownVarModel,
    PosteriorModel,
    concentration_splits,
    credible_interval,
    integrate_piecewise,
    normal_cdf,
    posterior_region_prob,
    posterior_summary,
    posterior_update_binomial,
    posterior_update_normal,
    quadrature,
    regularized_incomplete_beta,
)
from relkit.loss import ParameterSpace
from relkit.regions import Interval, RegionSet


class TestSpecialFunctions:
    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 8.0, 40.0, 500.0, 5000.0])
    @pytest.mark.parametrize("b", [0.5, 1.0, 3.0, 77.0, 5000.0])
    def test_incomplete_beta_against_scipy(self, a, b):
        for x in (1e-9, 0.01, 0.2, 0.394, 0.5, 0.606, 0.9, 0.999999, 1.0):
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                float(special.betainc(a, b, x)), abs=5e-12
            )

    def test_incomplete_beta_edges(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
        with pytest.raises(ValidationError):
            regularized_incomplete_beta(0.0, 1.0, 0.5)

    @pytest.mark.parametrize("z", [-10.0, -3.2, -1.0, 0.0, 0.5, 2.0, 8.5])
    def test_normal_cdf_against_scipy(self, z):
        assert normal_cdf(z) == pytest.approx(float(stats.norm.cdf(z)), abs=1e-15)


class TestConjugateUpdates:
    @pytest.mark.parametrize(
        "prior,k,n,expected",
        [
            ((1.0, 1.0), 7, 10, (8.0, 4.0)),
            ((1.0, 1.0), 0, 0, (1.0, 1.0)),
            ((2.0, 2.0), 5, 5, (7.0, 2.0)),
        ],
    )
    def test_binomial(self, prior, k, n, expected):
        model = BinomialModel(n=n, k=k, prior_alpha=prior[0], prior_beta=prior[1])
        post = posterior_update_binomial(model)
        assert post.params == expected
        assert post.family == "beta"

    def test_binomial_invalid_counts(self):
        with pytest.raises(ValidationError):
            BinomialModel(n=5, k=6)
        with pytest.raises(ValidationError):
            BinomialModel(n=5, k=-1)
        with pytest.raises(ValidationError):
            BinomialModel(n=5, k=2, prior_alpha=0.0)

    def test_normal_update_closed_form(self):
        model = NormalKnownVarModel(n=1, ybar=2.0, sigma=1.0, prior_mean=0.0, prior_sd=10.0)
        post = posterior_update_normal(model)
        mean, sd = post.params
        assert mean == pytest.approx(2.0 / 1.01, abs=1e-12)
        assert round(mean, 4) == 1.9802
        assert sd == pytest.approx(1.01**-0.5, abs=1e-12)
        assert round(sd, 5) == 0.99504

    def test_normal_update_matches_numeric_posterior(self):
        # oracle: integrate prior x likelihood on a grid and compare moments
        model = NormalKnownVarModel(n=4, ybar=0.7, sigma=2.0, prior_mean=-1.0, prior_sd=1.5)
        post = posterior_update_normal(model)

        def unnorm(t):
            return stats.norm.pdf(t, -1.0, 1.5) * stats.norm.pdf(0.7, t, 2.0 / 2.0)

        z = quadrature(unnorm, -12.0, 12.0, tol=1e-12).value
        mean = quadrature(lambda t: t * unnorm(t), -12.0, 12.0, tol=1e-12).value / z
        assert post.params[0] == pytest.approx(mean, abs=1e-8)

    def test_normal_data_dominance(self):
        model = NormalKnownVarModel(n=10**6, ybar=3.3, sigma=1.0, prior_mean=0.0, prior_sd=1.0)
        post = posterior_update_normal(model)
        assert abs(post.params[0] - 3.3) < 1e-4

    def test_normal_rejects_no_data_or_flat_prior(self):
        with pytest.raises(ValidationError):
            NormalKnownVarModel(n=0, ybar=0.0, sigma=1.0)
        with pytest.raises(ValidationError):
            NormalKnownVarModel(n=1, ybar=0.0, sigma=1.0, prior_sd=float("inf"))


class TestRegionProbability:
    def test_uniform_prior_measures_regions(self):
        post = posterior_update_binomial(BinomialModel(n=0, k=0))
        assert posterior_region_prob(post, RegionSet.single(-0.106, 0.106)) == (
            pytest.approx(0.212, abs=1e-12)
        )

    def test_empty_and_full(self):
        post = posterior_update_binomial(BinomialModel(n=10, k=7))
        assert posterior_region_prob(post, RegionSet()) == 0.0
        assert posterior_region_prob(post, RegionSet.single(-0.5, 0.5)) == (
            pytest.approx(1.0, abs=1e-8)
        )

    def test_additivity_over_partition(self):
        post = posterior_update_binomial(BinomialModel(n=30, k=11))
        pieces = [
            RegionSet.single(-0.5, -0.2),
            RegionSet.single(-0.2, 0.05, lo_open=True),
            RegionSet.single(0.05, 0.5, lo_open=True),
        ]
        total = sum(posterior_region_prob(post, rs) for rs in pieces)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_outside_space_rejected(self):
        from relkit.errors import DomainError

        post = posterior_update_binomial(BinomialModel(n=10, k=7))
        with pytest.raises(DomainError):
            posterior_region_prob(post, RegionSet.single(-0.7, 0.0))


class TestCredibleInterval:
    def test_uniform_bias_interval(self):
        post = posterior_update_binomial(BinomialModel(n=0, k=0))
        lo, hi = credible_interval(post, 0.95)
        assert lo == pytest.approx(-0.475, abs=1e-8)
        assert hi == pytest.approx(0.475, abs=1e-8)

    def test_standard_normal_interval(self):
        post = PosteriorModel("normal", (0.0, 1.0), ParameterSpace(-12.0, 12.0))
        lo, hi = credible_interval(post, 0.95)
        assert hi == pytest.approx(1.95996, abs=1e-5)
        assert lo == pytest.approx(-hi, abs=1e-9)

    def test_symmetric_midmass_interval(self):
        post = PosteriorModel("normal", (0.7, 0.4), ParameterSpace(-12.0, 12.0))
        lo, hi = credible_interval(post, 0.5)
        assert (lo + hi) / 2.0 == pytest.approx(0.7, abs=1e-8)

    def test_quantile_cdf_round_trip(self):
        posts = [
            posterior_update_binomial(BinomialModel(n=10, k=7)),
            PosteriorModel("normal", (0.01, 0.3), ParameterSpace(-2.0, 2.0)),
        ]
        for post in posts:
            for p in [x / 100 for x in range(1, 100)]:
                assert post.cdf(post.quantile(p)) == pytest.approx(p, abs=1e-8)

    def test_invalid_mass(self):
        post = posterior_update_binomial(BinomialModel(n=0, k=0))
        with pytest.raises(ValidationError):
            credible_interval(post, 1.0)


class TestTruncation:
    def test_truncated_normal_matches_scipy(self):
        space = ParameterSpace(-0.3, 0.8)
        post = PosteriorModel("normal", (0.1, 0.4), space)
        ref = stats.truncnorm((-0.3 - 0.1) / 0.4, (0.8 - 0.1) / 0.4, loc=0.1, scale=0.4)
        for x in (-0.2, 0.0, 0.3, 0.7):
            assert post.cdf(x) == pytest.approx(float(ref.cdf(x)), abs=1e-10)
        assert posterior_region_prob(post, RegionSet.single(-0.3, 0.8)) == (
            pytest.approx(1.0, abs=1e-12)
        )

    def test_vanishing_mass_raises(self):
        post = PosteriorModel("normal", (0.0, 1e-6), ParameterSpace(1.0, 2.0))
        with pytest.raises(NumericalError):
            post.cdf(1.5)


class TestQuadrature:
    def test_constant_and_polynomial(self):
        assert quadrature(lambda t: 1.0, 0.0, 1.0).value == pytest.approx(1.0, abs=1e-14)
        result = quadrature(lambda t: t * t, 0.0, 1.0)
        assert result.value == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert result.converged

    def test_beta_density_normalizes(self):
        post = posterior_update_binomial(BinomialModel(n=10, k=7, prior_alpha=1, prior_beta=1))
        result = integrate_piecewise(
            post.pdf, -0.5, 0.5, cuts=concentration_splits(post), tol=1e-10
        )
        assert result.value == pytest.approx(1.0, abs=1e-8)

    def test_depth_exhaustion_flagged(self):
        result = quadrature(
            lambda t: 1.0 / math.sqrt(abs(t - 0.3) + 1e-300), 0.0, 1.0,
            tol=1e-13, max_depth=6,
        )
        assert not result.converged

    def test_empty_and_reversed_ranges(self):
        assert quadrature(lambda t: 5.0, 1.0, 1.0).value == 0.0
        with pytest.raises(ValueError):
            quadrature(lambda t: 1.0, 1.0, 0.0)


def _random_region(rng, lo, hi):
    margin = 0.02 * (hi - lo)
    a = rng.uniform(lo + margin, hi - margin)
    b = rng.uniform(lo + margin, hi - margin)
    if a > b:
        a, b = b, a
    if a == b:
        b = min(hi - margin, a + 0.05)
    return RegionSet((Interval(a, b),))


def test_conjugacy_matches_quadrature_battery():
    """Closed-form region probabilities vs numeric integration of
    prior x likelihood / evidence, both models."""
    rng = random.Random(5150)
    for _ in range(40):
        if rng.random() < 0.5:
            alpha, beta = rng.uniform(0.7, 20.0), rng.uniform(0.7, 20.0)
            n = rng.randint(0, 400)
            k = rng.randint(0, n) if n else 0
            model = BinomialModel(n=n, k=k, prior_alpha=alpha, prior_beta=beta)
            post = posterior_update_binomial(model)
            region = _random_region(rng, -0.5, 0.5)

            def log_integrand(b):
                pi = b + 0.5
                if pi <= 0.0 or pi >= 1.0:
                    return -math.inf
                return (
                    (alpha - 1.0) * math.log(pi)
                    + (beta - 1.0) * math.log1p(-pi)
                    + k * math.log(pi)
                    + (n - k) * math.log1p(-pi)
                )

            lo, hi = -0.5, 0.5
        else:
            prior_mean = rng.uniform(-1.0, 1.0)
            prior_sd = rng.uniform(0.2, 2.0)
            sigma = rng.uniform(0.2, 2.0)
            n = rng.randint(1, 500)
            ybar = rng.uniform(-1.5, 1.5)
            model = NormalKnownVarModel(
                n=n, ybar=ybar, sigma=sigma, prior_mean=prior_mean, prior_sd=prior_sd
            )
            space = ParameterSpace(-5.0, 5.0)
            post = posterior_update_normal(model, space)
            region = _random_region(rng, -5.0, 5.0)
            se = sigma / math.sqrt(n)

            def log_integrand(t):
                return (
                    -0.5 * ((t - prior_mean) / prior_sd) ** 2
                    - 0.5 * ((ybar - t) / se) ** 2
                )

            lo, hi = -5.0, 5.0

        splits = concentration_splits(post)
        probes = [lo + i * (hi - lo) / 64 for i in range(65)] + list(splits)
        peak_guess = max(log_integrand(x) for x in probes)
        integrand = lambda t: math.exp(log_integrand(t) - peak_guess)
        evidence = integrate_piecewise(integrand, lo, hi, cuts=splits, tol=1e-11).value
        itv = region.intervals[0]
        mass = integrate_piecewise(
            integrand, itv.lo, itv.hi, cuts=splits, tol=1e-11
        ).value
        assert posterior_region_prob(post, region) == pytest.approx(
            mass / evidence, abs=1e-6
        )


def test_posterior_summary_fields():
    post = posterior_update_binomial(BinomialModel(n=40, k=28))
    summary = posterior_summary(post)
    # Beta(29, 13) mean on the bias scale
    assert summary["mean"] == pytest.approx(29.0 / 42.0 - 0.5, abs=1e-6)
    assert summary["family"] == "beta"
    assert summary["central_95"][0] < summary["mean"] < summary["central_95"][1]
