"""
Tests for the mixture estimators, mixture importance sampling and the
replicate-variance engine.
"""
import numpy as np
import pandas as pd
import pytest
from scipy import integrate, stats

from mixqmc.exceptions import DomainError, EvaluationError, NumericalError
from mixqmc.models.toy import TOY_ALPHA, TOY_THETA
from mixqmc.schemas.allocation import AllocationRule
from mixqmc.schemas.experiment import ESTIMATOR_NAMES
from mixqmc.schemas.mixture import IntegrandHandle, MixtureSpec, NormalSpec, ShiftedNormalSpec, StratumSpec
from mixqmc.services.allocation_service import forward_power_of_two
from mixqmc.services.estimator_service import (
    estimate_mc,
    estimate_mixture_is,
    estimate_rqmc_adjusted,
    estimate_rqmc_per_stratum,
    estimate_rqmc_plain,
    estimate_rqmc_pow2,
    estimator_closure,
    fit_log2_slope,
    mixture_sampler,
    replicate_variance,
    stratum_mean_correlations,
)
from mixqmc.services.mixture_service import stratum_density, transform
from mixqmc.services.net_service import scrambled_sobol
from mixqmc.utils.seeding import TAG_STRATUM, derive_seed


def shifted_normals(alpha, thetas) -> MixtureSpec:
    return MixtureSpec(
        strata=[StratumSpec(weight=a, coordinates=[ShiftedNormalSpec(theta=t)]) for a, t in zip(alpha, thetas)]
    )


def toy_second_moment() -> float:
    """E[g^2] under the toy mixture, by quadrature."""
    total = 0.0
    for a, theta in zip(TOY_ALPHA, TOY_THETA):
        value, _ = integrate.quad(
            lambda x: np.exp(-2 * x * x) * np.cos(x) ** 2 * stats.norm.pdf(x, loc=theta), -np.inf, np.inf
        )
        total += a * value
    return total


class TestConjoinedEstimators:
    @pytest.mark.parametrize("name", ESTIMATOR_NAMES)
    def test_constant_integrand_is_exact(self, toy, constant, name):
        estimate = estimator_closure(name, toy.spec, constant, 256, rho=3.0)(123)
        assert estimate.value == pytest.approx(2.5, rel=1e-12)
        assert estimate.counts.sum() == 256

    def test_proportional_design_reduces_to_plain(self, constant):
        spec = shifted_normals([0.5, 0.25, 0.25], [0.0, 1.0, 2.0])
        g = IntegrandHandle(name="identity", func=lambda l, x: x[:, 0])
        plain = estimate_rqmc_plain(spec, g, 16, 99)
        adjusted = estimate_rqmc_adjusted(spec, g, AllocationRule(rho=1.0), 16, 99)
        assert adjusted.value == plain.value
        np.testing.assert_array_equal(adjusted.counts, [8, 4, 4])

    def test_power_of_two_counts_follow_plan(self, toy):
        rule = AllocationRule(rho=3.0, power_of_two=True)
        estimate = estimate_rqmc_pow2(toy.spec, toy.integrand, rule, 1024, 5)
        plan = forward_power_of_two(toy.spec.alpha, rule, 1024)
        np.testing.assert_array_equal(estimate.counts, plan.sizes)

    def test_adjusted_counts_follow_allocation(self, toy):
        estimate = estimate_rqmc_adjusted(toy.spec, toy.integrand, AllocationRule(rho=2.0), 512, 5)
        assert estimate.counts.min() >= 1 and estimate.counts.sum() == 512

    def test_stratum_means_are_reported(self, toy):
        estimate = estimate_rqmc_plain(toy.spec, toy.integrand, 1024, 8)
        assert estimate.stratum_means.shape == (8,)
        assert np.dot(toy.spec.alpha, estimate.stratum_means) == pytest.approx(estimate.value, abs=0.05)

    def test_monte_carlo_uses_any_sample_size(self, toy):
        assert estimate_mc(toy.spec, toy.integrand, 1000, 1).counts.sum() == 1000

    def test_rqmc_needs_power_of_two(self, toy):
        with pytest.raises(DomainError):
            estimate_rqmc_plain(toy.spec, toy.integrand, 1000, 1)

    def test_non_finite_integrand(self, toy):
        g = IntegrandHandle(name="blow-up", func=lambda l, x: np.full(x.shape[0], np.inf))
        with pytest.raises(NumericalError):
            estimate_rqmc_plain(toy.spec, g, 64, 1)

    def test_unknown_estimator(self, toy):
        with pytest.raises(DomainError):
            estimator_closure("qmc", toy.spec, toy.integrand, 64)


class TestPerStratum:
    def test_single_stratum_is_net_average(self):
        spec = shifted_normals([1.0], [0.5])
        g = IntegrandHandle(name="square", func=lambda l, x: x[:, 0] ** 2)
        estimate = estimate_rqmc_per_stratum(spec, g, [64], 17)
        u = scrambled_sobol(1, 6, derive_seed(17, TAG_STRATUM, 0))
        assert estimate.value == pytest.approx(np.mean(transform(spec, 0, u)[:, 0] ** 2))

    def test_sizes_must_match_strata(self, toy):
        with pytest.raises(DomainError):
            estimate_rqmc_per_stratum(toy.spec, toy.integrand, [64, 64], 1)

    def test_sizes_must_be_powers_of_two(self):
        spec = shifted_normals([0.5, 0.5], [0.0, 1.0])
        with pytest.raises(DomainError):
            estimate_rqmc_per_stratum(spec, IntegrandHandle(name="x", func=lambda l, x: x[:, 0]), [6, 2], 1)


class TestUnbiasedness:
    @pytest.mark.parametrize("name", ESTIMATOR_NAMES)
    def test_replicate_mean_near_reference(self, toy, name):
        report = replicate_variance(estimator_closure(name, toy.spec, toy.integrand, 256, rho=3.0), 40, 2024, name)
        reference = toy.reference_mean()
        assert abs(report.mean - reference) <= 4 * report.standard_error + 1e-12

    def test_monte_carlo_variance_matches_theory(self, toy):
        n = 1 << 10
        report = replicate_variance(estimator_closure("mc", toy.spec, toy.integrand, n), 500, 7, "mc")
        mu = toy.reference_mean()
        sigma2 = toy_second_moment() - mu * mu
        assert 0.7 <= report.variance / (sigma2 / n) <= 1.4

    def test_rqmc_beats_monte_carlo(self, toy):
        n = 1 << 10
        mc = replicate_variance(estimator_closure("mc", toy.spec, toy.integrand, n), 30, 11, "mc")
        rqmc = replicate_variance(estimator_closure("rqmc_adj", toy.spec, toy.integrand, n), 30, 11, "rqmc_adj")
        assert rqmc.variance < mc.variance / 2


class TestMixtureImportanceSampling:
    SPEC = MixtureSpec(
        strata=[
            StratumSpec(weight=0.5, coordinates=[NormalSpec(mean=-1.0)]),
            StratumSpec(weight=0.5, coordinates=[NormalSpec(mean=1.0)]),
        ]
    )

    def components(self):
        return [lambda x, l=l: stratum_density(self.SPEC, l, x) for l in range(2)]

    @pytest.mark.parametrize("method", ["mc", "rqmc"])
    def test_second_moment_of_standard_normal(self, method):
        sampler = mixture_sampler(self.SPEC, method)

        def estimator(seed):
            return estimate_mixture_is(
                lambda x: x[:, 0] ** 2,
                lambda x: stats.norm.pdf(x[:, 0]),
                self.components(),
                self.SPEC.alpha,
                sampler,
                256,
                seed,
            )

        report = replicate_variance(estimator, 100, 31, f"is-{method}")
        assert abs(report.mean - 1.0) <= 4 * report.standard_error

    def test_vanishing_proposal(self):
        with pytest.raises(EvaluationError):
            estimate_mixture_is(
                lambda x: np.ones(x.shape[0]),
                lambda x: np.ones(x.shape[0]),
                [lambda x: np.zeros(x.shape[0])] * 2,
                self.SPEC.alpha,
                mixture_sampler(self.SPEC, "mc"),
                16,
                1,
            )

    def test_unknown_sampling_method(self):
        with pytest.raises(DomainError):
            mixture_sampler(self.SPEC, "halton")


class TestReplicateVariance:
    def test_deterministic(self, toy):
        estimator = estimator_closure("rqmc", toy.spec, toy.integrand, 128)
        first = replicate_variance(estimator, 10, 5, "rqmc")
        second = replicate_variance(estimator, 10, 5, "rqmc")
        assert first.estimates == second.estimates

    def test_independent_of_thread_count(self, toy):
        estimator = estimator_closure("rqmc_pow2", toy.spec, toy.integrand, 128, rho=3.0)
        serial = replicate_variance(estimator, 12, 5, "rqmc_pow2", threads=1)
        parallel = replicate_variance(estimator, 12, 5, "rqmc_pow2", threads=4)
        assert serial.estimates == parallel.estimates
        assert serial.variance == parallel.variance

    def test_counts_and_size(self, toy):
        report = replicate_variance(estimator_closure("mc", toy.spec, toy.integrand, 100), 3, 1, "mc")
        assert report.n == 100 and report.replicates == 3
        assert all(sum(row) == 100 for row in report.counts)

    def test_plain_floats(self):
        report = replicate_variance(lambda seed: float(seed % 7), 5, 3, "floats", n=1)
        assert report.counts == [] and report.variance >= 0.0

    def test_needs_two_replicates(self, toy):
        with pytest.raises(DomainError):
            replicate_variance(lambda seed: 1.0, 1, 3)


class TestSlopeFit:
    def test_exact_power_law(self):
        pairs = [(2.0 ** m, 5.0 * 2.0 ** (-2 * m)) for m in range(3, 10)]
        assert fit_log2_slope(pairs) == pytest.approx(-2.0)

    def test_needs_three_points(self):
        with pytest.raises(DomainError):
            fit_log2_slope([(8, 1.0), (16, 0.5)])

    def test_rejects_zero_variance(self):
        with pytest.raises(DomainError):
            fit_log2_slope([(8, 1.0), (16, 0.0), (32, 0.1)])


class TestCorrelations:
    def test_shapes_and_range(self, toy):
        correlations, between = stratum_mean_correlations(
            toy.spec, toy.integrand, AllocationRule(rho=3.0), 256, 12, 4
        )
        assert isinstance(correlations, pd.DataFrame)
        assert correlations.shape == (8, 8)
        assert -1.0 <= between <= 1.0

    def test_needs_three_replicates(self, toy):
        with pytest.raises(DomainError):
            stratum_mean_correlations(toy.spec, toy.integrand, AllocationRule(rho=3.0), 256, 2, 4)
