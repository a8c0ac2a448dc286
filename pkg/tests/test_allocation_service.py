"""
Tests for sampling fractions, integer and power-of-two allocations,
inefficiencies, minimax designs and dyadic partitions.
"""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mixqmc.exceptions import CapabilityError, DomainError, InfeasibleError
from mixqmc.models.toy import TOY_ALPHA
from mixqmc.schemas.allocation import AllocationRule
from mixqmc.services.allocation_service import (
    brute_force_minimax,
    enumerate_partitions,
    forward_power_of_two,
    ideal_fractions,
    inefficiency_I0,
    inefficiency_I1,
    inefficiency_table,
    integer_allocation,
    minimax_allocation,
    minimax_allocation_pow2,
    minimax_gamma,
    plan_allocation,
    plan_from_sizes,
    rate_grid,
    suboptimality_ratio,
)

# exponent vectors of the sixteen partitions of unity into eight parts
EIGHT_PART_KAPPAS = [
    [1, 2, 3, 4, 5, 6, 7, 7],
    [1, 2, 3, 4, 6, 6, 6, 6],
    [1, 2, 3, 5, 5, 5, 6, 6],
    [1, 2, 4, 4, 4, 5, 6, 6],
    [1, 2, 4, 4, 5, 5, 5, 5],
    [1, 3, 3, 3, 4, 5, 6, 6],
    [1, 3, 3, 3, 5, 5, 5, 5],
    [1, 3, 3, 4, 4, 4, 5, 5],
    [1, 3, 4, 4, 4, 4, 4, 4],
    [2, 2, 2, 3, 4, 5, 6, 6],
    [2, 2, 2, 3, 5, 5, 5, 5],
    [2, 2, 2, 4, 4, 4, 5, 5],
    [2, 2, 3, 3, 3, 4, 5, 5],
    [2, 2, 3, 3, 4, 4, 4, 4],
    [2, 3, 3, 3, 3, 3, 4, 4],
    [3, 3, 3, 3, 3, 3, 3, 3],
]


@st.composite
def weights(draw, min_size=2, max_size=6):
    raw = draw(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=min_size, max_size=max_size))
    a = np.asarray(raw) / math.fsum(raw)
    a[-1] = 1.0 - math.fsum(a[:-1])
    assume(a[-1] > 0)
    return a.tolist()


def rule(rho=2.0, ansatz=0, **kwargs) -> AllocationRule:
    return AllocationRule(rho=rho, ansatz=ansatz, **kwargs)


class TestIdealFractions:
    def test_proportional_at_rate_one(self):
        np.testing.assert_allclose(ideal_fractions([0.5, 0.25, 0.25], rule(1.0)), [0.5, 0.25, 0.25])

    def test_square_root_at_rate_three(self):
        np.testing.assert_allclose(ideal_fractions([0.9, 0.1], rule(3.0)), [0.75, 0.25])

    def test_infinite_rate_is_equal(self):
        np.testing.assert_allclose(ideal_fractions(TOY_ALPHA, rule(math.inf)), np.full(8, 1 / 8))

    def test_correlated_ansatz_uses_rate_plus_two(self):
        np.testing.assert_allclose(
            ideal_fractions([0.9, 0.1], rule(2.0, ansatz=1)),
            ideal_fractions([0.9, 0.1], rule(3.0, ansatz=0)),
        )

    def test_per_stratum_rates(self):
        xi = ideal_fractions([0.5, 0.5], rule([1.0, 3.0]))
        np.testing.assert_allclose(xi, [0.5 / (0.5 + 0.5 ** 0.5), 0.5 ** 0.5 / (0.5 + 0.5 ** 0.5)])

    def test_variance_constants_and_costs(self):
        xi = ideal_fractions([0.5, 0.5], rule(1.0, tau=[4.0, 1.0], costs=[1.0, 1.0]))
        np.testing.assert_allclose(xi, [2 / 3, 1 / 3])

    def test_zero_weight_rejected(self):
        with pytest.raises(DomainError):
            ideal_fractions([1.0, 0.0], rule())

    def test_all_zero_variance_constants(self):
        with pytest.raises(DomainError):
            ideal_fractions([0.5, 0.5], rule(tau=[0.0, 0.0]))

    def test_rate_count_mismatch(self):
        with pytest.raises(DomainError):
            ideal_fractions([0.5, 0.5], rule([2.0, 2.0, 2.0]))


class TestIntegerAllocation:
    def test_exact_proportions(self):
        plan = integer_allocation([0.5, 0.25, 0.25], rule(1.0), 8)
        assert plan.sizes == [4, 2, 2]
        assert plan.fractions == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]

    def test_toy_weights(self):
        plan = integer_allocation(TOY_ALPHA, rule(2.0), 1024)
        assert sum(plan.sizes) == 1024
        assert min(plan.sizes) >= 1
        assert np.all(np.abs(np.asarray(plan.sizes) - 1024 * np.asarray(plan.xi)) < 1 + 1e-9)

    def test_floor_at_one(self):
        plan = integer_allocation([0.9999, 0.0001], rule(1.0), 4)
        assert plan.sizes == [3, 1]

    def test_weights_are_alpha_over_beta(self):
        plan = integer_allocation(TOY_ALPHA, rule(2.0), 256)
        np.testing.assert_allclose(plan.weights, np.asarray(TOY_ALPHA) / np.asarray(plan.beta))

    def test_too_small_budget(self):
        with pytest.raises(InfeasibleError):
            integer_allocation(TOY_ALPHA, rule(), 7)

    @settings(max_examples=100, deadline=None)
    @given(alpha=weights(max_size=8), n=st.integers(min_value=8, max_value=5000), rho=st.floats(1.0, 4.0))
    def test_sizes_sum_to_budget(self, alpha, n, rho):
        plan = integer_allocation(alpha, rule(rho), n)
        assert sum(plan.sizes) == n and min(plan.sizes) >= 1


class TestPowerOfTwo:
    def test_hand_trace(self):
        plan = forward_power_of_two([0.9, 0.05, 0.05], rule(3.0), 8)
        assert plan.sizes == [4, 2, 2]
        assert plan.doubling_steps == 4
        assert plan.exponents == [2, 1, 1]

    def test_budget_equals_strata(self):
        assert forward_power_of_two(TOY_ALPHA, rule(), 8).sizes == [1] * 8

    @pytest.mark.parametrize("m", [3, 6, 10])
    def test_equal_weights_split_evenly(self, m):
        plan = forward_power_of_two([1 / 8] * 8, rule(3.0), 1 << m)
        assert plan.sizes == [1 << (m - 3)] * 8

    def test_not_a_power_of_two(self):
        with pytest.raises(InfeasibleError):
            forward_power_of_two([0.5, 0.5], rule(), 12)

    def test_interval_order_is_non_increasing(self):
        plan = forward_power_of_two([0.05, 0.9, 0.05], rule(3.0), 8)
        assert plan.sizes == [2, 4, 2]
        assert plan.interval_order == [1, 0, 2]
        assert plan.sorted_beta == [0.5, 0.25, 0.25]

    def test_rule_selects_planner(self):
        assert plan_allocation(TOY_ALPHA, rule(3.0, power_of_two=True), 1024).power_of_two
        assert not plan_allocation(TOY_ALPHA, rule(3.0), 1000).power_of_two

    @settings(max_examples=200, deadline=None)
    @given(alpha=weights(max_size=10), m=st.integers(min_value=0, max_value=16), rho=st.floats(1.0, 5.0))
    def test_doubling_terminates_with_exact_budget(self, alpha, m, rho):
        n = 1 << m
        assume(n >= len(alpha))
        plan = forward_power_of_two(alpha, rule(rho), n)
        assert sum(plan.sizes) == n
        assert all(size >= 1 and size & (size - 1) == 0 for size in plan.sizes)
        assert plan.doubling_steps == sum(plan.exponents)


class TestInefficiency:
    def test_documented_value(self):
        a = np.array([0.75, 0.25])
        expected = np.sum(a ** (4 / 3)) * np.sum(a ** (2 / 3))
        assert inefficiency_I0(2.0, 1.0, a) == pytest.approx(expected, rel=1e-12)
        assert inefficiency_I0(2.0, 1.0, a) == pytest.approx(1.0254, abs=5e-5)

    @pytest.mark.parametrize("measure", [inefficiency_I0, inefficiency_I1])
    def test_equal_weights(self, measure):
        assert measure(1.0, 3.0, [0.25] * 4) == pytest.approx(1.0)

    @settings(max_examples=100, deadline=None)
    @given(alpha=weights(), gamma=st.floats(1.0, 5.0), rho=st.floats(1.0, 5.0))
    def test_matches_variance_ratio(self, alpha, gamma, rho):
        design = 1e6 * ideal_fractions(alpha, rule(gamma))
        best = 1e6 * ideal_fractions(alpha, rule(rho))
        tau = np.ones(len(alpha))
        assert inefficiency_I0(gamma, rho, alpha) == pytest.approx(
            suboptimality_ratio(0, design, best, tau, alpha, rho), rel=1e-9
        )

    @settings(max_examples=100, deadline=None)
    @given(alpha=weights(), gamma=st.floats(1.0, 5.0), rho=st.floats(1.0, 5.0))
    def test_correlated_matches_squared_error_ratio(self, alpha, gamma, rho):
        design = 1e6 * ideal_fractions(alpha, rule(gamma, ansatz=1))
        best = 1e6 * ideal_fractions(alpha, rule(rho, ansatz=1))
        tau = np.ones(len(alpha))
        assert inefficiency_I1(gamma, rho, alpha) == pytest.approx(
            suboptimality_ratio(1, design, best, tau, alpha, rho) ** 2, rel=1e-9
        )

    def test_correlated_documented_case(self):
        a = np.array([0.75, 0.25])
        expected = np.sum(a ** (1 - 0.2)) ** 2 * np.sum(a ** 0.4) / np.sum(a ** (2 / 3)) ** 3
        assert inefficiency_I1(3.0, 1.0, a) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(alpha=weights(), rho=st.floats(1.0, 5.0))
    def test_optimal_design_is_one(self, alpha, rho):
        assert inefficiency_I0(rho, rho, alpha) == pytest.approx(1.0, abs=1e-10)
        assert inefficiency_I1(rho, rho, alpha) == pytest.approx(1.0, abs=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(alpha=weights(), rho=st.floats(1.0, 5.0), g1=st.floats(1.0, 5.0), g2=st.floats(1.0, 5.0))
    def test_at_least_one_and_monotone_toward_rate(self, alpha, rho, g1, g2):
        far, near = (g1, g2) if abs(g1 - rho) >= abs(g2 - rho) else (g2, g1)
        assume((far - rho) * (near - rho) >= 0)
        assert inefficiency_I0(near, rho, alpha) >= 1.0 - 1e-10
        assert inefficiency_I0(far, rho, alpha) >= inefficiency_I0(near, rho, alpha) - 1e-10

    @settings(max_examples=200, deadline=None)
    @given(alpha=weights())
    def test_optimism_is_the_better_bet(self, alpha):
        assert inefficiency_I0(3.0, 2.0, alpha) <= inefficiency_I0(1.0, 2.0, alpha) + 1e-12

    def test_infinite_true_rate(self):
        with pytest.raises(DomainError):
            inefficiency_I0(2.0, math.inf, [0.5, 0.5])

    def test_table_layout(self):
        table = inefficiency_table(TOY_ALPHA, [1.0, 2.0], [1.0, 2.0, 3.0])
        assert table.shape == (2, 3)
        assert table.index.name == "gamma" and table.columns.name == "rho"
        assert table.loc[2.0, 2.0] == pytest.approx(1.0)

    def test_rate_grid(self):
        np.testing.assert_allclose(rate_grid(1.0, 3.0, 0.5), [1.0, 1.5, 2.0, 2.5, 3.0])
        assert len(rate_grid(1.0, 3.0, 0.01)) == 201

    def test_empty_rate_grid(self):
        with pytest.raises(DomainError):
            rate_grid(3.0, 1.0, 0.1)


class TestMinimaxGamma:
    def test_equal_weights_pick_range_minimum(self):
        result = minimax_gamma([0.25] * 4, step=0.1)
        assert result.gamma0 == 1.0
        assert result.max_inefficiency == pytest.approx(1.0)

    def test_toy_weights_against_grid_oracle(self):
        step = 0.05
        result = minimax_gamma(TOY_ALPHA, step=step)
        grid = rate_grid(1.0, 3.0, step)
        worst = [max(inefficiency_I0(g, r, TOY_ALPHA) for r in grid) for g in grid]
        assert result.max_inefficiency == pytest.approx(min(worst), rel=1e-12)
        assert result.gamma0 == pytest.approx(grid[int(np.argmin(worst))])
        assert 1.0 < result.gamma0 < 3.0

    def test_worst_rate_attains_maximum(self):
        result = minimax_gamma(TOY_ALPHA, step=0.1)
        assert inefficiency_I0(result.gamma0, result.worst_rho, TOY_ALPHA) == pytest.approx(result.max_inefficiency)

    def test_correlated_ansatz(self):
        result = minimax_gamma(TOY_ALPHA, step=0.1, ansatz=1)
        assert result.ansatz == 1 and result.max_inefficiency >= 1.0


class TestPartitions:
    @pytest.mark.parametrize(
        "L, count", [(2, 1), (3, 1), (4, 2), (5, 3), (6, 5), (7, 9), (8, 16), (9, 28), (10, 50)]
    )
    def test_counts(self, L, count):
        assert enumerate_partitions(L).count == count

    def test_three_parts(self):
        assert enumerate_partitions(3).fractions() == [[Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]]

    def test_four_parts(self):
        assert enumerate_partitions(4).kappas == [[1, 2, 3, 3], [2, 2, 2, 2]]

    def test_eight_parts(self):
        assert enumerate_partitions(8).kappas == EIGHT_PART_KAPPAS

    @pytest.mark.parametrize("L", [5, 9, 12])
    def test_every_partition_sums_to_one(self, L):
        for beta in enumerate_partitions(L).fractions():
            assert sum(beta) == 1
            assert beta == sorted(beta, reverse=True)

    @pytest.mark.parametrize("L", [1, 25])
    def test_out_of_range(self, L):
        with pytest.raises(CapabilityError):
            enumerate_partitions(L)


class TestMinimaxAllocation:
    @pytest.mark.parametrize(
        "N, L, expected", [(10, 3, [4, 3, 3]), (8, 8, [1] * 8), (12, 5, [3, 3, 2, 2, 2])]
    )
    def test_formula(self, N, L, expected):
        assert minimax_allocation(N, L) == expected

    def test_too_small_budget(self):
        with pytest.raises(InfeasibleError):
            minimax_allocation(3, 4)

    @pytest.mark.parametrize(
        "L, beta",
        [
            (5, [0.25, 0.25, 0.25, 0.125, 0.125]),
            (4, [0.25] * 4),
            (2, [0.5, 0.5]),
            (8, [0.125] * 8),
        ],
    )
    def test_power_of_two(self, L, beta):
        plan = minimax_allocation_pow2(64, L)
        assert plan.beta == beta
        assert plan.power_of_two

    def test_power_of_two_budget_too_small(self):
        with pytest.raises(InfeasibleError):
            minimax_allocation_pow2(4, 5)

    def test_power_of_two_keeps_weights(self):
        plan = minimax_allocation_pow2(32, 3, [0.6, 0.3, 0.1])
        assert plan.sizes == [16, 8, 8]
        np.testing.assert_allclose(plan.weights, [1.2, 1.2, 0.4])

    def test_plan_from_sizes(self):
        plan = plan_from_sizes([0.5, 0.3, 0.2], minimax_allocation(11, 3))
        assert plan.sizes == [4, 4, 3] and plan.n == 11
        assert not plan.power_of_two


class TestSuboptimality:
    def test_same_allocation_is_one(self):
        assert suboptimality_ratio(0, [4, 2, 2], [4, 2, 2], [1, 2, 3], [0.5, 0.25, 0.25], 2.0) == 1.0

    def test_single_stratum_constant(self):
        ratio = suboptimality_ratio(0, [2, 6], [6, 2], [1.0, 0.0], [0.5, 0.5], 2.0)
        assert ratio == pytest.approx(9.0)
        ratio = suboptimality_ratio(1, [2, 6], [6, 2], [1.0, 0.0], [0.5, 0.5], 2.0)
        assert ratio == pytest.approx(3.0)

    def test_zero_constants_rejected(self):
        with pytest.raises(DomainError):
            suboptimality_ratio(0, [1, 1], [1, 1], [0.0, 0.0], [0.5, 0.5], 2.0)


class TestBruteForce:
    def test_tie_goes_to_most_balanced(self):
        result = brute_force_minimax(11, 3, 2.0)
        assert result.allocation == [4, 4, 3]
        assert result.optimal_count > 3
        assert result.worst_ratio == pytest.approx((9 / 3) ** 2)

    @pytest.mark.parametrize("ansatz", [0, 1])
    @pytest.mark.parametrize("rho", [1.0, 2.0, 3.0])
    def test_agrees_with_formula(self, ansatz, rho):
        for L in range(1, 5):
            for N in range(L, 13):
                assert brute_force_minimax(N, L, rho, ansatz).allocation == minimax_allocation(N, L)

    def test_enumeration_bound(self):
        with pytest.raises(CapabilityError):
            brute_force_minimax(20, 3, 2.0)
