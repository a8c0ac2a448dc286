"""
Allocation service - sampling fractions, integer and power-of-two sample
sizes, inefficiency of a misjudged rate, minimax designs and the catalogue
of dyadic partitions of unity.

Strata are indexed from 0. Fractions are returned in stratum order; the
interval order used by the selector (non-increasing fractions) is carried by
AllocationPlan.interval_order.
"""
import itertools
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from mixqmc.config import get_settings
from mixqmc.exceptions import CapabilityError, DomainError, InfeasibleError
from mixqmc.schemas.allocation import (
    AllocationPlan,
    AllocationRule,
    BruteForceMinimaxResult,
    MinimaxGammaResult,
    PartitionCatalogue,
)

logger = logging.getLogger(__name__)

ALPHA_TOLERANCE = 1e-12
MINIMAX_TIE_TOLERANCE = 1e-12


def _check_alpha(alpha: Sequence[float]) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise DomainError("mixture weights must be a non-empty vector")
    if np.any(a <= 0) or np.any(~np.isfinite(a)):
        raise DomainError("mixture weights must be positive")
    if abs(math.fsum(a) - 1.0) > ALPHA_TOLERANCE:
        raise DomainError(f"mixture weights sum to {math.fsum(a)!r}, not 1")
    return a


def _interval_order(beta: Sequence[float]) -> List[int]:
    """Strata sorted by non-increasing fraction, ties by lowest index."""
    return [int(l) for l in np.argsort(-np.asarray(beta, dtype=float), kind="stable")]


def _plan(
    alpha: np.ndarray,
    xi: np.ndarray,
    sizes: Sequence[int],
    rule: Optional[AllocationRule],
    power_of_two: bool = False,
    doubling_steps: Optional[int] = None,
) -> AllocationPlan:
    n = int(sum(sizes))
    beta = [size / n for size in sizes]
    return AllocationPlan(
        n=n,
        alpha=alpha.tolist(),
        xi=[float(v) for v in xi],
        beta=beta,
        sizes=[int(size) for size in sizes],
        weights=[float(a / b) for a, b in zip(alpha, beta)],
        rule=rule,
        power_of_two=power_of_two,
        interval_order=_interval_order(beta),
        doubling_steps=doubling_steps,
    )


def ideal_fractions(alpha: Sequence[float], rule: AllocationRule) -> np.ndarray:
    """
    Unrounded sampling fractions xi.

    xi_l is proportional to w_l^(2 / (rho_l + 1 + ansatz)) with
    w_l = alpha_l (tau_l / c_l)^(1/2) when variance constants or costs are
    given, else w_l = alpha_l. An infinite rate gives equal fractions.

    Raises:
        DomainError: invalid weights, or variance constants that are all zero
    """
    a = _check_alpha(alpha)
    L = a.size
    try:
        rates = np.asarray(rule.rates(L), dtype=float)
    except ValueError as exc:
        raise DomainError(str(exc))

    w = a.copy()
    if rule.tau is not None or rule.costs is not None:
        tau = np.ones(L) if rule.tau is None else np.asarray(rule.tau, dtype=float)
        costs = np.ones(L) if rule.costs is None else np.asarray(rule.costs, dtype=float)
        if tau.size != L or costs.size != L:
            raise DomainError(f"variance constants and costs need {L} entries")
        if not np.any(tau > 0):
            raise DomainError("variance constants are all zero")
        w = a * np.sqrt(tau / costs)

    exponents = np.where(np.isinf(rates), 0.0, 2.0 / (rates + 1.0 + rule.ansatz))
    raw = np.where(w > 0, w ** exponents, 0.0)
    return raw / raw.sum()


def integer_allocation(alpha: Sequence[float], rule: AllocationRule, n: int) -> AllocationPlan:
    """
    Integer sample sizes summing to n, nearly proportional to xi.

    Sizes start at max(1, floor(n xi_l)). Missing samples go one at a time to
    the stratum furthest below n xi_l; surplus created by the floor of one is
    taken from the stratum furthest above it. Ties go to the lowest index.

    Raises:
        InfeasibleError: n < L
    """
    a = _check_alpha(alpha)
    L = a.size
    if n < L:
        raise InfeasibleError(f"n = {n} is smaller than the number of strata {L}")

    xi = ideal_fractions(a, rule)
    target = n * xi
    sizes = np.maximum(1, np.floor(target)).astype(np.int64)
    while sizes.sum() < n:
        sizes[int(np.argmax(target - sizes))] += 1
    while sizes.sum() > n:
        excess = np.where(sizes > 1, sizes - target, -np.inf)
        sizes[int(np.argmax(excess))] -= 1

    plan = _plan(a, xi, sizes.tolist(), rule)
    logger.debug(f"Integer allocation n={n}: {plan.sizes}")
    return plan


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def forward_power_of_two(alpha: Sequence[float], rule: AllocationRule, n: int) -> AllocationPlan:
    """
    Forward stratified allocation with n_l = 2^m_l.

    Start with one sample per stratum; while budget remains, double the
    eligible stratum (2^m_l <= remaining budget) with the largest
    xi_l / 2^m_l. An eligible stratum always exists because every size
    divides the remaining budget.

    Raises:
        InfeasibleError: n not a power of two, or n < L
    """
    a = _check_alpha(alpha)
    L = a.size
    if not _is_power_of_two(n):
        raise InfeasibleError(f"n = {n} is not a power of two")
    if n < L:
        raise InfeasibleError(f"n = {n} is smaller than the number of strata {L}")

    xi = ideal_fractions(a, rule)
    sizes = np.ones(L, dtype=np.int64)
    remaining = n - L
    steps = 0
    while remaining > 0:
        eligible = sizes <= remaining
        scores = np.where(eligible, xi / sizes, -np.inf)
        l = int(np.argmax(scores))
        remaining -= int(sizes[l])
        sizes[l] *= 2
        steps += 1

    plan = _plan(a, xi, sizes.tolist(), rule, power_of_two=True, doubling_steps=steps)
    logger.debug(f"Power-of-two allocation n={n}: {plan.sizes} after {steps} doublings")
    return plan


def plan_from_sizes(alpha: Sequence[float], sizes: Sequence[int]) -> AllocationPlan:
    """Plan for fixed sizes; xi is reported as the realized fractions."""
    a = _check_alpha(alpha)
    if len(sizes) != a.size:
        raise DomainError(f"expected {a.size} sizes, got {len(sizes)}")
    n = sum(sizes)
    pow2 = all(size >= 1 and size & (size - 1) == 0 for size in sizes)
    return _plan(a, np.asarray(sizes, dtype=float) / n, sizes, None, power_of_two=pow2)


def plan_allocation(alpha: Sequence[float], rule: AllocationRule, n: int) -> AllocationPlan:
    """Power-of-two or general integer plan, as the rule asks."""
    if rule.power_of_two:
        return forward_power_of_two(alpha, rule, n)
    return integer_allocation(alpha, rule, n)


def _check_rates(*rates: float) -> None:
    for r in rates:
        if math.isnan(r) or r < 1:
            raise DomainError(f"rates must be >= 1 (got {r})")


def inefficiency_I0(gamma: float, rho: float, alpha: Sequence[float]) -> float:
    """
    MSE ratio of designing with rate gamma when the true rate is rho,
    for uncorrelated stratum estimates. At least 1, equal to 1 at gamma = rho.
    """
    a = _check_alpha(alpha)
    _check_rates(gamma, rho)
    if math.isinf(rho):
        raise DomainError("the true rate must be finite")
    design = 2.0 / (gamma + 1.0)
    return float(
        np.sum(a ** (2.0 - rho * design))
        * np.sum(a ** design) ** rho
        / np.sum(a ** (2.0 / (rho + 1.0))) ** (rho + 1.0)
    )


def inefficiency_I1(gamma: float, rho: float, alpha: Sequence[float]) -> float:
    """Squared-error inefficiency for perfectly correlated stratum estimates."""
    a = _check_alpha(alpha)
    _check_rates(gamma, rho)
    if math.isinf(rho):
        raise DomainError("the true rate must be finite")
    design = 2.0 / (gamma + 2.0)
    return float(
        np.sum(a ** (1.0 - rho * design / 2.0)) ** 2
        * np.sum(a ** design) ** rho
        / np.sum(a ** (2.0 / (rho + 2.0))) ** (rho + 2.0)
    )


def _inefficiency(ansatz: int):
    return inefficiency_I1 if ansatz == 1 else inefficiency_I0


def inefficiency_table(
    alpha: Sequence[float],
    gammas: Sequence[float],
    rhos: Sequence[float],
    ansatz: int = 0,
) -> pd.DataFrame:
    """Matrix of I_a(gamma | rho): one row per design rate, one column per true rate."""
    if len(gammas) == 0 or len(rhos) == 0:
        raise DomainError("rate grids must not be empty")
    measure = _inefficiency(ansatz)
    values = [[measure(g, r, alpha) for r in rhos] for g in gammas]
    return pd.DataFrame(
        values,
        index=pd.Index([float(g) for g in gammas], name="gamma"),
        columns=pd.Index([float(r) for r in rhos], name="rho"),
    )


def rate_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid lo, lo + step, ..., hi (rounded to absorb float drift)."""
    if step <= 0 or lo > hi or lo < 1:
        raise DomainError(f"empty rate grid [{lo}, {hi}] with step {step}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def minimax_gamma(
    alpha: Sequence[float],
    gamma_range: Tuple[float, float] = (1.0, 3.0),
    rho_range: Tuple[float, float] = (1.0, 3.0),
    step: Optional[float] = None,
    ansatz: int = 0,
) -> MinimaxGammaResult:
    """
    Cautious design rate: argmin over gamma of max over rho of I(gamma | rho).

    Both rates are scanned on the same grid, interior rho included, since the
    worst true rate is not always an endpoint. Ties go to the smallest gamma.
    """
    step = step or get_settings().minimax_grid_step
    gammas = rate_grid(gamma_range[0], gamma_range[1], step)
    rhos = rate_grid(rho_range[0], rho_range[1], step)
    table = inefficiency_table(alpha, gammas, rhos, ansatz).to_numpy()

    worst = table.max(axis=1)
    best = worst.min()
    g = int(np.flatnonzero(worst <= best + MINIMAX_TIE_TOLERANCE)[0])
    result = MinimaxGammaResult(
        gamma0=float(gammas[g]),
        max_inefficiency=float(worst[g]),
        worst_rho=float(rhos[int(np.argmax(table[g]))]),
        ansatz=ansatz,
    )
    logger.info(f"Minimax design rate {result.gamma0} with worst-case inefficiency {result.max_inefficiency:.6f}")
    return result


def _partitions(
    prefix: List[int], smallest: int, remaining: int, parts: int, depth: int
) -> Iterator[List[int]]:
    """Non-decreasing exponent vectors; remaining is a numerator over 2^depth."""
    if parts == 0:
        if remaining == 0:
            yield list(prefix)
        return
    if remaining < parts:
        return
    for kappa in range(smallest, depth + 1):
        value = 1 << (depth - kappa)
        if value > remaining:
            continue
        if value * parts < remaining:
            break
        prefix.append(kappa)
        yield from _partitions(prefix, kappa, remaining - value, parts - 1, depth)
        prefix.pop()


def enumerate_partitions(L: int) -> PartitionCatalogue:
    """
    All ways to write 1 as a sum of L negative powers of two.

    Each partition is a non-decreasing exponent vector kappa (beta_l = 2^-kappa_l,
    so beta is non-increasing), found by depth-first search on integer
    numerators over 2^(L-1).

    Raises:
        CapabilityError: L outside [2, partition_max_strata]
    """
    upper = get_settings().partition_max_strata
    if not 2 <= L <= upper:
        raise CapabilityError(f"partition enumeration supports 2 <= L <= {upper} (got {L})")
    depth = L - 1
    kappas = list(_partitions([], 1, 1 << depth, L, depth))
    logger.debug(f"Found {len(kappas)} dyadic partitions of unity into {L} parts")
    return PartitionCatalogue(strata=L, kappas=kappas)


def minimax_allocation(N: int, L: int) -> List[int]:
    """Nearly equal sizes: r = N mod L strata get floor(N/L) + 1, the rest floor(N/L)."""
    if L < 1 or N < L:
        raise InfeasibleError(f"cannot give {L} strata at least one of {N} samples")
    q, r = divmod(N, L)
    return [q + 1] * r + [q] * (L - r)


def minimax_allocation_pow2(n: int, L: int, alpha: Optional[Sequence[float]] = None) -> AllocationPlan:
    """
    Most nearly equal power-of-two allocation.

    With r = ceil(log2 L) and s = 2^r - L, s strata get 2^(1-r) of the points
    and the other L - s get 2^-r. The larger shares go to the first s strata
    (the most probable ones when alpha is sorted).

    Raises:
        InfeasibleError: n not a power of two or below 2^r
    """
    if L < 1:
        raise InfeasibleError("at least one stratum is required")
    r = (L - 1).bit_length()
    s = (1 << r) - L
    if not _is_power_of_two(n) or n < (1 << r):
        raise InfeasibleError(f"n = {n} must be a power of two of at least 2^{r}")
    a = _check_alpha(alpha) if alpha is not None else np.full(L, 1.0 / L)
    if a.size != L:
        raise DomainError(f"expected {L} mixture weights, got {a.size}")

    sizes = ([n >> (r - 1)] * s if s else []) + [n >> r] * (L - s)
    xi = np.asarray(sizes, dtype=float) / n
    return _plan(a, xi, sizes, None, power_of_two=True)


def suboptimality_ratio(
    ansatz: int,
    n: Sequence[int],
    n_tilde: Sequence[int],
    tau: Sequence[float],
    alpha: Sequence[float],
    rho: float,
) -> float:
    """
    R_a(n | n~; tau): variance (ansatz 0) or correlated error bound (ansatz 1)
    of allocation n relative to n~.
    """
    a = np.asarray(alpha, dtype=float)
    t = np.asarray(tau, dtype=float)
    sizes = np.asarray(n, dtype=float)
    other = np.asarray(n_tilde, dtype=float)
    if not (a.size == t.size == sizes.size == other.size):
        raise DomainError("alpha, tau and both allocations must have the same length")
    if np.any(t < 0) or not np.any(t > 0):
        raise DomainError("variance constants must be non-negative and not all zero")
    if np.any(sizes < 1) or np.any(other < 1):
        raise DomainError("allocations need at least one sample per stratum")
    _check_rates(rho)

    if ansatz == 1:
        return float(np.sum(a * np.sqrt(t) * sizes ** (-rho / 2)) / np.sum(a * np.sqrt(t) * other ** (-rho / 2)))
    return float(np.sum(a ** 2 * t * sizes ** -rho) / np.sum(a ** 2 * t * other ** -rho))


def _positive_compositions(N: int, L: int) -> np.ndarray:
    rows = []
    for cuts in itertools.combinations(range(1, N), L - 1):
        edges = (0,) + cuts + (N,)
        rows.append([edges[i + 1] - edges[i] for i in range(L)])
    return np.array(rows, dtype=float)


def brute_force_minimax(N: int, L: int, rho: float, ansatz: int = 0) -> BruteForceMinimaxResult:
    """
    Exhaustive min over n, max over n~ and tau of R_a(n | n~; tau).

    A ratio of positive combinations in tau peaks at a single-stratum tau, so
    the inner maximum is max over n~ and l of (n~_l / n_l)^rho (ansatz 0) or
    its square root (ansatz 1). Among optimal allocations the most balanced
    one (smallest non-increasing rearrangement) is reported.

    Raises:
        CapabilityError: N or L above the configured enumeration bounds
        InfeasibleError: N < L
    """
    settings = get_settings()
    if N > settings.brute_force_max_n or L > settings.brute_force_max_strata:
        raise CapabilityError(
            f"enumeration supports N <= {settings.brute_force_max_n} and L <= {settings.brute_force_max_strata}"
        )
    if L < 1 or N < L:
        raise InfeasibleError(f"cannot give {L} strata at least one of {N} samples")
    _check_rates(rho)

    compositions = _positive_compositions(N, L)
    power = rho / 2.0 if ansatz == 1 else rho
    ratios = (compositions[None, :, :] / compositions[:, None, :]) ** power
    worst = ratios.max(axis=(1, 2))
    best = worst.min()
    optimal = compositions[worst <= best * (1.0 + MINIMAX_TIE_TOLERANCE)]
    candidates = sorted(tuple(int(v) for v in sorted(row, reverse=True)) for row in optimal)
    return BruteForceMinimaxResult(
        allocation=list(candidates[0]),
        worst_ratio=float(best),
        optimal_count=len(optimal),
    )
