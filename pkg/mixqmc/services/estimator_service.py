"""
Estimator service - the mixture estimators and the replicate-variance engine.

The first coordinate of every point selects a stratum through the intervals
of a sorted fraction vector beta; the remaining s coordinates are mapped to a
draw of that stratum by its quantile transform. The conjoined estimators
average omega_l g(x_i) over all n points, so an empty stratum simply
contributes no terms.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from mixqmc.config import get_settings
from mixqmc.exceptions import DomainError, EvaluationError, NumericalError
from mixqmc.schemas.allocation import AllocationRule
from mixqmc.schemas.estimator import Estimate, EstimatorReport
from mixqmc.schemas.mixture import IntegrandHandle, MixtureSpec
from mixqmc.schemas.net import DirectionNumbers
from mixqmc.services.allocation_service import forward_power_of_two, integer_allocation
from mixqmc.services.mixture_service import build_selector, select_strata, transform
from mixqmc.services.net_service import monte_carlo_points, scrambled_sobol
from mixqmc.utils.seeding import TAG_REPLICATE, TAG_STRATUM, derive_seed

logger = logging.getLogger(__name__)

Sampler = Callable[[int, int], Tuple[np.ndarray, np.ndarray]]


def _log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise DomainError(f"RQMC sample sizes must be powers of two (got {n})")
    return n.bit_length() - 1


def _draw(spec: MixtureSpec, beta: Sequence[float], z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Strata and draws for points z of shape (n, s+1) under fractions beta (stratum order)."""
    order = np.argsort(-np.asarray(beta, dtype=float), kind="stable")
    selector = build_selector([beta[l] for l in order], strata=order.tolist())
    strata = select_strata(selector, z[:, 0])
    x = np.empty((z.shape[0], spec.dimension))
    for l in np.unique(strata):
        members = strata == l
        x[members] = transform(spec, int(l), z[members, 1:])
    return x, strata


def _conjoined(
    spec: MixtureSpec,
    g: IntegrandHandle,
    beta: Sequence[float],
    z: np.ndarray,
) -> Estimate:
    """(1/n) sum omega_{l(i)} g_{l(i)}(x_i) with omega_l = alpha_l / beta_l."""
    n = z.shape[0]
    L = spec.num_strata
    omega = spec.alpha / np.asarray(beta, dtype=float)
    x, strata = _draw(spec, beta, z)

    values = np.zeros(n)
    means = np.full(L, np.nan)
    for l in np.unique(strata):
        members = strata == l
        g_values = g(int(l), x[members])
        values[members] = omega[l] * g_values
        means[l] = g_values.mean()

    estimate = float(values.mean())
    if not math.isfinite(estimate):
        raise NumericalError(f"non-finite estimate from integrand {g.name!r} at n={n}")
    return Estimate(estimate, np.bincount(strata, minlength=L), means)


def _unit_points(spec: MixtureSpec, n: int, seed: int, kind: Optional[str], dirs: Optional[DirectionNumbers]) -> np.ndarray:
    return scrambled_sobol(spec.dimension + 1, _log2_exact(n), seed, kind, dirs)


def estimate_mc(spec: MixtureSpec, g: IntegrandHandle, n: int, seed: int) -> Estimate:
    """Plain Monte Carlo: i.i.d. uniforms, beta = alpha, unit weights."""
    z = monte_carlo_points(n, spec.dimension + 1, seed)
    return _conjoined(spec, g, spec.alpha, z)


def estimate_rqmc_plain(
    spec: MixtureSpec,
    g: IntegrandHandle,
    n: int,
    seed: int,
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> Estimate:
    """Scrambled Sobol' points in s+1 dimensions with beta = alpha."""
    return _conjoined(spec, g, spec.alpha, _unit_points(spec, n, seed, kind, dirs))


def estimate_rqmc_adjusted(
    spec: MixtureSpec,
    g: IntegrandHandle,
    rule: AllocationRule,
    n: int,
    seed: int,
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> Estimate:
    """Importance adjusted RQMC: beta from the integer allocation of the rule."""
    plan = integer_allocation(spec.alpha, rule.model_copy(update={"power_of_two": False}), n)
    return _conjoined(spec, g, plan.beta, _unit_points(spec, n, seed, kind, dirs))


def estimate_rqmc_pow2(
    spec: MixtureSpec,
    g: IntegrandHandle,
    rule: AllocationRule,
    n: int,
    seed: int,
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> Estimate:
    """
    Reweighted RQMC with power-of-two fractions from the forward allocation;
    the points of each stratum then form a scrambled net of their own.
    """
    plan = forward_power_of_two(spec.alpha, rule.model_copy(update={"power_of_two": True}), n)
    return _conjoined(spec, g, plan.beta, _unit_points(spec, n, seed, kind, dirs))


def estimate_rqmc_per_stratum(
    spec: MixtureSpec,
    g: IntegrandHandle,
    sizes: Sequence[int],
    seed: int,
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> Estimate:
    """sum_l alpha_l mu_l with an independent scrambled s-dimensional net per stratum."""
    if len(sizes) != spec.num_strata:
        raise DomainError(f"expected {spec.num_strata} stratum sizes, got {len(sizes)}")
    means = np.empty(spec.num_strata)
    for l, size in enumerate(sizes):
        u = scrambled_sobol(spec.dimension, _log2_exact(int(size)), derive_seed(seed, TAG_STRATUM, l), kind, dirs)
        means[l] = g(l, transform(spec, l, u)).mean()
    estimate = float(np.dot(spec.alpha, means))
    if not math.isfinite(estimate):
        raise NumericalError(f"non-finite per-stratum estimate from integrand {g.name!r}")
    return Estimate(estimate, np.asarray(sizes, dtype=np.int64), means)


def mixture_sampler(
    spec: MixtureSpec,
    method: str = "rqmc",
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> Sampler:
    """Sampler (n, seed) -> (draws, strata) from the mixture itself (beta = alpha)."""
    if method not in ("mc", "rqmc"):
        raise DomainError(f"unknown sampling method {method!r}")

    def sample(n: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        if method == "mc":
            z = monte_carlo_points(n, spec.dimension + 1, seed)
        else:
            z = _unit_points(spec, n, seed, kind, dirs)
        return _draw(spec, spec.alpha, z)

    return sample


def estimate_mixture_is(
    g: Callable[[np.ndarray], np.ndarray],
    target_density: Callable[[np.ndarray], np.ndarray],
    component_densities: Sequence[Callable[[np.ndarray], np.ndarray]],
    alpha: Sequence[float],
    sampler: Sampler,
    n: int,
    seed: int,
) -> Estimate:
    """
    Mixture importance sampling: (1/n) sum g(x_i) p(x_i) / sum_l alpha_l p_l(x_i).

    Raises:
        EvaluationError: the mixture density vanishes where g p does not
    """
    if len(component_densities) != len(alpha):
        raise DomainError("one component density is needed per mixture weight")
    x, strata = sampler(n, seed)
    numerator = np.asarray(g(x), dtype=float) * np.asarray(target_density(x), dtype=float)
    denominator = sum(a * np.asarray(p(x), dtype=float) for a, p in zip(alpha, component_densities))

    vanishing = denominator <= 0
    if np.any(vanishing & (numerator != 0)):
        i = int(np.flatnonzero(vanishing & (numerator != 0))[0])
        raise EvaluationError(f"mixture density is zero at sample {i} where g p = {numerator[i]!r}")
    ratio = np.where(vanishing, 0.0, numerator / np.where(vanishing, 1.0, denominator))
    estimate = float(ratio.mean())
    if not math.isfinite(estimate):
        raise NumericalError("non-finite importance sampling estimate")
    return Estimate(estimate, np.bincount(strata, minlength=len(alpha)))


def replicate_variance(
    estimator: Callable[[int], Union[Estimate, float]],
    R: int,
    master_seed: int,
    name: str = "estimator",
    n: Optional[int] = None,
    threads: Optional[int] = None,
) -> EstimatorReport:
    """
    Run R independently seeded replicates and report their mean and unbiased variance.

    Replicate r uses derive_seed(master_seed, TAG_REPLICATE, r), so the
    report does not depend on how replicates are scheduled across threads.
    """
    if R < 2:
        raise DomainError("at least two replicates are needed for a variance")
    threads = threads or get_settings().threads
    seeds = [derive_seed(master_seed, TAG_REPLICATE, r) for r in range(R)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(estimator, seeds))
    else:
        results = [estimator(seed) for seed in seeds]

    estimates = [float(r.value if isinstance(r, Estimate) else r) for r in results]
    counts = [r.counts.tolist() for r in results if isinstance(r, Estimate)]
    if n is None:
        n = int(sum(counts[0])) if counts else 1
    values = np.asarray(estimates)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"{name}: non-finite replicate estimate")

    report = EstimatorReport(
        name=name,
        n=n,
        estimates=estimates,
        mean=float(values.mean()),
        variance=float(values.var(ddof=1)),
        counts=counts,
        seed=master_seed,
    )
    logger.debug(f"{name} n={n}: mean={report.mean!r} variance={report.variance!r} over {R} replicates")
    return report


def fit_log2_slope(pairs: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log2(variance) against log2(n)."""
    if len(pairs) < 3:
        raise DomainError("a slope fit needs at least three (n, variance) pairs")
    n, variance = np.asarray(pairs, dtype=float).T
    if np.any(variance <= 0) or np.any(n <= 0):
        raise DomainError("sample sizes and variances must be positive for a log-log fit")
    slope, _ = np.polyfit(np.log2(n), np.log2(variance), 1)
    return float(slope)


def estimator_closure(
    name: str,
    spec: MixtureSpec,
    g: IntegrandHandle,
    n: int,
    rho: float = 2.0,
    ansatz: int = 0,
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> Callable[[int], Estimate]:
    """
    seed -> Estimate for one of mc, rqmc, rqmc_adj, rqmc_pow2, rqmc_strata at
    sample size n. Allocations are computed once, outside the replicate loop.
    """
    if name == "mc":
        return lambda seed: estimate_mc(spec, g, n, seed)
    if name == "rqmc":
        return lambda seed: estimate_rqmc_plain(spec, g, n, seed, kind, dirs)

    rule = AllocationRule(ansatz=ansatz, rho=rho)
    if name == "rqmc_adj":
        beta = integer_allocation(spec.alpha, rule, n).beta
    elif name in ("rqmc_pow2", "rqmc_strata"):
        plan = forward_power_of_two(spec.alpha, rule.model_copy(update={"power_of_two": True}), n)
        if name == "rqmc_strata":
            return lambda seed: estimate_rqmc_per_stratum(spec, g, plan.sizes, seed, kind, dirs)
        beta = plan.beta
    else:
        raise DomainError(f"unknown estimator {name!r}")

    m = _log2_exact(n)
    d = spec.dimension + 1
    return lambda seed: _conjoined(spec, g, beta, scrambled_sobol(d, m, seed, kind, dirs))


def stratum_mean_correlations(
    spec: MixtureSpec,
    g: IntegrandHandle,
    rule: AllocationRule,
    n: int,
    R: int,
    master_seed: int,
    kind: Optional[str] = None,
) -> Tuple[pd.DataFrame, float]:
    """
    Empirical correlations among the within-stratum means of the conjoined
    power-of-two estimator, and between the conjoined and per-stratum
    estimates at the same sizes. No sign is implied.
    """
    if R < 3:
        raise DomainError("correlations need at least three replicates")
    plan = forward_power_of_two(spec.alpha, rule.model_copy(update={"power_of_two": True}), n)
    m = _log2_exact(n)
    rows: List[np.ndarray] = []
    conjoined, separate = [], []
    for r in range(R):
        seed = derive_seed(master_seed, TAG_REPLICATE, r)
        joint = _conjoined(spec, g, plan.beta, scrambled_sobol(spec.dimension + 1, m, seed, kind))
        rows.append(joint.stratum_means)
        conjoined.append(joint.value)
        separate.append(estimate_rqmc_per_stratum(spec, g, plan.sizes, seed, kind).value)

    labels = [stratum.label or f"stratum {l}" for l, stratum in enumerate(spec.strata)]
    correlations = pd.DataFrame(np.vstack(rows), columns=labels).corr()
    between = float(np.corrcoef(conjoined, separate)[0, 1])
    logger.info(f"Correlation between conjoined and per-stratum estimates at n={n}: {between:.3f}")
    return correlations, between
