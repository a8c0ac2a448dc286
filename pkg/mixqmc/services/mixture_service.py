"""
Mixture service - stratum selection, importance weights and the quantile
transforms that turn uniforms into draws from each stratum.
"""
import logging
import math
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import special, stats

from mixqmc.config import get_settings
from mixqmc.exceptions import CapabilityError, ContractError, DomainError, ParseError
from mixqmc.schemas.mixture import (
    FrechetSpec,
    GammaSpec,
    IntegrandHandle,
    MixtureSpec,
    NormalSpec,
    ShiftedNormalSpec,
    StratumSelector,
    UniformSpec,
)

logger = logging.getLogger(__name__)

U_MIN = 2.0 ** -53
U_MAX = 1.0 - 2.0 ** -53

SUM_TOLERANCE = 1e-12


def build_selector(beta: Sequence[float], strata: Optional[Sequence[int]] = None) -> StratumSelector:
    """
    Cumulative bounds B_0 = 0 < B_1 < ... < B_L = 1 for sorted fractions.

    Args:
        beta: Fractions, positive, non-increasing, summing to 1
        strata: Stratum owning each interval (default: identity)

    Raises:
        ContractError: unsorted, non-positive or non-summing fractions
    """
    beta = [float(b) for b in beta]
    if not beta or any(b <= 0 for b in beta):
        raise ContractError("fractions must be positive")
    if any(beta[i] < beta[i + 1] for i in range(len(beta) - 1)):
        raise ContractError(f"fractions {beta} are not in non-increasing order")
    if abs(math.fsum(beta) - 1.0) > SUM_TOLERANCE:
        raise ContractError(f"fractions sum to {math.fsum(beta)!r}, not 1")

    owners = list(range(len(beta))) if strata is None else [int(l) for l in strata]
    if sorted(owners) != list(range(len(beta))):
        raise ContractError("strata must be a permutation of the interval indices")

    bounds = [0.0]
    for b in beta[:-1]:
        bounds.append(bounds[-1] + b)
    bounds.append(1.0)
    return StratumSelector(beta=beta, bounds=bounds, strata=owners)


def select_strata(selector: StratumSelector, v: np.ndarray) -> np.ndarray:
    """Vectorized stratum lookup: B_{l-1} <= v < B_l, with v = 1 in the last interval."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0.0) or np.any(v > 1.0) or np.any(np.isnan(v)):
        raise DomainError("selector input must lie in [0, 1]")
    interval = np.searchsorted(np.asarray(selector.bounds[1:-1]), v, side="right")
    return np.asarray(selector.strata, dtype=np.int64)[interval]


def select_stratum(selector: StratumSelector, v: float) -> int:
    """Stratum of one first-coordinate value v in [0, 1]."""
    return int(select_strata(selector, np.array([v]))[0])


def weight(alpha: Union[MixtureSpec, Sequence[float]], beta: Sequence[float], stratum: int) -> float:
    """Importance weight omega_l = alpha_l / beta_l."""
    if isinstance(alpha, MixtureSpec):
        alpha = alpha.alpha
    return float(alpha[stratum]) / float(beta[stratum])


def clamp_uniform(u: np.ndarray) -> np.ndarray:
    """Validate u in [0, 1] and nudge it into [2^-53, 1 - 2^-53]."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0) or np.any(u > 1.0) or np.any(np.isnan(u)):
        raise DomainError("quantile argument must lie in [0, 1]")
    return np.clip(u, U_MIN, U_MAX)


def _gamma_quantile(shape: float, u: np.ndarray) -> np.ndarray:
    """Inverse regularized lower incomplete gamma, polished by Newton steps."""
    x = special.gammaincinv(shape, u)
    log_norm = special.gammaln(shape)
    for _ in range(2):
        positive = x > 0
        log_pdf = np.where(positive, (shape - 1.0) * np.log(np.where(positive, x, 1.0)) - x - log_norm, -np.inf)
        pdf = np.exp(log_pdf)
        step = np.where(pdf > 0, (special.gammainc(shape, x) - u) / np.where(pdf > 0, pdf, 1.0), 0.0)
        x = np.where(positive, np.maximum(x - step, x / 2.0), x)
    return x


def quantile(dist, u):
    """
    Inverse CDF of one coordinate distribution, elementwise in u.

    u is clamped to [2^-53, 1 - 2^-53] first so that endpoints produced by a
    scrambled net never reach the unbounded tails.
    """
    scalar = np.ndim(u) == 0
    u = clamp_uniform(u)
    if isinstance(dist, NormalSpec):
        x = dist.mean + dist.sd * special.ndtri(u)
    elif isinstance(dist, ShiftedNormalSpec):
        x = dist.theta + special.ndtri(u)
    elif isinstance(dist, FrechetSpec):
        x = dist.scale * (-np.log(u)) ** (-1.0 / dist.shape)
    elif isinstance(dist, GammaSpec):
        x = dist.scale * _gamma_quantile(dist.shape, u)
    elif isinstance(dist, UniformSpec):
        x = dist.lo + (dist.hi - dist.lo) * u
    else:
        raise DomainError(f"unsupported distribution {dist!r}")
    return float(x) if scalar else x


def frozen(dist):
    """The scipy.stats frozen distribution matching a DistributionSpec."""
    if isinstance(dist, NormalSpec):
        return stats.norm(loc=dist.mean, scale=dist.sd)
    if isinstance(dist, ShiftedNormalSpec):
        return stats.norm(loc=dist.theta, scale=1.0)
    if isinstance(dist, FrechetSpec):
        return stats.invweibull(c=dist.shape, scale=dist.scale)
    if isinstance(dist, GammaSpec):
        return stats.gamma(a=dist.shape, scale=dist.scale)
    if isinstance(dist, UniformSpec):
        return stats.uniform(loc=dist.lo, scale=dist.hi - dist.lo)
    raise DomainError(f"unsupported distribution {dist!r}")


def cdf(dist, x):
    return frozen(dist).cdf(x)


def density(dist, x):
    return frozen(dist).pdf(x)


def stratum_density(spec: MixtureSpec, stratum: int, x: np.ndarray) -> np.ndarray:
    """p_l(x) for a batch x of shape (k, s): product of the coordinate densities."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    p = np.ones(x.shape[0])
    for j, dist in enumerate(spec.strata[stratum].coordinates):
        p = p * density(dist, x[:, j])
    return p


def mixture_density(spec: MixtureSpec, x: np.ndarray) -> np.ndarray:
    """sum_l alpha_l p_l(x)."""
    return sum(a * stratum_density(spec, l, x) for l, a in enumerate(spec.alpha))


def transform(spec: MixtureSpec, stratum: int, u: np.ndarray) -> np.ndarray:
    """
    Map uniforms u (shape (s,) or (k, s)) to draws of stratum l, one quantile
    per coordinate.
    """
    if not 0 <= stratum < spec.num_strata:
        raise DomainError(f"stratum {stratum} out of range for {spec.num_strata} strata")
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    u = np.atleast_2d(u)
    coordinates = spec.strata[stratum].coordinates
    if u.shape[1] != len(coordinates):
        raise DomainError(f"expected {len(coordinates)} uniforms per point, got {u.shape[1]}")
    x = np.column_stack([quantile(dist, u[:, j]) for j, dist in enumerate(coordinates)])
    return x[0] if single else x


def load_mixture_spec(path: Union[str, Path]) -> MixtureSpec:
    """
    Read a mixture specification file (JSON): strata with a weight and a list
    of coordinate records {kind, params}, plus an optional integrand name.

    Raises:
        ParseError: the file cannot be read
        pydantic.ValidationError: malformed JSON or an invalid specification
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read mixture file {path}: {exc.strerror}")
    spec = MixtureSpec.model_validate_json(text)
    logger.info(f"Loaded mixture {spec.name!r}: {spec.num_strata} strata, dimension {spec.dimension}")
    return spec


def quadrature_reference(spec: MixtureSpec, integrand: IntegrandHandle, epsrel: Optional[float] = None) -> float:
    """
    mu = sum_l alpha_l E_{P_l}[g_l(x)] by adaptive quadrature per stratum.

    Only one-dimensional strata are integrated generically; models with more
    coordinates supply their own reference.
    """
    if spec.dimension != 1:
        raise CapabilityError("generic quadrature reference supports one-dimensional strata only")
    epsrel = epsrel or get_settings().quadrature_epsrel
    total = 0.0
    for l, stratum in enumerate(spec.strata):
        def g(x, l=l):
            return float(integrand(l, np.array([[x]]))[0])

        mean = frozen(stratum.coordinates[0]).expect(g, epsrel=epsrel, epsabs=0.0, limit=200)
        logger.debug(f"Stratum {l} reference mean {mean!r}")
        total += stratum.weight * mean
    return float(total)
