"""
Flood model: water depth of a river under a four-stratum mixture of nominal
and adverse input distributions.

Coordinates are (Q, K_s, Z_v, Z_m). With probability 0.95 all inputs are
nominal; Q alone is adverse with 0.02, K_s alone with 0.02 and both with 0.01.
"""
import logging
from typing import Optional

from scipy import integrate

from mixqmc.config import get_settings
from mixqmc.models.base import MixtureModel
from mixqmc.models.integrands import RIVER_LENGTH, RIVER_WIDTH, get_integrand
from mixqmc.schemas.mixture import FrechetSpec, GammaSpec, MixtureSpec, StratumSpec, UniformSpec
from mixqmc.services.mixture_service import frozen

logger = logging.getLogger(__name__)

FLOOD_ALPHA = (0.95, 0.02, 0.02, 0.01)

DISCHARGE_NOMINAL = FrechetSpec(shape=6.0, scale=1300.0)
DISCHARGE_ADVERSE = FrechetSpec(shape=6.0, scale=3900.0)
STRICKLER_NOMINAL = GammaSpec(shape=90.0, scale=1.0 / 3.0)
STRICKLER_ADVERSE = GammaSpec(shape=15.0, scale=1.0)
DOWNSTREAM_HEIGHT = UniformSpec(lo=49.0, hi=51.0)
UPSTREAM_HEIGHT = UniformSpec(lo=54.0, hi=56.0)

_STRATA = (
    ("nominal", DISCHARGE_NOMINAL, STRICKLER_NOMINAL),
    ("adverse Q", DISCHARGE_ADVERSE, STRICKLER_NOMINAL),
    ("adverse K_s", DISCHARGE_NOMINAL, STRICKLER_ADVERSE),
    ("adverse Q and K_s", DISCHARGE_ADVERSE, STRICKLER_ADVERSE),
)


def flood_spec() -> MixtureSpec:
    return MixtureSpec(
        name="flood",
        integrand="flood_depth",
        strata=[
            StratumSpec(
                weight=a,
                coordinates=[discharge, strickler, DOWNSTREAM_HEIGHT, UPSTREAM_HEIGHT],
                label=label,
            )
            for a, (label, discharge, strickler) in zip(FLOOD_ALPHA, _STRATA)
        ],
    )


def flood_reference(epsrel: Optional[float] = None) -> float:
    """
    E[H] from the product structure of H:

        E[H] = B^-0.6 L^0.3 E[Q^0.6] E[K_s^-0.6] E[(Z_m - Z_v)^-0.3]

    with each factor integrated numerically per stratum.
    """
    epsrel = epsrel or get_settings().quadrature_epsrel
    height, _ = integrate.dblquad(
        lambda zm, zv: 0.25 * (zm - zv) ** -0.3,
        DOWNSTREAM_HEIGHT.lo,
        DOWNSTREAM_HEIGHT.hi,
        UPSTREAM_HEIGHT.lo,
        UPSTREAM_HEIGHT.hi,
        epsrel=epsrel,
    )
    constant = RIVER_WIDTH ** -0.6 * RIVER_LENGTH ** 0.3 * height

    total = 0.0
    for a, (label, discharge, strickler) in zip(FLOOD_ALPHA, _STRATA):
        q_moment = frozen(discharge).expect(lambda q: q ** 0.6, epsrel=epsrel, limit=200)
        k_moment = frozen(strickler).expect(lambda k: k ** -0.6, epsrel=epsrel, limit=200)
        logger.debug(f"Flood stratum {label!r}: E[Q^0.6]={q_moment!r}, E[K_s^-0.6]={k_moment!r}")
        total += a * constant * q_moment * k_moment
    return float(total)


def flood_model() -> MixtureModel:
    return MixtureModel(
        name="flood",
        spec=flood_spec(),
        integrand=get_integrand("flood_depth"),
        reference=flood_reference,
        adjusted_rho=2.0,
        pow2_rho=2.0,
        strata_rho=2.0,
    )
