"""
Toy model: eight normal strata N(theta_l, 1) with very unequal weights and
the smooth integrand exp(-x^2) cos(x).
"""
import math

from mixqmc.models.base import MixtureModel
from mixqmc.models.integrands import get_integrand
from mixqmc.schemas.mixture import MixtureSpec, ShiftedNormalSpec, StratumSpec
from mixqmc.services.mixture_service import quadrature_reference

TOY_ALPHA = (0.50, 0.44, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01)
TOY_THETA = (0.7, 1.0, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0)


def toy_spec() -> MixtureSpec:
    return MixtureSpec(
        name="toy",
        integrand="gaussian_cosine",
        strata=[
            StratumSpec(weight=a, coordinates=[ShiftedNormalSpec(theta=theta)], label=f"theta={theta}")
            for a, theta in zip(TOY_ALPHA, TOY_THETA)
        ],
    )


def gaussian_cosine_mean(theta: float) -> float:
    """Closed form of E[exp(-X^2) cos X] for X ~ N(theta, 1)."""
    return math.exp(-theta * theta / 3.0 - 1.0 / 6.0) * math.cos(theta / 3.0) / math.sqrt(3.0)


def toy_model() -> MixtureModel:
    spec = toy_spec()
    integrand = get_integrand("gaussian_cosine")
    return MixtureModel(
        name="toy",
        spec=spec,
        integrand=integrand,
        reference=lambda: quadrature_reference(spec, integrand),
        adjusted_rho=2.0,
        pow2_rho=3.0,
        strata_rho=3.0,
    )
