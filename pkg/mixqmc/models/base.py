"""
Built-in model container: a mixture, its integrand, a reference mean and the
design rates each allocation-based estimator uses by default.
"""
from typing import Callable, Optional

from pydantic import BaseModel, ConfigDict, Field

from mixqmc.schemas.mixture import IntegrandHandle, MixtureSpec


class MixtureModel(BaseModel):
    """A mixture specification paired with the integrand studied on it."""

    name: str
    spec: MixtureSpec
    integrand: IntegrandHandle
    reference: Optional[Callable[[], float]] = Field(None, description="Lazy reference mean mu")
    adjusted_rho: float = Field(2.0, description="Design rate of the importance adjusted estimator")
    pow2_rho: float = Field(3.0, description="Design rate of the power-of-two allocations")
    strata_rho: float = Field(3.0, description="Design rate of the per-stratum estimator")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def reference_mean(self) -> Optional[float]:
        return self.reference() if self.reference is not None else None
