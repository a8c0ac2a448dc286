"""
Mixture schemas: coordinate distributions, strata, mixture specifications,
stratum selectors and integrand handles.
"""
import math
from typing import Annotated, Any, Callable, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class _DistributionBase(BaseModel):
    """Accepts either flat fields or the file layout {kind, params: {...}}."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="before")
    @classmethod
    def flatten_params(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("params"), dict):
            flat = {key: value for key, value in data.items() if key != "params"}
            flat.update(data["params"])
            return flat
        return data


class NormalSpec(_DistributionBase):
    kind: Literal["normal"] = "normal"
    mean: float = 0.0
    sd: float = Field(1.0, gt=0)


class ShiftedNormalSpec(_DistributionBase):
    """N(theta, 1)."""

    kind: Literal["shifted-normal"] = "shifted-normal"
    theta: float = 0.0


class FrechetSpec(_DistributionBase):
    """CDF exp(-(x / scale)^-shape) on x > 0."""

    kind: Literal["frechet"] = "frechet"
    shape: float = Field(..., gt=0)
    scale: float = Field(..., gt=0)


class GammaSpec(_DistributionBase):
    kind: Literal["gamma"] = "gamma"
    shape: float = Field(..., gt=0)
    scale: float = Field(..., gt=0)


class UniformSpec(_DistributionBase):
    kind: Literal["uniform"] = "uniform"
    lo: float
    hi: float

    @model_validator(mode="after")
    def check_bounds(self) -> "UniformSpec":
        if not self.lo < self.hi:
            raise ValueError("lo must be below hi")
        return self


DistributionSpec = Annotated[
    Union[NormalSpec, ShiftedNormalSpec, FrechetSpec, GammaSpec, UniformSpec],
    Field(discriminator="kind"),
]


class StratumSpec(BaseModel):
    """One mixture component: its weight and one distribution per input coordinate."""

    weight: float = Field(..., gt=0, le=1, description="Mixture probability alpha_l")
    coordinates: List[DistributionSpec] = Field(..., min_length=1, description="Independent coordinate distributions")
    label: Optional[str] = Field(None, description="Human-readable stratum name")

    model_config = ConfigDict(frozen=True)


class MixtureSpec(BaseModel):
    """Mixture of L strata sharing the same input dimension s."""

    name: str = Field("mixture", description="Model name used in reports")
    strata: List[StratumSpec] = Field(..., min_length=1)
    integrand: Optional[str] = Field(None, description="Registered integrand name (files only)")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_strata(self) -> "MixtureSpec":
        total = math.fsum(stratum.weight for stratum in self.strata)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"stratum weights must sum to 1 (got {total!r})")
        dims = {len(stratum.coordinates) for stratum in self.strata}
        if len(dims) != 1:
            raise ValueError("all strata must have the same number of coordinates")
        return self

    @property
    def alpha(self) -> np.ndarray:
        return np.array([stratum.weight for stratum in self.strata])

    @property
    def num_strata(self) -> int:
        return len(self.strata)

    @property
    def dimension(self) -> int:
        """s, the number of uniforms each stratum consumes (also the sample arity D)."""
        return len(self.strata[0].coordinates)


class StratumSelector(BaseModel):
    """Maps the first RQMC coordinate v to a stratum through [B_{l-1}, B_l)."""

    beta: List[float] = Field(..., description="Interval lengths, non-increasing")
    bounds: List[float] = Field(..., description="B_0 = 0 < B_1 < ... < B_L = 1")
    strata: List[int] = Field(..., description="Stratum owning each interval")

    model_config = ConfigDict(frozen=True)

    @property
    def num_strata(self) -> int:
        return len(self.beta)


class IntegrandHandle(BaseModel):
    """
    Integrand g_l(x). The callable receives a stratum index and a batch of
    samples of shape (k, D) and returns k values.
    """

    name: str
    func: Callable[[int, np.ndarray], np.ndarray]

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def __call__(self, stratum: int, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(stratum, x), dtype=float)
