"""
Allocation schemas: rules, plans, partition catalogues and minimax results.
"""
import math
from fractions import Fraction
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator


class AllocationRule(BaseModel):
    """Design assumptions used to turn mixture weights into sampling fractions."""

    ansatz: Literal[0, 1] = Field(0, description="0: uncorrelated stratum estimates, 1: perfectly correlated")
    rho: Union[float, List[float]] = Field(2.0, description="Variance rate, scalar or one per stratum; inf allowed")
    tau: Optional[List[float]] = Field(None, description="Relative within-stratum variance constants")
    costs: Optional[List[float]] = Field(None, description="Relative cost per sample in each stratum")
    power_of_two: bool = Field(False, description="Require n_l = 2^m_l")

    @field_validator("rho")
    @classmethod
    def check_rho(cls, value):
        rates = value if isinstance(value, list) else [value]
        if not rates:
            raise ValueError("at least one rate is required")
        if any(math.isnan(r) or r < 1 for r in rates):
            raise ValueError("rates must be >= 1")
        return value

    @field_validator("tau")
    @classmethod
    def check_tau(cls, value):
        if value is not None and any(t < 0 for t in value):
            raise ValueError("variance constants must be non-negative")
        return value

    @field_validator("costs")
    @classmethod
    def check_costs(cls, value):
        if value is not None and any(c <= 0 for c in value):
            raise ValueError("costs must be strictly positive")
        return value

    def rates(self, strata: int) -> List[float]:
        """Per-stratum rates, broadcasting a scalar."""
        if isinstance(self.rho, list):
            if len(self.rho) != strata:
                raise ValueError(f"expected {strata} per-stratum rates, got {len(self.rho)}")
            return list(self.rho)
        return [float(self.rho)] * strata


class AllocationPlan(BaseModel):
    """Sampling fractions and integer sample sizes for every stratum (stratum order)."""

    n: int = Field(..., ge=1, description="Total sample size")
    alpha: List[float] = Field(..., description="Mixture weights")
    xi: List[float] = Field(..., description="Ideal (unrounded) fractions")
    beta: List[float] = Field(..., description="Sampling fractions n_l / n")
    sizes: List[int] = Field(..., description="Integer sample sizes n_l")
    weights: List[float] = Field(..., description="Importance weights alpha_l / beta_l")
    rule: Optional[AllocationRule] = Field(None, description="Rule the plan was derived from")
    power_of_two: bool = Field(False)
    interval_order: List[int] = Field(..., description="Strata listed in interval order (non-increasing beta)")
    doubling_steps: Optional[int] = Field(None, description="Doublings performed by the forward allocation")

    @model_validator(mode="after")
    def check_plan(self) -> "AllocationPlan":
        if sum(self.sizes) != self.n:
            raise ValueError("sizes must sum to n")
        if any(size < 1 for size in self.sizes):
            raise ValueError("every stratum needs at least one sample")
        if sorted(self.interval_order) != list(range(len(self.sizes))):
            raise ValueError("interval_order must be a permutation of the strata")
        if self.power_of_two and any(size & (size - 1) for size in self.sizes):
            raise ValueError("power-of-two plan with a size that is not a power of two")
        return self

    @property
    def strata(self) -> int:
        return len(self.sizes)

    @property
    def fractions(self) -> List[Fraction]:
        """Exact sampling fractions n_l / n."""
        return [Fraction(size, self.n) for size in self.sizes]

    @property
    def sorted_beta(self) -> List[float]:
        """Fractions in interval order (non-increasing)."""
        return [self.beta[l] for l in self.interval_order]

    @property
    def exponents(self) -> Optional[List[int]]:
        """m_l with n_l = 2^m_l, or None for general plans."""
        if not self.power_of_two:
            return None
        return [size.bit_length() - 1 for size in self.sizes]


class PartitionCatalogue(BaseModel):
    """All partitions of unity into L negative powers of two."""

    strata: int = Field(..., ge=1)
    kappas: List[List[int]] = Field(..., description="Non-decreasing exponent vectors, beta_l = 2^-kappa_l")

    @property
    def count(self) -> int:
        return len(self.kappas)

    def fractions(self) -> List[List[Fraction]]:
        return [[Fraction(1, 1 << k) for k in kappa] for kappa in self.kappas]


class MinimaxGammaResult(BaseModel):
    """Cautious design rate gamma_0 and the inefficiency it guarantees."""

    gamma0: float
    max_inefficiency: float = Field(..., ge=0.0)
    worst_rho: float = Field(..., description="Rate attaining the maximum for gamma_0")
    ansatz: Literal[0, 1] = 0


class BruteForceMinimaxResult(BaseModel):
    """Exhaustive minimax allocation over all positive compositions of N."""

    allocation: List[int] = Field(..., description="Optimal sizes in non-increasing order")
    worst_ratio: float = Field(..., description="max over alternatives and variance constants")
    optimal_count: int = Field(..., ge=1, description="Number of compositions attaining the optimum")
