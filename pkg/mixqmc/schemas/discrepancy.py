"""
Schemas for net verification and discrepancy reports.
"""
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class ElementaryInterval(BaseModel):
    """Dyadic box prod_j [c_j 2^-k_j, (c_j + 1) 2^-k_j)."""

    levels: List[int] = Field(..., description="Level k_j per dimension")
    cells: List[int] = Field(..., description="Cell index c_j per dimension")

    @model_validator(mode="after")
    def check_cells(self) -> "ElementaryInterval":
        if len(self.levels) != len(self.cells):
            raise ValueError("levels and cells must have the same length")
        for k, c in zip(self.levels, self.cells):
            if k < 0 or not 0 <= c < (1 << k):
                raise ValueError(f"cell index {c} out of range for level {k}")
        return self

    @property
    def total_level(self) -> int:
        return sum(self.levels)

    @property
    def volume(self) -> float:
        return 2.0 ** (-self.total_level)


class NetVerification(BaseModel):
    """Outcome of an exhaustive elementary-interval count."""

    passed: bool
    t: int = Field(..., ge=0)
    m: int = Field(..., ge=0)
    d: int = Field(..., ge=1)
    witness: Optional[ElementaryInterval] = Field(None, description="First interval with a wrong count")
    witness_count: Optional[int] = Field(None, description="Number of points found in the witness interval")

    def __bool__(self) -> bool:
        return self.passed


class DiscrepancyReport(BaseModel):
    """Exact star discrepancy and a corner where it is attained."""

    value: float = Field(..., ge=0.0, le=1.0, description="Star discrepancy D*_n")
    corner: List[float] = Field(..., description="Corner a with |delta(a)| equal to the value")
    n: int = Field(..., ge=1)
    d: int = Field(..., ge=1)


class StratumCount(BaseModel):
    """Points of a stratified sequence inside [A, B) and the stratification count bounds."""

    count: int = Field(..., ge=0)
    lower: int = Field(..., description="ceil(n beta) - 2")
    upper: int = Field(..., description="floor(n beta) + 2")
    beta: float = Field(..., gt=0.0, le=1.0)

    @property
    def within_bounds(self) -> bool:
        return self.lower <= self.count <= self.upper


class StratumNetCheck(BaseModel):
    """Within-stratum net verdict for one dyadic stratum."""

    stratum: int = Field(..., ge=0)
    kappa: int = Field(..., ge=0, description="beta = 2^-kappa")
    m: int = Field(..., ge=0, description="m - kappa")
    t: int = Field(..., ge=0, description="Smallest t the sub-points achieve")
    passed: bool = Field(..., description="t does not exceed min(t_full, m_stratum)")
