"""
Experiment grid schema driving the variance-versus-n studies.
"""
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

ESTIMATOR_NAMES = ("mc", "rqmc", "rqmc_adj", "rqmc_pow2", "rqmc_strata")

ALLOCATION_ESTIMATORS = ("rqmc_adj", "rqmc_pow2", "rqmc_strata")


class ExperimentGrid(BaseModel):
    """Estimators x m-range x replicates x seed for one model."""

    model: str = Field("toy", description="toy, flood or file:<path>")
    m_min: int = Field(3, ge=0, le=20)
    m_max: int = Field(12, ge=0, le=20)
    reps: int = Field(500, ge=2, description="Replicates R per cell")
    estimators: List[str] = Field(default_factory=lambda: list(ESTIMATOR_NAMES))
    rhos: Optional[List[float]] = Field(None, description="Design rates; None uses the model defaults")
    ansatz: Literal[0, 1] = 0
    seed: int = Field(20240101, description="Master seed")
    threads: int = Field(1, ge=1)
    scramble: Literal["nested-uniform", "linear-with-shift"] = "nested-uniform"
    omit_timing: bool = Field(False, description="Write wall_ms as 0 for byte-identical output")

    @field_validator("model")
    @classmethod
    def check_model(cls, value: str) -> str:
        if value in ("toy", "flood") or (value.startswith("file:") and len(value) > 5):
            return value
        raise ValueError("model must be toy, flood or file:<path>")

    @field_validator("estimators")
    @classmethod
    def check_estimators(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in ESTIMATOR_NAMES]
        if unknown:
            raise ValueError(f"unknown estimators {unknown}; choose from {list(ESTIMATOR_NAMES)}")
        if not value:
            raise ValueError("at least one estimator is required")
        return value

    @field_validator("rhos")
    @classmethod
    def check_rhos(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and (not value or any(math.isnan(r) or r < 1 for r in value)):
            raise ValueError("rates must be >= 1 (inf allowed)")
        return value

    @model_validator(mode="after")
    def check_range(self) -> "ExperimentGrid":
        if self.m_min > self.m_max:
            raise ValueError("m-range is empty")
        return self

    @property
    def m_values(self) -> List[int]:
        return list(range(self.m_min, self.m_max + 1))
