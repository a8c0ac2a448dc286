"""
Estimator schemas.
"""
import math
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class Estimate(NamedTuple):
    """One replicate: the estimate and the number of samples each stratum received."""

    value: float
    counts: np.ndarray
    stratum_means: Optional[np.ndarray] = None


class EstimatorReport(BaseModel):
    """Replicate estimates of one estimator at one sample size."""

    name: str = Field(..., description="Estimator label")
    n: int = Field(..., ge=1, description="Sample size per replicate")
    estimates: List[float] = Field(..., min_length=1, description="Replicate estimates")
    mean: float = Field(..., description="Average of the replicate estimates")
    variance: float = Field(..., ge=0.0, description="Unbiased sample variance of the replicates")
    counts: List[List[int]] = Field(default_factory=list, description="Per-replicate stratum sample counts")
    seed: int = Field(..., description="Master seed of the replicate set")

    @model_validator(mode="after")
    def check_counts(self) -> "EstimatorReport":
        for row in self.counts:
            if sum(row) != self.n:
                raise ValueError("stratum counts must sum to n in every replicate")
        return self

    @property
    def replicates(self) -> int:
        return len(self.estimates)

    @property
    def standard_error(self) -> float:
        """Standard error of the replicate mean."""
        return math.sqrt(self.variance / self.replicates)
