"""
Digital net schemas: direction numbers, net parameters and point sets.
"""
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

DIGIT_WIDTH = 53

ScrambleKind = Literal["none", "nested-uniform", "linear-with-shift"]


class DirectionNumbers(BaseModel):
    """Sobol' direction numbers expanded to generator columns."""

    dimensions: int = Field(..., ge=1, description="Number of dimensions available (dimension 1 implicit)")
    width: int = Field(DIGIT_WIDTH, ge=1, le=63, description="Digit width W")
    degrees: List[int] = Field(..., description="Primitive polynomial degree per dimension (0 for dimension 1)")
    coefficients: List[int] = Field(..., description="Polynomial coefficient word per dimension")
    initial: List[List[int]] = Field(..., description="Initial direction values m_1..m_deg per dimension")
    columns: np.ndarray = Field(..., description="uint64 array (dimensions, width); column k holds v_{j,k+1}")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_shapes(self) -> "DirectionNumbers":
        if self.columns.shape != (self.dimensions, self.width):
            raise ValueError(f"columns must have shape ({self.dimensions}, {self.width})")
        if not (len(self.degrees) == len(self.coefficients) == len(self.initial) == self.dimensions):
            raise ValueError("per-dimension lists must have one entry per dimension")
        return self


class NetParams(BaseModel):
    """Quality parameter t, log2 sample size m and dimension d of a base-2 net."""

    t: int = Field(..., ge=0, description="Quality parameter")
    m: int = Field(..., ge=0, description="log2 of the number of points")
    d: int = Field(..., ge=1, description="Dimension")

    @model_validator(mode="after")
    def check_t(self) -> "NetParams":
        if self.t > self.m:
            raise ValueError("t must not exceed m")
        return self


class ScrambleDescriptor(BaseModel):
    """How a point set was randomized."""

    kind: ScrambleKind = Field("none", description="Scramble applied to the digits")
    seed: Optional[int] = Field(None, description="64-bit seed of the scramble")

    model_config = ConfigDict(frozen=True)


class DigitalPointSet(BaseModel):
    """
    n = 2^m points of a base-2 digital net, stored as W-digit integer words.

    Row i holds point i in natural index order; column j holds coordinate j.
    The most significant of the W bits is the first binary digit.
    """

    m: int = Field(..., ge=0, le=DIGIT_WIDTH)
    d: int = Field(..., ge=1)
    width: int = Field(DIGIT_WIDTH, ge=1, le=63)
    words: np.ndarray = Field(..., description="uint64 array of shape (2^m, d)")
    scramble: ScrambleDescriptor = Field(default_factory=ScrambleDescriptor)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_words(self) -> "DigitalPointSet":
        if self.words.dtype != np.uint64:
            raise ValueError("words must be uint64")
        if self.words.shape != (1 << self.m, self.d):
            raise ValueError(f"words must have shape ({1 << self.m}, {self.d})")
        if self.words.size and int(self.words.max()) >> self.width:
            raise ValueError(f"digit words must be below 2^{self.width}")
        return self

    @property
    def n(self) -> int:
        return 1 << self.m

    def params(self, t: int) -> NetParams:
        return NetParams(t=t, m=self.m, d=self.d)
