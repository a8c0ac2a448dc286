"""Schemas package - exports all pydantic schemas."""
from mixqmc.schemas.net import DIGIT_WIDTH, DirectionNumbers, NetParams, ScrambleDescriptor, DigitalPointSet
from mixqmc.schemas.discrepancy import (
    ElementaryInterval, NetVerification, DiscrepancyReport, StratumCount, StratumNetCheck
)
from mixqmc.schemas.allocation import (
    AllocationRule, AllocationPlan, PartitionCatalogue, MinimaxGammaResult, BruteForceMinimaxResult
)
from mixqmc.schemas.mixture import (
    DistributionSpec, NormalSpec, ShiftedNormalSpec, FrechetSpec, GammaSpec, UniformSpec,
    StratumSpec, MixtureSpec, StratumSelector, IntegrandHandle
)
from mixqmc.schemas.estimator import Estimate, EstimatorReport
from mixqmc.schemas.experiment import ExperimentGrid, ESTIMATOR_NAMES

__all__ = [
    "DIGIT_WIDTH", "DirectionNumbers", "NetParams", "ScrambleDescriptor", "DigitalPointSet",
    "ElementaryInterval", "NetVerification", "DiscrepancyReport", "StratumCount", "StratumNetCheck",
    "AllocationRule", "AllocationPlan", "PartitionCatalogue", "MinimaxGammaResult", "BruteForceMinimaxResult",
    "DistributionSpec", "NormalSpec", "ShiftedNormalSpec", "FrechetSpec", "GammaSpec", "UniformSpec",
    "StratumSpec", "MixtureSpec", "StratumSelector", "IntegrandHandle",
    "Estimate", "EstimatorReport",
    "ExperimentGrid", "ESTIMATOR_NAMES",
]
