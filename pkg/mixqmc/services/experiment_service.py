"""
Experiment service - variance-versus-n studies over a grid of estimators,
sample sizes and design rates.
"""
import logging
import time
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from mixqmc.config import get_settings
from mixqmc.exceptions import InfeasibleError
from mixqmc.models import MixtureModel, get_model
from mixqmc.schemas.experiment import ALLOCATION_ESTIMATORS, ExperimentGrid
from mixqmc.schemas.net import DirectionNumbers
from mixqmc.services.estimator_service import estimator_closure, fit_log2_slope, replicate_variance
from mixqmc.utils.output import format_rate
from mixqmc.utils.seeding import TAG_EXPERIMENT_CELL, derive_seed, name_tag

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["estimator", "m", "n", "variance", "mean", "wall_ms"]


def _default_rate(model: MixtureModel, name: str) -> float:
    return {
        "rqmc_adj": model.adjusted_rho,
        "rqmc_pow2": model.pow2_rho,
        "rqmc_strata": model.strata_rho,
    }.get(name, model.adjusted_rho)


def _cells(grid: ExperimentGrid, model: MixtureModel) -> List[Tuple[str, str, float]]:
    """(label, estimator, rate) for every curve of the experiment."""
    cells = []
    for name in grid.estimators:
        if name not in ALLOCATION_ESTIMATORS:
            cells.append((name, name, _default_rate(model, name)))
        elif grid.rhos is None:
            cells.append((name, name, _default_rate(model, name)))
        elif len(grid.rhos) == 1:
            cells.append((name, name, grid.rhos[0]))
        else:
            cells.extend((f"{name}@rho={format_rate(rho)}", name, rho) for rho in grid.rhos)
    return cells


def run_experiment(
    grid: ExperimentGrid,
    model: Optional[MixtureModel] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> pd.DataFrame:
    """
    Replicate variance of every estimator at n = 2^m for m in the grid range.

    Cells whose allocation is infeasible (n below the number of strata) are
    skipped with a warning. Rows are sorted by estimator label, then m.
    """
    model = model or get_model(grid.model)
    spec, g = model.spec, model.integrand
    rows = []
    for label, name, rho in _cells(grid, model):
        for m in grid.m_values:
            n = 1 << m
            try:
                estimator = estimator_closure(name, spec, g, n, rho=rho, ansatz=grid.ansatz, kind=grid.scramble, dirs=dirs)
            except InfeasibleError as exc:
                logger.warning(f"Skipping {label} at m={m}: {exc.message}")
                continue
            seed = derive_seed(grid.seed, TAG_EXPERIMENT_CELL, name_tag(label), m)
            started = time.perf_counter()
            report = replicate_variance(estimator, grid.reps, seed, name=label, n=n, threads=grid.threads)
            wall_ms = 0.0 if grid.omit_timing else (time.perf_counter() - started) * 1000.0
            rows.append([label, m, n, report.variance, report.mean, wall_ms])
            logger.info(f"{model.name} {label} m={m}: variance={report.variance:.6g} mean={report.mean:.10g}")

    frame = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    return frame.sort_values(["estimator", "m"], kind="stable").reset_index(drop=True)


def summarize_slopes(frame: pd.DataFrame, m_min: Optional[int] = None, m_max: Optional[int] = None) -> pd.DataFrame:
    """Fitted log2-variance slope per estimator over m_min..m_max (NaN when not fittable)."""
    settings = get_settings()
    m_min = settings.slope_m_min if m_min is None else m_min
    m_max = settings.slope_m_max if m_max is None else m_max
    window = frame[(frame["m"] >= m_min) & (frame["m"] <= m_max)]

    slopes = []
    for label, group in window.groupby("estimator", sort=True):
        pairs = list(zip(group["n"], group["variance"]))
        if len(pairs) >= 3 and all(v > 0 for _, v in pairs):
            slopes.append((label, fit_log2_slope(pairs), len(pairs)))
        else:
            slopes.append((label, np.nan, len(pairs)))
    return pd.DataFrame(slopes, columns=["estimator", "slope", "points"])
