"""
Discrepancy service - net and stratification checks, local and star discrepancy.

Every interval is half-open, [A, B), matching the stratum selection rule.
"""
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from mixqmc.config import get_settings
from mixqmc.exceptions import CapabilityError, ContractError, DomainError
from mixqmc.schemas.discrepancy import (
    DiscrepancyReport,
    ElementaryInterval,
    NetVerification,
    StratumCount,
    StratumNetCheck,
)
from mixqmc.schemas.net import DigitalPointSet, NetParams
from mixqmc.services.mixture_service import build_selector, select_strata
from mixqmc.services.net_service import to_unit_cube

logger = logging.getLogger(__name__)

PointsLike = Union[DigitalPointSet, np.ndarray, Sequence]

STAR_MAX_DIMENSION = 3
STAR_MAX_POINTS = 1 << 12


def _as_array(points: PointsLike) -> np.ndarray:
    if isinstance(points, DigitalPointSet):
        return to_unit_cube(points)
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise DomainError("expected a non-empty (n, d) array of points")
    return x


def local_discrepancy(points: PointsLike, a: Sequence[float]) -> float:
    """
    delta(a) = (1/n) #{x_i in [0, a)} - prod_j a_j.

    Corners with a_j = 1 are accepted so that suprema approached from the
    right can be evaluated.
    """
    x = _as_array(points)
    corner = np.atleast_1d(np.asarray(a, dtype=float))
    if corner.shape != (x.shape[1],):
        raise DomainError(f"corner has {corner.size} coordinates, points have {x.shape[1]}")
    if np.any(corner < 0.0) or np.any(corner > 1.0) or np.any(np.isnan(corner)):
        raise DomainError(f"corner {corner.tolist()} lies outside the unit cube")
    inside = np.all(x < corner, axis=1)
    return float(np.count_nonzero(inside) / x.shape[0] - np.prod(corner))


def _shift_down(counts: np.ndarray) -> np.ndarray:
    """counts[k - 1] along every axis, zero where k = 0."""
    out = counts
    for axis in range(counts.ndim):
        out = np.concatenate(
            [np.zeros_like(out.take([0], axis=axis)), out.take(range(out.shape[axis] - 1), axis=axis)],
            axis=axis,
        )
    return out


def star_discrepancy_exact(points: PointsLike) -> DiscrepancyReport:
    """
    Exact star discrepancy by enumerating the critical grid.

    The grid of axis j holds the distinct coordinate values of the points plus
    1. At each grid corner c the closed count #{x <= c} and the open count
    #{x < c} give the two one-sided candidates closed/n - vol(c) and
    vol(c) - open/n; their maximum over the grid is D*_n.

    Raises:
        CapabilityError: d > 3, n > 4096, or the grid exceeds the configured work bound
        DomainError: a coordinate outside [0, 1)
    """
    x = _as_array(points)
    n, d = x.shape
    if d > STAR_MAX_DIMENSION or n > STAR_MAX_POINTS:
        raise CapabilityError(
            f"exact star discrepancy supports d <= {STAR_MAX_DIMENSION} and n <= {STAR_MAX_POINTS} (got d={d}, n={n})"
        )
    if np.any(x < 0.0) or np.any(x >= 1.0):
        raise DomainError("points must lie in [0, 1)^d")

    grids = [np.append(np.unique(x[:, j]), 1.0) for j in range(d)]
    cells = math.prod(len(g) for g in grids)
    max_cells = get_settings().star_discrepancy_max_cells
    if cells > max_cells:
        raise CapabilityError(f"critical grid has {cells} corners, above the bound {max_cells}")

    ranks = np.column_stack([np.searchsorted(grids[j], x[:, j]) for j in range(d)])
    order = np.argsort(ranks[:, 0], kind="stable")
    ranks = ranks[order]
    starts = np.searchsorted(ranks[:, 0], np.arange(len(grids[0]) + 1))

    rest_shape = tuple(len(g) for g in grids[1:])
    rest_volume = np.ones(rest_shape)
    for axis, grid in enumerate(grids[1:]):
        shape = [1] * len(rest_shape)
        shape[axis] = len(grid)
        rest_volume = rest_volume * grid.reshape(shape)

    running = np.zeros(rest_shape, dtype=np.int64)
    previous_closed = np.zeros(rest_shape, dtype=np.int64)
    best_value, best_corner = -1.0, None
    for k1, c1 in enumerate(grids[0]):
        block = ranks[starts[k1]:starts[k1 + 1], 1:]
        if running.ndim == 0:
            running = running + len(block)
        elif len(block):
            np.add.at(running, tuple(block.T), 1)
        closed = running
        for axis in range(running.ndim):
            closed = np.cumsum(closed, axis=axis)
        opened = _shift_down(previous_closed)
        volume = c1 * rest_volume

        upper = closed / n - volume
        lower = volume - opened / n
        for candidate, is_closed in ((upper, True), (lower, False)):
            position = np.unravel_index(int(np.argmax(candidate)), candidate.shape)
            value = float(candidate[position])
            if value > best_value:
                corner = np.array([c1] + [grids[j + 1][position[j]] for j in range(d - 1)])
                if is_closed:
                    corner = np.where(corner < 1.0, np.nextafter(corner, np.inf), 1.0)
                best_value, best_corner = value, corner
        previous_closed = closed

    value = min(max(best_value, 0.0), 1.0)
    logger.debug(f"Star discrepancy of {n} points in d={d}: {value!r} over {cells} corners")
    return DiscrepancyReport(value=value, corner=[float(c) for c in best_corner], n=n, d=d)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Level vectors with the given sum, largest first component first."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _digit_prefixes(x: np.ndarray, max_level: int) -> np.ndarray:
    """prefixes[k, i, j] = floor(x_ij 2^k), exact for dyadic scaling."""
    return np.stack([np.floor(np.ldexp(x, k)).astype(np.int64) for k in range(max_level + 1)])


def _first_failure(x: np.ndarray, m: int, max_level: int) -> Optional[Tuple[Tuple[int, ...], int, int]]:
    """First (levels, cell id, count) with a wrong count among shapes |k| <= max_level."""
    n, d = x.shape
    prefixes = _digit_prefixes(x, max_level)
    for total in range(max_level + 1):
        expected = 1 << (m - total)
        for levels in _compositions(total, d):
            ids = np.zeros(n, dtype=np.int64)
            for j, k in enumerate(levels):
                if k:
                    ids = (ids << k) | prefixes[k, :, j]
            counts = np.bincount(ids, minlength=1 << total)
            bad = np.flatnonzero(counts != expected)
            if bad.size:
                return levels, int(bad[0]), int(counts[bad[0]])
    return None


def _decode_cells(levels: Tuple[int, ...], cell_id: int) -> List[int]:
    cells = []
    for k in reversed(levels):
        cells.append(cell_id & ((1 << k) - 1))
        cell_id >>= k
    return list(reversed(cells))


def _check_size(x: np.ndarray, m: int) -> None:
    if x.shape[0] != 1 << m:
        raise DomainError(f"expected 2^{m} = {1 << m} points, got {x.shape[0]}")


def verify_net(points: PointsLike, params: NetParams) -> NetVerification:
    """
    Exhaustive check of the (t, m, d)-net property.

    Every elementary interval with |k| <= m - t must hold exactly 2^(m - |k|)
    points. Shapes are visited by total level, then with the largest k_1
    first; the first interval with a wrong count is returned as the witness.
    """
    x = _as_array(points)
    _check_size(x, params.m)
    if x.shape[1] != params.d:
        raise DomainError(f"points have dimension {x.shape[1]}, expected {params.d}")

    failure = _first_failure(x, params.m, params.m - params.t)
    if failure is None:
        return NetVerification(passed=True, t=params.t, m=params.m, d=params.d)
    levels, cell_id, count = failure
    witness = ElementaryInterval(levels=list(levels), cells=_decode_cells(levels, cell_id))
    return NetVerification(
        passed=False, t=params.t, m=params.m, d=params.d, witness=witness, witness_count=count
    )


def min_t(points: PointsLike, m: int, d: int) -> int:
    """Smallest t for which the points form a (t, m, d)-net (m if only the trivial property holds)."""
    x = _as_array(points)
    _check_size(x, m)
    if x.shape[1] != d:
        raise DomainError(f"points have dimension {x.shape[1]}, expected {d}")
    failure = _first_failure(x, m, m)
    if failure is None:
        return 0
    return m - sum(failure[0]) + 1


def _is_stratified(values: np.ndarray) -> bool:
    n = values.shape[0]
    edges = np.arange(n + 1) / n
    cells = np.searchsorted(edges, values, side="right") - 1
    if np.any(cells < 0) or np.any(cells >= n):
        return False
    return bool(np.all(np.bincount(cells, minlength=n) == 1))


def verify_stratified(points: PointsLike) -> bool:
    """True iff every coordinate has exactly one value in each [k/n, (k+1)/n)."""
    x = _as_array(points)
    return all(_is_stratified(x[:, j]) for j in range(x.shape[1]))


def count_in_interval(values: Sequence[float], A: float, B: float) -> StratumCount:
    """
    Number of stratified values in [A, B) with the bounds
    ceil(n beta) - 2 <= count <= floor(n beta) + 2 for beta = B - A.

    Raises:
        DomainError: unless 0 <= A < B <= 1
        ContractError: the values are not stratified
    """
    if not 0.0 <= A < B <= 1.0:
        raise DomainError(f"need 0 <= A < B <= 1 (got A={A}, B={B})")
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0 or not _is_stratified(v):
        raise ContractError("values are not stratified; the count bounds do not apply")

    n = v.size
    beta = B - A
    result = StratumCount(
        count=int(np.count_nonzero((v >= A) & (v < B))),
        lower=math.ceil(n * beta) - 2,
        upper=math.floor(n * beta) + 2,
        beta=beta,
    )
    if not result.within_bounds:
        logger.warning(f"Interval [{A}, {B}) holds {result.count} of {n} values, outside [{result.lower}, {result.upper}]")
    return result


def stratum_points(points: PointsLike, beta: Sequence[float]) -> List[np.ndarray]:
    """
    Split an (n, s+1) point set by its first coordinate into the strata of
    a sorted fraction vector; returns the remaining s coordinates per stratum.
    """
    x = _as_array(points)
    if x.shape[1] < 2:
        raise DomainError("stratum splitting needs at least two coordinates")
    selector = build_selector(beta)
    owner = select_strata(selector, x[:, 0])
    return [x[owner == l, 1:] for l in range(selector.num_strata)]


def _dyadic_exponent(value: float) -> Optional[int]:
    mantissa, exponent = math.frexp(value)
    if mantissa != 0.5 or exponent > 1:
        return None
    return 1 - exponent


def verify_stratum_nets(
    points: PointsLike,
    beta: Sequence[float],
    m: int,
    t: Optional[int] = None,
) -> List[StratumNetCheck]:
    """
    Within-stratum net check for dyadic fractions beta_l = 2^-kappa_l.

    The sub-points of stratum l are expected to form a (t_l, m - kappa_l, s)-net
    with t_l <= min(t, m - kappa_l), t being the quality of the full net
    (computed when not given).

    Raises:
        ContractError: some beta_l is not a negative power of two
    """
    x = _as_array(points)
    kappas = [_dyadic_exponent(float(b)) for b in beta]
    if any(k is None for k in kappas):
        raise ContractError(f"fractions {list(beta)} are not all negative powers of two")
    if t is None:
        t = min_t(x, m, x.shape[1])

    s = x.shape[1] - 1
    checks = []
    for l, (sub, kappa) in enumerate(zip(stratum_points(x, beta), kappas)):
        m_l = m - kappa
        if m_l < 0 or sub.shape[0] != 1 << m_l:
            logger.warning(f"Stratum {l} holds {sub.shape[0]} points, expected 2^{m_l}")
            checks.append(StratumNetCheck(stratum=l, kappa=kappa, m=max(m_l, 0), t=max(m_l, 0), passed=False))
            continue
        t_l = min_t(sub, m_l, s)
        checks.append(StratumNetCheck(stratum=l, kappa=kappa, m=m_l, t=t_l, passed=t_l <= min(t, m_l)))
    return checks


def stratum_star_discrepancy(points: PointsLike, beta: Sequence[float]) -> List[Optional[DiscrepancyReport]]:
    """Star discrepancy of each stratum's sub-points (None for an empty stratum)."""
    return [
        star_discrepancy_exact(sub) if sub.shape[0] else None
        for sub in stratum_points(points, beta)
    ]
