"""
Net service - Sobol' digital nets in base 2 and their randomizations.

Digits are stored as W-bit integer words (W = 53) so that conversion to
floating point is exact. Point i of a net is the XOR of the generator columns
selected by the binary digits of i (natural order, not Gray code), so every
prefix block of 2^k points is itself a net.
"""
import io
import logging
from functools import lru_cache
from pathlib import Path
from typing import Optional, TextIO, Union

import numpy as np

from mixqmc.config import get_settings
from mixqmc.exceptions import CapacityError, ContractError, DirectionNumberError, DomainError, ParseError
from mixqmc.schemas.net import DIGIT_WIDTH, DigitalPointSet, DirectionNumbers, ScrambleDescriptor
from mixqmc.utils.direction_numbers import EMBEDDED_DIMENSIONS, EMBEDDED_TABLE
from mixqmc.utils.seeding import (
    TAG_DIGITAL_SHIFT,
    TAG_LINEAR_MATRIX,
    TAG_MONTE_CARLO,
    TAG_NESTED_UNIFORM,
    derive_seed,
    keyed_hash,
    philox_generator,
)

logger = logging.getLogger(__name__)

SCRAMBLE_KINDS = ("nested-uniform", "linear-with-shift")


def _expand_columns(degree: int, coefficients: int, initial: list, width: int) -> list:
    """Generator columns v_1..v_W of one dimension from its primitive polynomial."""
    v = [0] * (width + 1)
    for k in range(1, min(degree, width) + 1):
        v[k] = initial[k - 1] << (width - k)
    for k in range(degree + 1, width + 1):
        value = v[k - degree] ^ (v[k - degree] >> degree)
        for i in range(1, degree):
            if (coefficients >> (degree - 1 - i)) & 1:
                value ^= v[k - i]
        v[k] = value
    return v[1:]


def load_direction_numbers(
    text: Union[str, TextIO],
    dimensions: Optional[int] = None,
    width: int = DIGIT_WIDTH,
) -> DirectionNumbers:
    """
    Parse Joe-Kuo direction numbers and expand them to generator columns.

    The first line is a header; every further non-blank line is a record
    "d s a m_1 ... m_s". Dimension 1 (van der Corput) is implicit.

    Args:
        text: File contents or an open text stream
        dimensions: Number of dimensions to expand (default: all records + 1)
        width: Digit width W

    Returns:
        DirectionNumbers with columns of shape (dimensions, width)

    Raises:
        ParseError: malformed record (message names the line number)
        DirectionNumberError: an initial value is even or too large
        CapacityError: more dimensions requested than the stream holds
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()

    degrees, polys, initials = [0], [0], [[]]
    columns = [[1 << (width - k) for k in range(1, width + 1)]]
    wanted = dimensions if dimensions is not None else None
    if wanted is not None and wanted < 1:
        raise DomainError("at least one dimension must be requested")

    for line_number, line in enumerate(lines[1:], start=2):
        if wanted is not None and len(degrees) >= wanted:
            break
        if not line.strip():
            continue
        try:
            fields = [int(token) for token in line.split()]
        except ValueError:
            raise ParseError(f"non-integer field in {line.strip()!r}", line_number)
        if len(fields) < 4:
            raise ParseError("expected 'd s a m_1 ... m_s'", line_number)
        dim, degree, poly, initial = fields[0], fields[1], fields[2], fields[3:]
        if dim != len(degrees) + 1:
            raise ParseError(f"expected dimension {len(degrees) + 1}, found {dim}", line_number)
        if degree < 1 or len(initial) != degree:
            raise ParseError(f"degree {degree} does not match {len(initial)} initial values", line_number)
        if poly < 0 or poly >> max(degree - 1, 0):
            raise ParseError(f"coefficient word {poly} has more than {degree - 1} bits", line_number)
        for i, value in enumerate(initial, start=1):
            if value % 2 == 0 or not 0 < value < (1 << i):
                raise DirectionNumberError(
                    f"line {line_number}: m_{i} = {value} must be odd and below 2^{i}"
                )
        degrees.append(degree)
        polys.append(poly)
        initials.append(initial)
        columns.append(_expand_columns(degree, poly, initial, width))

    available = len(degrees)
    if wanted is not None and wanted > available:
        raise CapacityError(f"requested {wanted} dimensions but only {available} are available")

    logger.debug(f"Loaded direction numbers for {available} dimensions at width {width}")
    return DirectionNumbers(
        dimensions=available,
        width=width,
        degrees=degrees,
        coefficients=polys,
        initial=initials,
        columns=np.array(columns, dtype=np.uint64),
    )


@lru_cache(maxsize=8)
def _cached_direction_numbers(path: Optional[str], dimensions: int) -> DirectionNumbers:
    if path is None:
        return load_direction_numbers(EMBEDDED_TABLE, dimensions)
    with io.open(Path(path), encoding="utf-8") as handle:
        return load_direction_numbers(handle, dimensions)


def default_direction_numbers(dimensions: int, path: Optional[str] = None) -> DirectionNumbers:
    """
    Direction numbers for the requested dimension count.

    Uses the embedded table unless a file path is given (or configured through
    MIXQMC_DIRECTION_NUMBERS_PATH).
    """
    path = path or get_settings().direction_numbers_path
    if path is None and dimensions > EMBEDDED_DIMENSIONS:
        raise CapacityError(
            f"the embedded table covers {EMBEDDED_DIMENSIONS} dimensions; load a direction-number file for {dimensions}"
        )
    return _cached_direction_numbers(path, dimensions)


def sobol_points(dirs: DirectionNumbers, d: int, m: int) -> DigitalPointSet:
    """
    First 2^m Sobol' points in d dimensions, natural index order, unscrambled.

    Raises:
        DomainError: d < 1 or m outside [0, W]
        CapacityError: d exceeds the loaded dimensions
    """
    if d < 1 or not 0 <= m <= dirs.width:
        raise DomainError(f"need d >= 1 and 0 <= m <= {dirs.width} (got d={d}, m={m})")
    if d > dirs.dimensions:
        raise CapacityError(f"requested {d} dimensions but only {dirs.dimensions} are loaded")

    n = 1 << m
    index = np.arange(n, dtype=np.uint64)
    words = np.zeros((n, d), dtype=np.uint64)
    for bit in range(m):
        selected = ((index >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        words[selected] ^= dirs.columns[:d, bit]
    return DigitalPointSet(m=m, d=d, width=dirs.width, words=words)


def _nested_uniform(words: np.ndarray, key: int, width: int) -> np.ndarray:
    """
    Nested uniform scramble of one coordinate.

    The flip applied to digit k is one keyed pseudo-random bit of the pair
    (k, first k-1 digits), i.e. an independent random permutation of {0, 1}
    at every node of the binary digit tree.
    """
    out = np.zeros_like(words)
    one = np.uint64(1)
    for k in range(1, width + 1):
        position = np.uint64(width - k)
        prefix = words >> (position + one)
        counters = (np.uint64(k) << np.uint64(width)) | prefix
        flips = keyed_hash(key, counters) >> np.uint64(63)
        digits = ((words >> position) & one) ^ flips
        out |= digits << position
    return out


def _linear_with_shift(words: np.ndarray, matrix_seed: int, shift_seed: int, width: int) -> np.ndarray:
    """
    Random nonsingular lower-triangular bit matrix followed by a digital shift.

    Input digit k feeds output digit k (unit diagonal) and a random subset of
    the output digits after it.
    """
    randoms = philox_generator(matrix_seed).integers(0, 1 << width, size=width, dtype=np.uint64)
    shift = philox_generator(shift_seed).integers(0, 1 << width, dtype=np.uint64)
    out = np.full_like(words, shift)
    one = np.uint64(1)
    for k in range(1, width + 1):
        position = np.uint64(width - k)
        column = (one << position) | (randoms[k - 1] & ((one << position) - one))
        out ^= ((words >> position) & one) * column
    return out


def scramble(points: DigitalPointSet, kind: str, seed: int) -> DigitalPointSet:
    """
    Randomize an unscrambled net; the result is again a net with the same (t, m, d).

    Args:
        points: Unscrambled point set
        kind: "nested-uniform" or "linear-with-shift"
        seed: 64-bit seed; per-dimension keys are derived from it

    Returns:
        New DigitalPointSet; identical inputs give bit-identical output
    """
    if points.scramble.kind != "none":
        raise ContractError("point set is already scrambled")
    if kind not in SCRAMBLE_KINDS:
        raise DomainError(f"unknown scramble kind {kind!r}; choose from {list(SCRAMBLE_KINDS)}")

    words = np.empty_like(points.words)
    for j in range(points.d):
        column = points.words[:, j]
        if kind == "nested-uniform":
            words[:, j] = _nested_uniform(column, derive_seed(seed, TAG_NESTED_UNIFORM, j), points.width)
        else:
            words[:, j] = _linear_with_shift(
                column,
                derive_seed(seed, TAG_LINEAR_MATRIX, j),
                derive_seed(seed, TAG_DIGITAL_SHIFT, j),
                points.width,
            )
    return DigitalPointSet(
        m=points.m,
        d=points.d,
        width=points.width,
        words=words,
        scramble=ScrambleDescriptor(kind=kind, seed=seed),
    )


def to_unit_cube(points: DigitalPointSet) -> np.ndarray:
    """Digit words as reals sum_k digit_k 2^-k in [0, 1); exact for W <= 53."""
    return np.ldexp(points.words.astype(np.float64), -points.width)


def scrambled_sobol(
    d: int,
    m: int,
    seed: int,
    kind: Optional[str] = None,
    dirs: Optional[DirectionNumbers] = None,
) -> np.ndarray:
    """Scrambled Sobol' points as an (2^m, d) float array."""
    dirs = dirs or default_direction_numbers(d)
    kind = kind or get_settings().scramble_kind
    return to_unit_cube(scramble(sobol_points(dirs, d, m), kind, seed))


def monte_carlo_points(n: int, d: int, seed: int) -> np.ndarray:
    """n i.i.d. uniform points in [0, 1)^d from the Philox generator."""
    if n < 1 or d < 1:
        raise DomainError("need n >= 1 and d >= 1")
    return philox_generator(derive_seed(seed, TAG_MONTE_CARLO)).random((n, d))
