"""
Output helpers.
Writers for the CSV and plain-text tables every command emits.
"""
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import pandas as pd

CSV_FLOAT_FORMAT = "%.17g"


def write_csv(frame: pd.DataFrame, out: Optional[Union[str, Path, TextIO]] = None) -> None:
    """
    Write a table as UTF-8 CSV with a header row.

    Args:
        frame: Table to write (the index is not written)
        out: File path or open stream (default: stdout)

    Floats use round-trip precision and '\\n' line endings, so identical
    tables give byte-identical files on every platform.
    """
    if out is None:
        out = sys.stdout
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="") as handle:
            frame.to_csv(handle, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    else:
        frame.to_csv(out, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def format_fraction(value: Union[Fraction, float], limit: int = 1 << 20) -> str:
    """Fractions as p/q ("1/2"), floats through the closest small fraction."""
    fraction = value if isinstance(value, Fraction) else Fraction(value).limit_denominator(limit)
    return str(fraction)


def format_rate(rho: float) -> str:
    """Design rates as short labels: 2, 2.5, inf."""
    if rho == float("inf"):
        return "inf"
    return f"{rho:g}"


def write_lines(lines: Iterable[str], stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stdout
    for line in lines:
        stream.write(line + "\n")


def parse_float_list(text: str) -> Sequence[float]:
    """Comma or whitespace separated numbers; "inf" is accepted."""
    tokens = [token for token in text.replace(",", " ").split() if token]
    return [float(token) for token in tokens]
