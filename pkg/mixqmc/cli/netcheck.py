"""
netcheck - net quality, stratification and within-stratum nets of a scrambled Sobol' set.
"""
import argparse
import math
import sys

from mixqmc.cli.common import check_range, float_list
from mixqmc.config import get_settings
from mixqmc.exceptions import EXIT_OK
from mixqmc.services.discrepancy_service import (
    count_in_interval,
    min_t,
    verify_stratified,
    verify_stratum_nets,
)
from mixqmc.services.mixture_service import build_selector
from mixqmc.services.net_service import default_direction_numbers, scramble, sobol_points, to_unit_cube
from mixqmc.utils.output import format_fraction, write_lines

MAX_DIMENSION = 6
MAX_M = 12


def add_parser(subparsers) -> None:
    settings = get_settings()
    parser = subparsers.add_parser("netcheck", help="Check net and stratification properties")
    parser.add_argument("--d", type=int, default=2, help="Dimension (at most 6)")
    parser.add_argument("--m", type=int, default=8, help="log2 of the number of points (at most 12)")
    parser.add_argument("--scramble", choices=("nested-uniform", "linear-with-shift"), default=settings.scramble_kind)
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--beta", type=float_list, default=None, help="Sorted stratum fractions, e.g. 0.5,0.25,0.125,0.125")
    parser.add_argument("--require-nets", action="store_true", help="Fail unless every beta is a power of two")
    parser.add_argument("--dirs", default=None, help="Joe-Kuo direction-number file")
    parser.set_defaults(handler=run)


def _is_dyadic(value: float) -> bool:
    mantissa, _ = math.frexp(value)
    return mantissa == 0.5


def run(args: argparse.Namespace) -> int:
    check_range("d", args.d, 1, MAX_DIMENSION)
    check_range("m", args.m, 0, MAX_M)
    dirs = default_direction_numbers(args.d, path=args.dirs)
    points = scramble(sobol_points(dirs, args.d, args.m), args.scramble, args.seed)
    x = to_unit_cube(points)

    t = min_t(x, args.m, args.d)
    lines = [
        f"points: {points.n} in d={args.d} ({args.scramble}, seed {args.seed})",
        f"min_t: {t}",
        f"stratified: {'yes' if verify_stratified(x) else 'no'}",
    ]

    if args.beta is not None:
        build_selector(args.beta)
        dyadic = all(_is_dyadic(b) for b in args.beta)
        if dyadic or args.require_nets:
            for check in verify_stratum_nets(x, args.beta, args.m, t):
                verdict = "pass" if check.passed else "FAIL"
                lines.append(
                    f"stratum {check.stratum + 1}: beta={format_fraction(args.beta[check.stratum])} "
                    f"m={check.m} t={check.t} {verdict}"
                )
        else:
            print("fractions are not all powers of two; reporting count bounds only", file=sys.stderr)
            lower = 0.0
            for l, b in enumerate(args.beta):
                upper = 1.0 if l == len(args.beta) - 1 else lower + b
                count = count_in_interval(x[:, 0], lower, upper)
                verdict = "pass" if count.within_bounds else "FAIL"
                lines.append(f"stratum {l + 1}: beta={b:g} count={count.count} bounds=[{count.lower}, {count.upper}] {verdict}")
                lower = upper
    write_lines(lines)
    return EXIT_OK
