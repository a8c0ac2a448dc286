"""
inefficiency - table of I(gamma | rho) and the cautious design rate gamma_0.
"""
import argparse
import sys

from mixqmc.cli.common import add_alpha_arguments, add_output_argument, resolve_alpha
from mixqmc.config import get_settings
from mixqmc.exceptions import EXIT_OK
from mixqmc.services.allocation_service import inefficiency_table, minimax_gamma, rate_grid
from mixqmc.utils.output import CSV_FLOAT_FORMAT


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("inefficiency", help="Inefficiency of a misjudged variance rate")
    add_alpha_arguments(parser)
    parser.add_argument("--gamma-min", type=float, default=1.0)
    parser.add_argument("--gamma-max", type=float, default=3.0)
    parser.add_argument("--rho-min", type=float, default=1.0)
    parser.add_argument("--rho-max", type=float, default=3.0)
    parser.add_argument("--step", type=float, default=0.5, help="Spacing of the printed table")
    parser.add_argument("--ansatz", type=int, choices=(0, 1), default=0, help="1 appends the I1 matrix and bases gamma_0 on it")
    add_output_argument(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    alpha = resolve_alpha(args)
    gammas = rate_grid(args.gamma_min, args.gamma_max, args.step)
    rhos = rate_grid(args.rho_min, args.rho_max, args.step)
    tables = [inefficiency_table(alpha, gammas, rhos, 0)]
    if args.ansatz == 1:
        tables.append(inefficiency_table(alpha, gammas, rhos, 1).rename_axis("gamma_I1"))
    best = minimax_gamma(
        alpha,
        (args.gamma_min, args.gamma_max),
        (args.rho_min, args.rho_max),
        get_settings().minimax_grid_step,
        args.ansatz,
    )

    text = "".join(
        table.reset_index().to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n") for table in tables
    )
    footer = f"minimax,gamma0={best.gamma0:g},max={best.max_inefficiency!r},worst_rho={best.worst_rho:g}\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text + footer)
    else:
        sys.stdout.write(text + footer)
    return EXIT_OK
