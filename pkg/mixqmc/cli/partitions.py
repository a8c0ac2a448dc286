"""
partitions - dyadic partitions of unity into L parts.
"""
import argparse

from mixqmc.exceptions import EXIT_OK
from mixqmc.services.allocation_service import enumerate_partitions
from mixqmc.utils.output import format_fraction, write_lines


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("partitions", help="List partitions of unity into L negative powers of two")
    parser.add_argument("strata", type=int, metavar="L", help="Number of strata")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    catalogue = enumerate_partitions(args.strata)
    lines = [" ".join(format_fraction(f) for f in row) for row in catalogue.fractions()]
    lines.append(f"count: {catalogue.count}")
    write_lines(lines)
    return EXIT_OK
