"""
Command router - aggregates all sub-commands.
"""
import argparse
import logging
import sys
from typing import List, Optional

from mixqmc.cli import allocate, experiment, inefficiency, netcheck, partitions
from mixqmc.config import get_settings
from mixqmc.exceptions import EXIT_USAGE, handle_cli_error

COMMANDS = (allocate, partitions, inefficiency, experiment, netcheck)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixqmc",
        description="Randomized quasi-Monte Carlo sampling for mixture distributions",
    )
    parser.add_argument("--log-level", default=None, help="Logging level for stderr (default: MIXQMC_LOG_LEVEL)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Shortcut for --log-level DEBUG")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Include all command modules
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def configure_logging(level: Optional[str], verbose: bool = False) -> None:
    """Send all diagnostics to stderr; data goes to stdout or --out only."""
    name = "DEBUG" if verbose else (level or get_settings().log_level)
    logging.basicConfig(stream=sys.stderr, level=name.upper(), format=LOG_FORMAT, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0

    configure_logging(args.log_level, args.verbose)
    try:
        return args.handler(args)
    except Exception as exc:
        return handle_cli_error(exc)
