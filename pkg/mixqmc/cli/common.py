"""
Arguments and helpers shared by several commands.
"""
import argparse
from typing import List

from mixqmc.exceptions import DomainError
from mixqmc.models import get_model
from mixqmc.utils.output import parse_float_list


def float_list(text: str) -> List[float]:
    """argparse type for "0.9,0.05,0.05"."""
    try:
        values = list(parse_float_list(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def add_alpha_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--alpha", type=float_list, help="Mixture weights, e.g. 0.9,0.05,0.05")
    source.add_argument("--model", help="Take the weights of a model: toy, flood or file:<path>")


def resolve_alpha(args: argparse.Namespace) -> List[float]:
    if args.alpha is not None:
        return args.alpha
    model = get_model(args.model)
    return model.spec.alpha.tolist()


def add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="Write CSV here instead of stdout")


def check_range(name: str, value: int, lo: int, hi: int) -> None:
    if not lo <= value <= hi:
        raise DomainError(f"{name} must lie in [{lo}, {hi}] (got {value})")
