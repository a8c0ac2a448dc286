"""
allocate - sampling fractions and sample sizes per stratum.
"""
import argparse
import logging

import pandas as pd

from mixqmc.cli.common import add_alpha_arguments, add_output_argument, float_list, resolve_alpha
from mixqmc.exceptions import EXIT_OK
from mixqmc.schemas.allocation import AllocationRule
from mixqmc.services.allocation_service import (
    minimax_allocation,
    minimax_allocation_pow2,
    plan_allocation,
    plan_from_sizes,
)
from mixqmc.utils.output import write_csv

logger = logging.getLogger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("allocate", help="Plan per-stratum sample sizes")
    add_alpha_arguments(parser)
    parser.add_argument("--n", type=int, required=True, help="Total sample size")
    parser.add_argument("--rho", type=float, default=2.0, help="Design rate (inf for equal fractions)")
    parser.add_argument("--ansatz", type=int, choices=(0, 1), default=0)
    parser.add_argument("--tau", type=float_list, default=None, help="Relative within-stratum variance constants")
    parser.add_argument("--costs", type=float_list, default=None, help="Relative cost per sample")
    parser.add_argument("--pow2", action="store_true", help="Power-of-two sizes by forward doubling")
    parser.add_argument("--minimax", action="store_true", help="Most nearly equal sizes (ignores rho)")
    add_output_argument(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    alpha = resolve_alpha(args)
    if args.minimax and args.pow2:
        plan = minimax_allocation_pow2(args.n, len(alpha), alpha)
    elif args.minimax:
        plan = plan_from_sizes(alpha, minimax_allocation(args.n, len(alpha)))
    else:
        rule = AllocationRule(
            ansatz=args.ansatz, rho=args.rho, tau=args.tau, costs=args.costs, power_of_two=args.pow2
        )
        plan = plan_allocation(alpha, rule, args.n)

    if plan.doubling_steps is not None:
        logger.info(f"Forward allocation used {plan.doubling_steps} doublings")
    table = pd.DataFrame(
        {
            "stratum": range(1, plan.strata + 1),
            "alpha": plan.alpha,
            "xi": plan.xi,
            "beta": plan.beta,
            "n": plan.sizes,
            "omega": plan.weights,
        }
    )
    write_csv(table, args.out)
    return EXIT_OK
