"""
experiment - replicate variance of the estimators over n = 2^m.
"""
import argparse
import logging
import sys

from mixqmc.config import get_settings
from mixqmc.exceptions import EXIT_OK
from mixqmc.models import get_model
from mixqmc.schemas.experiment import ESTIMATOR_NAMES, ExperimentGrid
from mixqmc.services.experiment_service import run_experiment, summarize_slopes
from mixqmc.services.net_service import default_direction_numbers
from mixqmc.utils.output import write_csv

logger = logging.getLogger(__name__)


def add_parser(subparsers) -> None:
    settings = get_settings()
    parser = subparsers.add_parser("experiment", help="Variance-versus-n study for one model")
    parser.add_argument("--model", default="toy", help="toy, flood or file:<path>")
    parser.add_argument("--m-min", type=int, default=settings.default_m_min)
    parser.add_argument("--m-max", type=int, default=settings.default_m_max)
    parser.add_argument("--reps", type=int, default=settings.default_reps, help="Replicates per cell")
    parser.add_argument("--seed", type=int, default=settings.default_seed, help="Master seed")
    parser.add_argument(
        "--rho", type=float, action="append", default=None,
        help="Design rate of the allocation estimators; repeat for a sweep (inf allowed)",
    )
    parser.add_argument("--ansatz", type=int, choices=(0, 1), default=0)
    parser.add_argument(
        "--estimators", default=",".join(ESTIMATOR_NAMES),
        help=f"Comma separated subset of {','.join(ESTIMATOR_NAMES)}",
    )
    parser.add_argument("--threads", type=int, default=settings.threads)
    parser.add_argument("--scramble", choices=("nested-uniform", "linear-with-shift"), default=settings.scramble_kind)
    parser.add_argument("--dirs", default=None, help="Joe-Kuo direction-number file")
    parser.add_argument("--omit-timing", action="store_true", help="Write wall_ms as 0")
    parser.add_argument("--out", default=None, help="Write CSV here instead of stdout")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    grid = ExperimentGrid(
        model=args.model,
        m_min=args.m_min,
        m_max=args.m_max,
        reps=args.reps,
        estimators=[name.strip() for name in args.estimators.split(",") if name.strip()],
        rhos=args.rho,
        ansatz=args.ansatz,
        seed=args.seed,
        threads=args.threads,
        scramble=args.scramble,
        omit_timing=args.omit_timing,
    )
    model = get_model(grid.model)
    dirs = default_direction_numbers(model.spec.dimension + 1, path=args.dirs) if args.dirs else None
    logger.info(
        f"Experiment {model.name}: m={grid.m_min}..{grid.m_max}, R={grid.reps}, estimators={grid.estimators}"
    )

    frame = run_experiment(grid, model, dirs)
    write_csv(frame, args.out)

    reference = model.reference_mean()
    if reference is not None:
        print(f"reference mean: {reference!r}", file=sys.stderr)
    slopes = summarize_slopes(frame)
    for row in slopes.itertuples(index=False):
        print(f"slope {row.estimator}: {row.slope:.3f} ({row.points} points)", file=sys.stderr)
    return EXIT_OK
