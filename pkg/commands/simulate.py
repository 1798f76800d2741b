import argparse
from pathlib import Path

import pandas as pd

from commands.common import (
    add_io_arguments,
    command_spec,
    load_spec_problem,
    output_path,
    problem_provenance,
    provenance_columns,
)
from config import DEFAULT_THREADS
from models import ErrorEstimates
from services.monte_carlo_lab import estimate_errors
from services.problem_loader import to_experiment_plan
from services.results_store import results_store

COLUMNS = [
    "alpha", "radius", "u", "type1", "type2", "predicted_type2", "type1_se", "type2_se", "seed",
    "replications", "threshold", "null_mean", "null_variance",
    "alternative_mean", "alternative_variance", "support_size",
]


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Monte Carlo estimate of the type I and type II errors")
    add_io_arguments(parser)
    target = parser.add_mutually_exclusive_group()
    target.add_argument("--radius", type=float, help="separation radius r")
    target.add_argument("--target-u", type=float, help="choose the radius so that u equals this value")
    parser.add_argument("--replications", type=int, help="replications per arm")
    parser.add_argument("--seed", type=int, help="64-bit seed")
    parser.add_argument(
        "--threads", type=int, default=DEFAULT_THREADS,
        help="worker threads (default from SEQTEST_THREADS)",
    )
    parser.add_argument("--threshold-rule", choices=["quantile_alpha", "consistency_cu"])
    parser.add_argument("--c", dest="consistency_c", type=float, help="constant c in (0,1) for consistency_cu")
    parser.set_defaults(handler=run)


def estimates_row(estimates: ErrorEstimates) -> dict:
    return {
        "alpha": estimates.alpha,
        "radius": estimates.radius,
        "u": estimates.u_value,
        "type1": estimates.type1_rate,
        "type2": estimates.type2_rate,
        "predicted_type2": estimates.predicted_type2,
        "type1_se": estimates.type1_se,
        "type2_se": estimates.type2_se,
        "seed": estimates.seed,
        "replications": estimates.replications,
        "threshold": estimates.threshold,
        "null_mean": estimates.null_mean,
        "null_variance": estimates.null_variance,
        "alternative_mean": estimates.alternative_mean,
        "alternative_variance": estimates.alternative_variance,
        "support_size": estimates.support_size,
    }


def run(args: argparse.Namespace) -> Path:
    """Estimate both error probabilities for one plan"""
    spec = command_spec(args)
    problem_file = load_spec_problem(spec)
    plan = to_experiment_plan(
        problem_file,
        radius=args.radius,
        target_u=args.target_u,
        replications=args.replications,
        seed=spec.seed,
        threshold_rule=args.threshold_rule,
        consistency_c=args.consistency_c,
    )
    estimates = estimate_errors(plan, workers=args.threads)

    row = estimates_row(estimates)
    provenance = problem_provenance(problem_file, seed=plan.seed)
    frame = pd.DataFrame([{**row, **provenance_columns(provenance, row)}])
    path, _ = results_store.write_csv(frame, output_path(spec))
    return path
