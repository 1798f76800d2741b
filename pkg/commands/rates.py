import argparse
import math
from pathlib import Path

import numpy as np
import pandas as pd

from commands.common import (
    add_io_arguments,
    command_spec,
    load_spec_problem,
    output_path,
    problem_provenance,
    provenance_columns,
)
from config import DEFAULT_RATE_EPSILONS
from services.asymptotics import fit_rate_exponent, log_rate_path, regime_for, separation_rate
from services.problem_loader import to_problem_config
from services.results_store import results_store

COLUMNS = ["epsilon", "r_star", "fitted_slope", "r_solved", "u", "predicted", "scale", "regime"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("rates", help="sweep epsilon and compare solved radii with the closed-form rate")
    add_io_arguments(parser)
    parser.add_argument(
        "--epsilons", type=float, nargs="+", default=list(DEFAULT_RATE_EPSILONS),
        help="noise levels (default 2^-4 ... 2^-12)",
    )
    parser.add_argument("--target-u", type=float, default=1.0, help="signal-to-noise level to solve for")
    parser.add_argument(
        "--log-constant", type=float,
        help="sobolev_severe only: evaluate u along r = (C log(1/eps))^-s instead of fitting",
    )
    parser.set_defaults(handler=run)


def _fitted_rows(config, epsilons, target_u):
    fit = fit_rate_exponent(config, epsilons, target_u)
    rows = []
    for eps, radius in zip(fit.epsilons, fit.radii):
        rows.append({
            "epsilon": eps,
            "r_star": separation_rate(fit.regime, eps).r_star,
            "fitted_slope": fit.slope,
            "r_solved": radius,
            "u": target_u,
            "predicted": fit.predicted,
            "scale": fit.scale,
            "regime": fit.regime.kind,
        })
    return rows


def _log_path_rows(config, epsilons, log_constant):
    regime = regime_for(config)
    path = log_rate_path(config, log_constant, sorted(epsilons, reverse=True))
    # slope of log u against log eps: negative means u grows as eps -> 0
    log_eps = np.log([eps for eps, _, _ in path])
    log_u = np.log([u for _, _, u in path])
    slope = float(np.polyfit(log_eps, log_u, 1)[0]) if len(path) > 1 else math.nan
    predicted = 2.0 * regime.degrees[0] * log_constant - 2.0
    return [
        {
            "epsilon": eps,
            "r_star": radius,
            "fitted_slope": slope,
            "r_solved": radius,
            "u": u,
            "predicted": predicted,
            "scale": "log",
            "regime": regime.kind,
        }
        for eps, radius, u in path
    ]


def run(args: argparse.Namespace) -> Path:
    """Rate sweep over a grid of noise levels"""
    spec = command_spec(args)
    problem_file = load_spec_problem(spec)
    config = to_problem_config(problem_file)

    if args.log_constant is not None:
        rows = _log_path_rows(config, args.epsilons, args.log_constant)
    else:
        rows = _fitted_rows(config, args.epsilons, args.target_u)

    provenance = problem_provenance(problem_file)
    frame = pd.DataFrame(
        [{**row, **provenance_columns(provenance, row)} for row in rows]
    )
    path, _ = results_store.write_csv(frame, output_path(spec))
    return path
