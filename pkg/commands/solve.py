import argparse
from pathlib import Path

from commands.common import add_io_arguments, command_spec, load_spec_problem, output_path, problem_provenance
from errors import InvalidConfigError
from services.extremal_solver import solve_extremal, solve_for_u
from services.problem_loader import to_problem_config
from services.results_store import results_store

# key set of the solve record
RECORD_KEYS = ("config", "solution", "provenance")


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="solve the extremal problem and write its record as JSON")
    add_io_arguments(parser)
    target = parser.add_mutually_exclusive_group()
    target.add_argument("--radius", type=float, help="separation radius r")
    target.add_argument("--target-u", type=float, help="solve for the radius at which u equals this value")
    parser.add_argument("--ellipsoid-radius", type=float, default=1.0, help="radius R of the smoothness ellipsoid")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> Path:
    """Solve one extremal problem"""
    spec = command_spec(args)
    problem_file = load_spec_problem(spec)
    config = to_problem_config(problem_file)

    radius, target_u = args.radius, args.target_u
    if radius is None and target_u is None:
        radius, target_u = problem_file.experiment.radius, problem_file.experiment.target_u
    if radius is not None:
        solution = solve_extremal(config, radius, ellipsoid_radius=args.ellipsoid_radius)
    elif target_u is not None:
        if args.ellipsoid_radius != 1.0:
            raise InvalidConfigError("--ellipsoid-radius applies to --radius only")
        solution = solve_for_u(config, target_u)
    else:
        raise InvalidConfigError("solve needs --radius, --target-u or experiment.radius in the config")

    record = {
        "config": config.model_dump(mode="json"),
        "solution": solution.to_record(),
        "provenance": problem_provenance(problem_file).model_dump(),
    }
    path, _ = results_store.write_json(record, output_path(spec))
    return path
