import argparse
from pathlib import Path
from typing import Any, Dict, Optional

from models import CommandSpec, ProblemFile, Provenance
from services.problem_loader import load_problem_file, parse_overrides, to_problem_config
from services.results_store import results_store


def add_io_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="YAML problem file")
    parser.add_argument("--output", help="output file (default: content-addressed file under the results directory)")
    parser.add_argument(
        "--set", dest="overrides", action="append", metavar="SECTION.KEY=VALUE",
        help="override a config key, e.g. problem.epsilon=0.05 (repeatable)",
    )


def command_spec(args: argparse.Namespace) -> CommandSpec:
    return CommandSpec(
        subcommand=args.command,
        config_path=getattr(args, "config", None),
        output_path=getattr(args, "output", None),
        overrides=parse_overrides(getattr(args, "overrides", None)),
        seed=getattr(args, "seed", None),
    )


def load_spec_problem(spec: CommandSpec) -> ProblemFile:
    return load_problem_file(Path(spec.config_path), spec.overrides)


def problem_provenance(problem_file: ProblemFile, seed: Optional[int] = None) -> Provenance:
    config = to_problem_config(problem_file)
    return results_store.provenance(
        config.model_dump(mode="json"), seed, config.multiplicity_convention
    )


def provenance_columns(provenance: Provenance, row: Dict[str, Any]) -> Dict[str, Any]:
    """Provenance fields appended to a CSV row, skipping columns it already has"""
    return {key: value for key, value in provenance.model_dump().items() if key not in row}


def output_path(spec: CommandSpec) -> Optional[Path]:
    return Path(spec.output_path) if spec.output_path else None
