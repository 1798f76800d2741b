"""
Command-line entry point.

    python main.py solve    --config configs/demo.yaml --radius 0.681385
    python main.py rates    --config configs/sobolev_mild.yaml
    python main.py simulate --config configs/demo.yaml --replications 10000 --seed 42
    python main.py verify   --lemma J --R 200 --t 0 --s 1
"""
import argparse
import logging
import sys
from typing import List, Optional

from config import LIBRARY_VERSION, LOG_LEVEL
from errors import SequenceTestError

# Import command modules
from commands.rates import register as register_rates
from commands.simulate import register as register_simulate
from commands.solve import register as register_solve
from commands.verify import register as register_verify

logger = logging.getLogger("seqtest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqtest",
        description="Minimax goodness-of-fit testing in sequence-space inverse problems",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {LIBRARY_VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-v info, -vv debug)")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="{solve,rates,simulate,verify}")

    # Include commands
    register_solve(subparsers)
    register_rates(subparsers)
    register_simulate(subparsers)
    register_verify(subparsers)
    return parser


def configure_logging(verbosity: int) -> None:
    level = {0: LOG_LEVEL, 1: "INFO"}.get(verbosity, "DEBUG")
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def run_command(argv: Optional[List[str]] = None) -> int:
    """Parse `argv`, run the subcommand and return the process exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.verbose)
    try:
        path = args.handler(args)
    except SequenceTestError as exc:
        print(exc.to_record().one_line(), file=sys.stderr)
        return exc.exit_status
    except Exception as exc:
        logger.debug("unexpected failure", exc_info=True)
        print(f"INTERNAL_ERROR: {exc}".replace("\n", " "), file=sys.stderr)
        return 1

    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(run_command())
