import argparse
from pathlib import Path

import pandas as pd

from commands.common import command_spec, output_path, provenance_columns
from errors import InvalidConfigError
from services.asymptotics import sobolev_constants, verify_J_lemmas, verify_lemma1
from services.results_store import results_store

COLUMNS = ["quantity", "exact", "asymptotic", "ratio", "residual"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="check lattice-sum asymptotics and constants by brute force")
    parser.add_argument("--output", help="output file (default: content-addressed file under the results directory)")
    parser.add_argument("--lemma", required=True, choices=["1", "J", "constants"])
    parser.add_argument("--R", type=float, help="lattice scale R")
    parser.add_argument("--t", type=float, nargs="+", help="spectrum degrees t_j")
    parser.add_argument("--s", type=float, nargs="+", required=True, help="smoothness exponents s_j")
    parser.add_argument("--u", type=float, nargs="+", help="powers u_j of the lattice power sum")
    parser.set_defaults(handler=run)


def _rows(args: argparse.Namespace) -> list:
    if args.lemma != "constants" and args.R is None:
        raise InvalidConfigError("--R is required for lemma checks")
    if args.lemma == "1":
        if args.u is None:
            raise InvalidConfigError("--u is required for --lemma 1")
        checks = [verify_lemma1(args.u, args.s, args.R)]
    elif args.lemma == "J":
        if args.t is None:
            raise InvalidConfigError("--t is required for --lemma J")
        checks = verify_J_lemmas(args.t, args.s, args.R)
    else:
        if args.t is None:
            raise InvalidConfigError("--t is required for --lemma constants")
        constants = sobolev_constants(args.t, args.s)
        rows = []
        for name in ("C0", "C1", "C2"):
            closed_form = getattr(constants, name)
            oracle = constants.oracle[name]
            rows.append({
                "quantity": name,
                "exact": oracle,
                "asymptotic": closed_form,
                "ratio": oracle / closed_form,
                "residual": constants.residuals[name],
            })
        return rows
    return [
        {
            "quantity": check.quantity,
            "exact": check.exact,
            "asymptotic": check.asymptotic,
            "ratio": check.ratio,
            "residual": check.residual,
        }
        for check in checks
    ]


def run(args: argparse.Namespace) -> Path:
    """Verification table for one lemma or constant family"""
    spec = command_spec(args)
    if len(args.s) != len(args.t or args.s) or len(args.s) != len(args.u or args.s):
        raise InvalidConfigError("--t, --s and --u need the same number of entries")
    rows = _rows(args)

    parameters = {"lemma": args.lemma, "R": args.R, "t": args.t, "s": args.s, "u": args.u}
    convention = "2^d" if args.lemma == "J" else "1"
    provenance = results_store.provenance(parameters, None, convention)
    frame = pd.DataFrame([{**row, **provenance_columns(provenance, row)} for row in rows])
    path, _ = results_store.write_csv(frame, output_path(spec))
    return path
