"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 model error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import fixtures
from .document import load, serialize
from .errors import BondGraphError, SimulationError
from .model import diagnose
from .reduce import reduce_model
from .sim import simulate

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _assignment(text):
    name, eq, value = text.partition("=")
    if not eq or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad number in {text!r}") from None


def build_parser():
    p = _Parser(prog="bondgraph", description="Build, reduce and simulate bond-graph models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a model document")
    v.add_argument("file")

    r = sub.add_parser("relations", help="print reduced constitutive relations")
    r.add_argument("file")

    s = sub.add_parser("simulate", help="integrate a model and write CSV")
    s.add_argument("file")
    s.add_argument("--x0", type=_floats, required=True, help="initial state, e.g. 1,0")
    s.add_argument("--t0", type=float, default=0.0)
    s.add_argument("--t1", type=float, required=True)
    s.add_argument("--dt", type=float, required=True)
    s.add_argument("--control", action="append", default=[],
                   help="control expression in t; repeat once per control")
    s.add_argument("--param", action="append", default=[], type=_assignment,
                   help="value for a symbolic parameter, name=value")
    s.add_argument("--out", default="-", help="CSV path (default: standard output)")

    e = sub.add_parser("example", help="print a built-in example model document")
    e.add_argument("name", help=", ".join(fixtures.FIXTURES))
    return p


def cmd_validate(args, out, err):
    model = load(args.file)
    problems = diagnose(model)
    if not problems:
        try:
            reduce_model(model)
        except BondGraphError as exc:
            problems.append(str(exc))
    for msg in problems:
        print(msg, file=err)
    if problems:
        return EXIT_MODEL
    print(f"{args.file}: ok", file=out)
    return EXIT_OK


def cmd_relations(args, out, err):
    model = load(args.file)
    for rel in reduce_model(model).relations:
        print(rel, file=out)
    return EXIT_OK


def cmd_simulate(args, out, err):
    model = load(args.file)
    params = dict(args.param) or None
    traj = simulate(model, args.x0, [args.t0, args.t1], args.dt, args.control, parameters=params)
    if args.out == "-":
        traj.to_csv(out)
    else:
        traj.to_csv(args.out)
    stats = traj.stats
    print(f"steps={stats['steps']} newton_iterations={stats['newton_iterations']}", file=err)
    return EXIT_OK


def cmd_example(args, out, err):
    if args.name not in fixtures.FIXTURES:
        raise UsageError(f"unknown example {args.name!r}; choose from {', '.join(fixtures.FIXTURES)}")
    out.write(serialize(fixtures.build(args.name)))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "relations": cmd_relations,
    "simulate": cmd_simulate,
    "example": cmd_example,
}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_NUMERIC
    except BondGraphError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
