"""Command-line interface.

Exit codes: 0 success, 1 domain failure (invalid spec, unreachable location,
infeasible design, failed requirement), 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .design import (
    DesignError,
    FieldGrid,
    Metric,
    ProblemFileError,
    SweepRequest,
    load_problem,
    run_sweep,
    solve_design,
)
from .feasibility import RequirementFileError, check_manifest, load_requirements
from .kinematics import EndEffectorPose, WorkspaceLimitError, forward_kinematics, inverse_kinematics
from .robot_model import (
    Configuration,
    ConfigurationError,
    Mode,
    SpecError,
    SpecFileError,
    load_spec,
    validate_spec,
)
from .report import RunRecord, csv_text, fmt, write_text
from .statics import KINDS, UnboundedCapability, WorkspaceError, capability, capability_curve

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _length(value: float, units: str) -> str:
    return f"{value * 100:g} cm" if units == "cm" else f"{value:g} m"


def parse_grid(text: str) -> tuple[float, ...]:
    """``MIN:MAX:N`` (N evenly spaced points) or an explicit ``a,b,c`` list."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return FieldGrid.linspace("grid", float(lo), float(hi), int(n)).values
        return tuple(float(x) for x in text.split(","))
    except DesignError as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    except ValueError:
        raise CliError(f"bad grid {text!r}; expected MIN:MAX:N or a,b,c", EXIT_DOMAIN) from None


def _spec_path(args) -> str:
    path = args.spec or getattr(args, "spec_file", None)
    if not path:
        raise CliError("no robot spec given (--spec PATH)", EXIT_IO)
    return path


def _load_valid_spec(path: str):
    spec = _load(load_spec, path)
    report = validate_spec(spec)
    if not report.ok:
        raise CliError("invalid spec: " + "; ".join(report.messages), EXIT_DOMAIN)
    return spec


def _load(loader, path):
    try:
        return loader(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    except (SpecFileError, ProblemFileError, RequirementFileError) as exc:
        raise CliError(str(exc), EXIT_IO) from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        write_text(out, text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}", EXIT_IO) from None


def _record(args, command: str, inputs: Sequence[str], csv: str) -> None:
    if getattr(args, "record", None):
        _emit(RunRecord.build(command, inputs, csv).to_json(), args.record)


# -- subcommands -------------------------------------------------------------

def cmd_validate(args) -> int:
    path = _spec_path(args)
    spec = _load(load_spec, path)
    report = validate_spec(spec)
    if report.ok:
        print(f"{path}: valid")
        return EXIT_OK
    print(f"{path}: invalid")
    for v in report.violations:
        print(f"  {v.field}: {v.message} (got {v.value!r})")
    return EXIT_DOMAIN


def cmd_fk(args) -> int:
    spec = _load_valid_spec(_spec_path(args))
    config = Configuration(q_a=args.q_a, q_m=args.q_m, q_l=args.q_l, mode=Mode.MANIPULATION)
    try:
        pose = forward_kinematics(config, spec)
    except ConfigurationError as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    if args.format == "csv":
        sys.stdout.write(csv_text(["x_e", "y_e", "z_e"], [[pose.x_e, pose.y_e, pose.z_e]]))
    else:
        print(f"x_e = {_length(pose.x_e, args.units)}\n"
              f"y_e = {_length(pose.y_e, args.units)}\n"
              f"z_e = {_length(pose.z_e, args.units)}")
    return EXIT_OK


def cmd_ik(args) -> int:
    spec = _load_valid_spec(_spec_path(args))
    try:
        config = inverse_kinematics(EndEffectorPose(args.x, args.y, args.z), spec)
    except WorkspaceLimitError as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    if args.format == "csv":
        sys.stdout.write(csv_text(["q_a", "q_m", "q_l"], [[config.q_a, config.q_m, config.q_l]]))
    else:
        print(f"q_a = {_length(config.q_a, args.units)}\n"
              f"q_m = {_length(config.q_m, args.units)}\n"
              f"q_l = {_length(config.q_l, args.units)}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    spec = _load_valid_spec(_spec_path(args))
    if args.kind == "payload":
        location = spec.D if args.reach is None else args.reach
    else:
        if args.height is None:
            raise CliError(f"--height is required for --kind {args.kind}", EXIT_DOMAIN)
        location = args.height
    try:
        value = capability(spec, args.kind, location)
    except (UnboundedCapability, WorkspaceError) as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    unit = "kg" if args.kind == "payload" else "N"
    if args.format == "csv":
        sys.stdout.write(csv_text(["kind", "location", "value"], [[args.kind, location, value]]))
    else:
        where = "reach" if args.kind == "payload" else "height"
        print(f"{args.kind} at {where} {_length(location, args.units)}: {value:.2f} {unit}")
    return EXIT_OK


def cmd_curve(args) -> int:
    path = _spec_path(args)
    spec = _load_valid_spec(path)
    grid = parse_grid(args.grid)
    try:
        curve = capability_curve(spec, args.kind, grid)
    except (ValueError, WorkspaceError) as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    csv = csv_text(curve.header().split(","), zip(curve.grid, curve.values))
    _emit(csv, args.out)
    _record(args, "curve", [path], csv)
    return EXIT_OK


def cmd_sweep(args) -> int:
    path = _spec_path(args)
    spec = _load_valid_spec(path)
    if len(args.field) != len(args.grid):
        raise CliError("give one --grid per --field", EXIT_DOMAIN)
    metrics = []
    for kind in args.metric or ["payload"]:
        if kind == "payload":
            metrics.append(Metric("payload", args.reach))
        else:
            if not args.height:
                raise CliError(f"metric {kind!r} needs at least one --height", EXIT_DOMAIN)
            metrics.extend(Metric(kind, h) for h in args.height)
    try:
        grids = tuple(FieldGrid(name, parse_grid(g)) for name, g in zip(args.field, args.grid))
        table = run_sweep(SweepRequest(spec, grids, tuple(metrics)))
    except DesignError as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    rows = [[*r.params, *r.values, "true" if r.valid else "false", r.note] for r in table.rows]
    csv = csv_text(table.header(), rows)
    _emit(csv, args.out)
    _record(args, "sweep", [path], csv)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = _load(load_problem, args.problem)
    try:
        result = solve_design(problem)
    except DesignError as exc:
        raise CliError(str(exc), EXIT_DOMAIN) from None
    unit = "kg" if problem.target in ("m_r", "payload") else "m"
    header = [*problem.free_variables, "objective", *(c.describe() for c in problem.constraints)]
    row = [*(getattr(result.spec, v) for v in problem.free_variables), result.objective,
           *(m for _, m in result.margins)]
    if args.format == "csv":
        csv = csv_text(header, [row])
        _emit(csv, args.out)
        _record(args, "solve", [args.problem], csv)
    else:
        verb = "minimum" if problem.sense == "minimize" else "maximum"
        print(f"{verb} {problem.target} = {result.objective:.2f} {unit}")
        for var in problem.free_variables:
            print(f"  {var} = {fmt(getattr(result.spec, var))}")
        for c, margin in result.margins:
            print(f"  {c.describe()}: margin {fmt(margin)}")
    return EXIT_OK


def cmd_check(args) -> int:
    spec_path = args.spec or args.spec_file
    req_path = args.requirements or args.req_file
    if not spec_path or not req_path:
        raise CliError("check needs a robot spec and a requirement manifest", EXIT_IO)
    spec = _load_valid_spec(spec_path)
    reqs = _load(load_requirements, req_path)
    result = check_manifest(spec, reqs)
    header = ["name", "kind", "location", "requirement", "capability", "margin", "verdict"]
    rows = []
    for v in result.verdicts:
        r = v.requirement
        loc = spec.D if r.location is None else r.location
        rows.append([r.name, r.kind, loc, r.magnitude, v.capability, v.margin,
                     ("pass" if v.passed else "fail") + (f" ({v.reason})" if v.reason else "")])
    if args.format == "csv":
        csv = csv_text(header, rows)
        _emit(csv, args.out)
        _record(args, "check", [spec_path, req_path], csv)
    else:
        for (name, kind, loc, req, cap, margin, verdict), v in zip(rows, result.verdicts):
            unit = v.requirement.unit
            print(f"{verdict.upper():<18} {name:<20} {kind:<9} @ {_length(loc, args.units):<10} "
                  f"need {req:g} {unit}, capability {cap:.2f} {unit}, margin {margin:.2f} {unit}")
        print(result.summary())
    return EXIT_OK if result.all_passed else EXIT_DOMAIN


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stretchstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, spec_positional=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if spec_positional:
            p.add_argument("spec_file", nargs="?", metavar="SPEC")
            p.add_argument("--spec", metavar="PATH")
        p.add_argument("--format", choices=("table", "csv"), default="table")
        p.add_argument("--units", choices=("m", "cm"), default="m",
                       help="display unit for lengths (files are always SI)")
        return p

    add("validate", cmd_validate, "check a robot spec file")

    p = add("fk", cmd_fk, "forward kinematics")
    p.add_argument("--q-a", type=float, default=0.0)
    p.add_argument("--q-m", type=float, default=0.0)
    p.add_argument("--q-l", type=float, default=0.0)

    p = add("ik", cmd_ik, "inverse kinematics")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--z", type=float, required=True)

    p = add("analyze", cmd_analyze, "single capability value")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--height", type=float)
    p.add_argument("--reach", type=float)

    p = add("curve", cmd_curve, "capability over heights or reaches (CSV)")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--grid", required=True, metavar="MIN:MAX:N")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--record", metavar="PATH", help="write a JSON run record")

    p = add("sweep", cmd_sweep, "parameter sweep (CSV)")
    p.add_argument("--field", action="append", default=[], required=True)
    p.add_argument("--grid", action="append", default=[], required=True, metavar="MIN:MAX:N")
    p.add_argument("--metric", action="append", choices=("payload", "pull", "push", "backpush"))
    p.add_argument("--height", action="append", type=float)
    p.add_argument("--reach", type=float)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--record", metavar="PATH")

    p = add("solve", cmd_solve, "inverse design from a designproblem-v1 file",
            spec_positional=False)
    p.add_argument("problem", metavar="PROBLEM")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--record", metavar="PATH")

    p = add("check", cmd_check, "check a taskreq-v1 manifest against a spec")
    p.add_argument("req_file", nargs="?", metavar="REQUIREMENTS")
    p.add_argument("--requirements", metavar="PATH")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--record", metavar="PATH")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SpecError, ConfigurationError, WorkspaceError, UnboundedCapability) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
