"""Command-line driver.

Verbs: check-axioms, verify-family, residual, solve-bider, match.

Exit codes: 0 when the operation ran and (for checking verbs) the
mathematical check passed; 1 when a check failed; 2 on usage or I/O
errors, with a one-line diagnostic naming the offending flag.

Negative rationals must be passed in the --flag=value form, e.g. --b=-3/2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .algebra import AlgebraError, check_axioms, load_algebra, make_catalog
from .bimaps import FamilyError, MapError, TAGS, load_map, make_family, verify_map
from .solver import SolverError, match_templates, solve_bider, solver_report

USAGE_ERROR = 2
CHECK_FAILED = 1


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcalab",
        description="Exact workbench for Lie conformal algebras: axiom checks, "
                    "biderivation residuals, and brute-force classification.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p: argparse.ArgumentParser, degree: bool = False) -> None:
        p.add_argument("--catalog", choices=["vir", "cw", "clw"],
                       help="built-in algebra")
        p.add_argument("--algebra", metavar="FILE", help="algebra definition file")
        p.add_argument("--m", type=int, default=1, metavar="INT",
                       help="grading modulus for catalog algebras (default 1)")
        p.add_argument("--b", metavar="RAT|symbolic",
                       help="structure parameter for --catalog clw "
                            "(default symbolic; use --b=-1 for negatives)")
        if degree:
            p.add_argument("--degree", type=int, required=True, metavar="INT",
                           help="ansatz degree bound in d, l")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--out", metavar="PATH", help="write the report here")

    p = sub.add_parser("check-axioms", help="check skew-symmetry and Jacobi residuals")
    add_common(p)

    p = sub.add_parser("verify-family", help="build a closed-form family and "
                                             "check identity residuals")
    add_common(p)
    p.add_argument("--family", choices=["inner", "cw", "clw"], required=True)
    p.add_argument("--shift", type=int, default=0, metavar="INT")
    p.add_argument("--t", metavar="RAT", help="inner family coefficient (default 1)")
    p.add_argument("--a", metavar="RAT", help="shift family coefficient (default 1)")
    p.add_argument("--g", metavar="RAT", help="g-component coefficient (default 0)")
    p.add_argument("--eq", choices=list(TAGS) + ["all"], default="all")

    p = sub.add_parser("residual", help="check identity residuals of a map file")
    add_common(p)
    p.add_argument("--map", metavar="FILE", required=True, dest="map_file")
    p.add_argument("--eq", choices=list(TAGS) + ["all"], default="all")

    p = sub.add_parser("solve-bider", help="classify biderivations by exact "
                                           "nullspace computation")
    add_common(p, degree=True)
    p.add_argument("--eq", choices=["def1a", "def1b", "lem1", "all"], default="def1b",
                   help="constraints beyond skew-symmetry (def1a always included)")

    p = sub.add_parser("match", help="solve, then require a full match against "
                                     "the family templates")
    add_common(p, degree=True)
    p.add_argument("--eq", choices=["def1a", "def1b", "lem1", "all"], default="def1b")

    return parser


def _parse_rational(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: not a rational number: {text!r}") from None


def _build_algebra(args):
    if (args.catalog is None) == (args.algebra is None):
        raise UsageError("exactly one of --catalog or --algebra is required")
    if args.algebra is not None:
        for flag in ("m", "b"):
            if getattr(args, flag) not in (None, 1):
                raise UsageError(f"--{flag} only applies to --catalog algebras")
        return load_algebra(args.algebra)
    b = None
    if args.b is not None:
        if args.catalog != "clw":
            raise UsageError("--b is only valid with --catalog clw")
        if args.b != "symbolic":
            b = _parse_rational(args.b, "--b")
    return make_catalog(args.catalog, args.m, b)


def _solver_tags(eq: str) -> tuple[str, ...]:
    if eq == "all":
        return ("def1a", "def1b", "lem1")
    if eq == "def1a":
        return ("def1a",)
    return ("def1a", eq)


def _residual_tags(eq: str) -> tuple[str, ...]:
    return TAGS if eq == "all" else (eq,)


def _emit(args, payload) -> None:
    if args.format == "json":
        text = json.dumps(payload if isinstance(payload, dict) else payload.to_json(),
                          indent=2)
    else:
        text = payload if isinstance(payload, str) else payload.to_text()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _solve_report_text(report: dict) -> str:
    lines = [f"algebra {report['algebra']}",
             f"degree {report['degree']}  tags {','.join(report['tags'])}",
             f"unknowns {report['unknowns']}  rows {report['rows']}  "
             f"dimension {report['dimension']}"]
    for entry in report["matched"]:
        combo = " + ".join(f"{c}*{name}" for name, c in entry["combination"].items())
        lines.append(f"basis[{entry['basis']}] = {combo or '0'}")
    for entry in report["unmatched"]:
        lines.append(f"basis[{entry['basis']}] UNMATCHED: "
                     f"{json.dumps(entry['map']['entries'])}")
    return "\n".join(lines)


def _run(args) -> int:
    algebra = _build_algebra(args)

    if args.verb == "check-axioms":
        report = check_axioms(algebra)
        _emit(args, report)
        return 0 if report.passed else CHECK_FAILED

    if args.verb == "verify-family":
        kind = {"inner": "inner", "cw": "cw_shift", "clw": "clw_shift"}[args.family]
        params = {}
        if args.t is not None:
            params["t"] = _parse_rational(args.t, "--t")
        if args.a is not None:
            params["a"] = _parse_rational(args.a, "--a")
        if args.g is not None:
            params["g"] = _parse_rational(args.g, "--g")
        try:
            phi = make_family(algebra, kind, shift=args.shift, **params)
        except FamilyError as exc:
            raise UsageError(f"--family/--shift/--t/--a/--g: {exc}") from None
        report = verify_map(phi, _residual_tags(args.eq))
        _emit(args, report)
        return 0 if report.passed else CHECK_FAILED

    if args.verb == "residual":
        phi = load_map(args.map_file, algebra)
        report = verify_map(phi, _residual_tags(args.eq))
        _emit(args, report)
        return 0 if report.passed else CHECK_FAILED

    # solve-bider / match
    try:
        space = solve_bider(algebra, args.degree, _solver_tags(args.eq))
    except SolverError as exc:
        raise UsageError(f"--degree/--b: {exc}") from None
    match = match_templates(space)
    report = solver_report(space, match)
    if args.format == "json":
        _emit(args, report)
    else:
        _emit(args, _solve_report_text(report))
    if args.verb == "match":
        return 0 if match.fully_matched else CHECK_FAILED
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return _run(args)
    except UsageError as exc:
        print(f"lcalab: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (AlgebraError, MapError, OSError) as exc:
        print(f"lcalab: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
