"""
Command line interface: ``ddh <command> [flags]``.

Exit codes: 0 every check passed, 1 a check failed (reports are still
printed), 2 input or parse error, 3 resource limit or solver bound reached.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional

from pydantic import BaseModel

from .axiom import VStar, check_condition_i, check_witness
from .coeffield import RATIONAL_FUNCTIONS, RATIONALS, CoefficientField
from .config import GROEBNER_BUDGET, LOG_LEVEL
from .dstructure import DStructure, check_structure
from .errors import (DDHError, NoSolutionFoundAtBound, NotInFiltration, PreconditionFailed, ResourceLimit,
                     SessionError, SolverFailed)
from .extend import ExtensionRequest, extend_to_element
from .finitealg import FiniteAlgebra
from .hensel import lift_any
from .logger import setup_logger
from .parser import parse_element, parse_point, parse_poly, parse_set
from .prolongation import nabla, pihat, point_text, tau_generators
from .reduction import check_autoreduced, check_coherent, membership_report, rank_report, ritt_remainder
from .reports import ValuesReport
from .session import Session
from .solvers import parse_solver

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


@dataclass
class Outcome:
    reports: List[BaseModel]
    passed: bool = True

    def render(self) -> str:
        return "\n\n".join(r.render() for r in self.reports)


# ---------------------------
# Resolution of flags against an optional session
# ---------------------------
def parse_field(text: Optional[str]) -> CoefficientField:
    """``m=1,s=1``; s=0 gives QQ."""
    values = {"m": 1, "s": 1}
    for part in (text or "").replace(" ", ",").split(","):
        if not part:
            continue
        key, _, value = part.partition("=")
        if key not in values or not value.isdigit():
            raise SessionError(f"cannot read field option {part!r}; use m=<n>,s=<n>")
        values[key] = int(value)
    kind = RATIONALS if values["s"] == 0 else RATIONAL_FUNCTIONS
    return CoefficientField(values["m"], kind, values["s"])


class Context:
    def __init__(self, session: Optional[Session] = None, field_text: Optional[str] = None,
                 algebra: Optional[str] = None, structure: Optional[str] = None,
                 solver: Optional[str] = None, budget: int = GROEBNER_BUDGET):
        self.session = session
        self.field = session.field if session is not None else parse_field(field_text)
        self.default_algebra = algebra
        self.default_structure = structure
        self.solver_text = solver
        self.budget = budget

    def _declared(self, table: str, name: Optional[str]) -> bool:
        return self.session is not None and name is not None and name in getattr(self.session.data, table)

    def polys(self, ref: str):
        if self._declared("sets", ref):
            return self.session.polys(ref)
        return parse_set(ref.split(";"), self.field)

    def autoreduced(self, ref: str):
        return check_autoreduced(self.polys(ref))

    def algebra(self, ref: Optional[str] = None) -> FiniteAlgebra:
        ref = ref or self.default_algebra
        if ref is None:
            raise SessionError("no algebra given; use --algebra")
        if self._declared("algebras", ref):
            return self.session.algebra(ref)
        return FiniteAlgebra.product([p for p in ref.split(";") if p.strip()], name=ref)

    def structure(self, ref: Optional[str] = None, algebra: Optional[str] = None) -> DStructure:
        ref = ref or self.default_structure or "trivial"
        if self._declared("structures", ref):
            return self.session.structure(ref)
        if ref != "trivial":
            raise SessionError(f"unknown structure {ref!r}")
        return DStructure.trivial(self.algebra(algebra), self.field)

    def system(self, ref: str, algebra: Optional[str] = None):
        if self._declared("systems", ref):
            return self.session.system(ref)
        return parse_set(ref.split(";"), self.field, self.algebra(algebra))

    def solver(self, text: Optional[str] = None):
        try:
            return parse_solver(text or self.solver_text)
        except ValueError as exc:
            raise SessionError(str(exc)) from exc


def _require(opts: Mapping[str, Any], *keys: str) -> None:
    missing = [k for k in keys if not opts.get(k)]
    if missing:
        raise SessionError(f"missing option(s): {', '.join('--' + k for k in missing)}")


# ---------------------------
# Commands
# ---------------------------
def cmd_rank(ctx: Context, opts) -> Outcome:
    _require(opts, "set")
    return Outcome([rank_report(ctx.polys(opts["set"]))])


def cmd_reduce(ctx: Context, opts) -> Outcome:
    _require(opts, "set", "poly")
    cert = ritt_remainder(parse_poly(opts["poly"], ctx.field), ctx.autoreduced(opts["set"]))
    report = cert.to_report()
    return Outcome([report], report.verified)


def cmd_coherent(ctx: Context, opts) -> Outcome:
    _require(opts, "set")
    report = check_coherent(ctx.autoreduced(opts["set"]), int(opts.get("budget") or ctx.budget))
    return Outcome([report], report.coherent)


def cmd_member(ctx: Context, opts) -> Outcome:
    _require(opts, "set", "poly")
    report = membership_report(parse_poly(opts["poly"], ctx.field), ctx.autoreduced(opts["set"]))
    return Outcome([report], report.member)


def cmd_prolong(ctx: Context, opts) -> Outcome:
    _require(opts, "set")
    s = ctx.structure(opts.get("structure"), opts.get("algebra"))
    system = tau_generators(ctx.autoreduced(opts["set"]), s)
    return Outcome([system.to_report()])


def cmd_nabla(ctx: Context, opts) -> Outcome:
    _require(opts, "point")
    s = ctx.structure(opts.get("structure"), opts.get("algebra"))
    image = nabla(parse_point(opts["point"], ctx.field), s)
    return Outcome([ValuesReport(title=f"nabla by {s.name}", values=point_text(image, ctx.field))])


def cmd_pihat(ctx: Context, opts) -> Outcome:
    _require(opts, "point")
    s = ctx.structure(opts.get("structure"), opts.get("algebra"))
    i = int(opts.get("index") or 0)
    image = pihat(i, parse_point(opts["point"], ctx.field), s)
    return Outcome([ValuesReport(title=f"pihat{i} by {s.name}", values=point_text(image, ctx.field))])


def _points(ctx: Context, text: str):
    parts = [p for p in text.split("|") if p.strip()]
    points = [parse_point(p, ctx.field) for p in parts]
    return points[0] if len(points) == 1 else points


def cmd_lift(ctx: Context, opts) -> Outcome:
    _require(opts, "system", "point")
    lam = ctx.system(opts["system"], opts.get("algebra"))
    result = lift_any(lam, _points(ctx, opts["point"]), ctx.solver(opts.get("solver")),
                      budget=int(opts.get("budget") or ctx.budget))
    return Outcome([result.to_report()], result.verified)


def cmd_extend(ctx: Context, opts) -> Outcome:
    _require(opts, "element", "targets")
    s = ctx.structure(opts.get("structure"), opts.get("algebra"))
    if not opts.get("transcendental"):
        _require(opts, "set")
    lam = None if opts.get("transcendental") else ctx.autoreduced(opts["set"])
    targets = [parse_element(t, ctx.field) for t in str(opts["targets"]).split("|") if t.strip()]
    request = ExtensionRequest(s, parse_element(opts["element"], ctx.field), lam, targets)
    result = extend_to_element(request, ctx.solver(opts.get("solver")))
    return Outcome([result.to_report()], result.checks is None or result.checks.passed)


def cmd_check_structure(ctx: Context, opts) -> Outcome:
    s = ctx.structure(opts.get("structure"), opts.get("algebra"))
    report = check_structure(s)
    return Outcome([report], report.passed)


def cmd_check_axiom3(ctx: Context, opts) -> Outcome:
    _require(opts, "set", "gamma")
    s = ctx.structure(opts.get("structure"), opts.get("algebra"))
    lam = VStar(ctx.autoreduced(opts["set"]), "lam")
    gamma = VStar(ctx.autoreduced(opts["gamma"]), "gamma")
    reports = [check_condition_i(lam, gamma, s)]
    for text in opts.get("witness") or []:
        reports.append(check_witness(parse_point(text, ctx.field), lam, gamma, s))
    return Outcome(reports, all(r.passed for r in reports))


HANDLERS: Dict[str, Callable[[Context, Mapping[str, Any]], Outcome]] = {
    "rank": cmd_rank,
    "reduce": cmd_reduce,
    "coherent": cmd_coherent,
    "member": cmd_member,
    "prolong": cmd_prolong,
    "nabla": cmd_nabla,
    "pihat": cmd_pihat,
    "lift": cmd_lift,
    "extend": cmd_extend,
    "check-structure": cmd_check_structure,
    "check-axiom3": cmd_check_axiom3,
}


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, (ResourceLimit, NoSolutionFoundAtBound)):
        return EXIT_LIMIT
    if isinstance(exc, (PreconditionFailed, NotInFiltration, SolverFailed)):
        return EXIT_FAILED
    return EXIT_INPUT


def execute(command: str, ctx: Context, opts: Mapping[str, Any]) -> Outcome:
    logger.info("running %s", command)
    return HANDLERS[command](ctx, opts)


def run_session(ctx: Context) -> List[Outcome]:
    """Commands run in declaration order; reports keep that order."""
    if ctx.session is None:
        raise SessionError("run needs --session")
    return [execute(c.op, ctx, c.args) for c in ctx.session.data.commands]


# ---------------------------
# Argument parsing
# ---------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--session", type=str, help="Session file (JSON)")
    common.add_argument("--field", type=str, help="Field options m=<n>,s=<n> when no session is given")
    common.add_argument("--algebra", type=str, help="Algebra name, or pieces such as 'local(d=2);point'")
    common.add_argument("--structure", type=str, help="Structure name or 'trivial'")
    common.add_argument("--solver", type=str, help="exact:deg=<D> or jet:point=<p>,order=<N>")
    common.add_argument("--budget", type=int, default=GROEBNER_BUDGET, help="Groebner step budget")
    common.add_argument("--out", type=str, help="Also write the reports to this path")

    parser = argparse.ArgumentParser(prog="ddh", description="Exact differential algebra and Hensel lifting")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "rank": ["set"],
        "reduce": ["set", "poly"],
        "coherent": ["set"],
        "member": ["set", "poly"],
        "prolong": ["set"],
        "nabla": ["point"],
        "pihat": ["point", "index"],
        "lift": ["system", "point"],
        "extend": ["set", "element", "targets", "transcendental"],
        "check-structure": [],
        "check-axiom3": ["set", "gamma", "witness"],
        "run": [],
    }
    helps = {
        "set": "Set name, or polynomials separated by ';'",
        "poly": "A differential polynomial",
        "gamma": "Set name of the prolonged system",
        "point": "Point 'x1 = ..., x2 = ...'; lifts take one per factor separated by '|'",
        "index": "Factor index i",
        "system": "System name, or polynomials over the algebra separated by ';'",
        "element": "The element a",
        "targets": "Targets sigma_i(a) separated by '|'",
        "witness": "Witness point (repeatable)",
    }
    for name, options in specs.items():
        p = sub.add_parser(name, parents=[common])
        for opt in options:
            if opt == "transcendental":
                p.add_argument("--transcendental", action="store_true", help="a is differentially transcendental")
            elif opt == "witness":
                p.add_argument("--witness", action="append", help=helps[opt])
            else:
                p.add_argument(f"--{opt}", type=str, help=helps[opt])
    return parser


def _write(text: str, path: Optional[str]) -> None:
    print(text)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logger("ddh", level=LOG_LEVEL)
    opts = {k: v for k, v in vars(args).items() if v is not None}
    try:
        session = Session.load(args.session) if args.session else None
        ctx = Context(session, args.field, args.algebra, args.structure, args.solver, args.budget)
        outcomes = run_session(ctx) if args.command == "run" else [execute(args.command, ctx, opts)]
    except DDHError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write("\n\n".join(o.render() for o in outcomes), args.out)
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
