"""
Differential Hensel lifting across a nilpotent local algebra.

Given an autoreduced set over R = B_i (x) L (polynomials whose coefficients
carry the algebra's basis symbols) and a root a of its residue image with
H(a) != 0, the lift walks the filtration m > m^2 > ... > m^nu = 0. At level
i it linearizes every f at the current approximation, autoreduces the
linear systems (one per basis element of m^i / m^(i+1)), solves them with a
pluggable strategy, and adds the corrections.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed

from . import linalg
from .coeffield import CoefficientField, FieldElem
from .config import GROEBNER_BUDGET, N_JOBS
from .diffpoly import AlgIndet, DiffPoly, Var, theta_lcm, theta_quotient
from .errors import (ConstantPolynomial, NotAutoreduced, NotInFiltration, PreconditionFailed,
                     ProvenInconsistent, ResourceLimit, SolverFailed)
from .finitealg import DElement, FiniteAlgebra, LocalAlgebra
from .prolongation import evaluate_over
from .reduction import AutoreducedSet, check_autoreduced, check_coherent
from .reports import CheckReport, LiftLevelReport, LiftReport
from .solvers import ExactAnsatz, SolverStrategy, linear_form, matrix_domain

logger = logging.getLogger(__name__)

Point = Mapping[Var, FieldElem]


# ---------------------------
# Linearization
# ---------------------------
def linearize_residue(f: DiffPoly, a: Point) -> DiffPoly:
    """sum over theta x of (df/d theta x)(a) * theta x, read as a linear form in y = x."""
    terms = {}
    for u in f.indeterminates():
        c = f.partial(u).evaluate(a)
        if c:
            terms[((u, 1),)] = c
    return DiffPoly(f.field, terms)


def linearization_laws(f: DiffPoly, a: Point, g: Optional[DiffPoly] = None) -> CheckReport:
    """
    The laws of the linearization at a root a:

    it commutes with every derivation, ell(g*f) = g(a) * ell(f), and
    ell(f) has the leader of f with coefficient S_f(a).
    """
    report = CheckReport(title=f"linearization of {f.to_text()}")
    lin = linearize_residue(f, a)
    for j in range(1, f.field.m + 1):
        lhs, rhs = linearize_residue(f.derive(j), a), lin.derive(j)
        report.add(f"ell(d{j} f) = d{j} ell(f)", lhs == rhs, "" if lhs == rhs else f"{lhs.to_text()} vs {rhs.to_text()}")
    if g is not None:
        lhs = linearize_residue(g * f, a)
        rhs = lin.scale(g.evaluate(a))
        report.add("ell(g f) = g(a) ell(f)", lhs == rhs, "" if lhs == rhs else f"{lhs.to_text()} vs {rhs.to_text()}")
    if not f.is_constant():
        v = f.leader()
        s_a = f.separant().evaluate(a)
        same = (not s_a and v not in lin.indeterminates()) or (lin and lin.leader() == v)
        report.add("ell(f) has the leader of f", bool(same), str(v))
        coeff = lin.coefficient_of(v, 1).constant_value() if v in lin.indeterminates() else f.field.zero
        report.add("leading coefficient is S_f(a)", coeff == s_a, f.field.to_text(s_a))
    return report


def linear_autoreduce(system: Sequence[DiffPoly]) -> List[DiffPoly]:
    """
    Gauss-Jordan elimination with columns ordered by rank.

    Each step replaces l_g by l_g - (d/c) l_f, so the output generates the
    same differential ideal; pivots are the leaders, made monic. This is row
    reduction only: a leader may still be a derivative of another, and
    coherence is checked by the caller (``check_linear_coherent``).

    Raises:
        ProvenInconsistent: the system reduces to a nonzero constant
    """
    polys = [p for p in system if p]
    if not polys:
        return []
    fld = polys[0].field
    forms = [linear_form(p) for p in polys]
    columns = sorted({u for _, coeffs in forms for u in coeffs}, reverse=True)
    rows = [[coeffs.get(u, fld.zero) for u in columns] + [const] for const, coeffs in forms]
    reduced, pivots = linalg.rref(rows, len(columns) + 1, matrix_domain(fld))
    out = []
    for r, p in enumerate(pivots):
        row = reduced[r]
        if p == len(columns):
            raise ProvenInconsistent("linear system reduces to a nonzero constant",
                                     system=[q.to_text() for q in polys])
        terms = {((u, 1),): fld.convert(c) for u, c in zip(columns, row) if c}
        if row[-1]:
            terms[()] = fld.convert(row[-1])
        out.append(DiffPoly(fld, terms))
    return sorted(out, key=lambda p: p.rank_key())


# ---------------------------
# State of a lift
# ---------------------------
@dataclass
class LinearDiffSystem:
    """The equations for the coefficient of one basis element of m^i / m^(i+1)."""
    level: int
    index: int
    equations: List[DiffPoly]
    reduced: List[DiffPoly] = field(default_factory=list)
    solution: Dict[Var, FieldElem] = field(default_factory=dict)
    label: str = ""


@dataclass
class LiftState:
    level: int
    b: Dict[Var, DElement]
    a: Dict[Var, FieldElem]
    algebra: LocalAlgebra

    @property
    def basis_indices(self) -> List[int]:
        return self.algebra.level_indices(self.level)


@dataclass
class LiftResult:
    value: Dict[Var, DElement]
    solver: str
    systems: List[LinearDiffSystem] = field(default_factory=list)
    verified: bool = True
    notes: List[str] = field(default_factory=list)
    factor: Optional[int] = None

    def text(self) -> str:
        if len(self.value) == 1:
            return next(iter(self.value.values())).to_text()
        return ", ".join(f"{v} = {b.to_text()}" for v, b in sorted(self.value.items(), key=lambda it: it[0].key))

    def to_report(self) -> LiftReport:
        first = next(iter(self.value.values()))
        algebra, fld = first.algebra, first.field
        levels = []
        for level in sorted({s.level for s in self.systems}):
            group = [s for s in self.systems if s.level == level]
            label = {id(s): s.label or algebra.symbol(s.index) or "1" for s in group}
            levels.append(LiftLevelReport(
                level=level,
                basis=[label[id(s)] for s in group],
                equations=[f"[{label[id(s)]}] {eq.to_text()}" for s in group for eq in s.equations],
                autoreduced=[f"[{label[id(s)]}] {eq.to_text()}" for s in group for eq in s.reduced],
                solutions=[f"[{label[id(s)]}] " + ", ".join(
                    f"{v} = {fld.to_text(x)}" for v, x in sorted(s.solution.items(), key=lambda it: it[0].key))
                    for s in group if s.solution],
            ))
        return LiftReport(result=self.text(), solver=self.solver, levels=levels,
                          verified=self.verified, notes=self.notes)


# ---------------------------
# Preconditions
# ---------------------------
def _leader_over(f: DElement) -> Tuple[AlgIndet, int]:
    indets = {u for c in f.coords for u in c.indeterminates()}
    if not indets:
        raise ConstantPolynomial(f.to_text())
    v = max(indets)
    return v, max(c.degree(v) for c in f.coords)


def _as_local(f: DElement) -> DElement:
    if isinstance(f.algebra, LocalAlgebra):
        return f
    if f.algebra.factor_count != 1:
        raise PreconditionFailed("the algebra is local")
    return f.algebra.local_factor(0).project(f)


def _indets_over(f: DElement) -> List[AlgIndet]:
    return sorted({u for c in f.coords for u in c.indeterminates()}, reverse=True)


def _degree_over(f: DElement, u: AlgIndet) -> int:
    return max(c.degree(u) for c in f.coords)


def _coefficient_over(f: DElement, u: AlgIndet, d: int) -> DElement:
    return f.map(lambda c: c.coefficient_of(u, d))


def _theta_over(f: DElement, theta: Tuple[int, ...]) -> DElement:
    return f.map(lambda c: c.theta_apply(theta))


def delta_polynomial_over(f: DElement, g: DElement) -> Optional[Tuple[AlgIndet, DElement]]:
    """S_g*theta_f(f) - S_f*theta_g(g) with coefficients in D(K); None for different variables."""
    vf, vg = _leader_over(f)[0], _leader_over(g)[0]
    if vf.var != vg.var:
        return None
    theta = theta_lcm(vf.theta, vg.theta)
    s_f, s_g = f.map(lambda c: c.partial(vf)), g.map(lambda c: c.partial(vg))
    delta = s_g * _theta_over(f, theta_quotient(theta, vf.theta)) - \
        s_f * _theta_over(g, theta_quotient(theta, vg.theta))
    return AlgIndet(vf.var, theta), delta


def _lower_prolongations_over(lam: Sequence[DElement], v: AlgIndet) -> List[DElement]:
    out = []
    for h in lam:
        vh = _leader_over(h)[0]
        budget = v.order - vh.order
        if budget < 0:
            continue
        for theta in product(range(budget + 1), repeat=len(v.theta)):
            if sum(theta) <= budget and vh.apply(theta) < v:
                out.append(_theta_over(h, theta))
    return out


def pseudo_remainder_over(r: DElement, reducers: Sequence[DElement], budget: int = GROEBNER_BUDGET) -> DElement:
    """
    Algebraic pseudo-reduction with coefficients in D(K).

    Each step premultiplies by the initial of the reducer, which may be a
    zero divisor; the degree in the reduced indeterminate still drops.

    Raises:
        ResourceLimit: more than ``budget`` steps
    """
    ranked = [(_leader_over(g), g) for g in reducers]
    steps = 0
    while r:
        step = None
        for u in _indets_over(r):
            d = _degree_over(r, u)
            step = next(((u, d, e, g) for (v, e), g in ranked if v == u and d >= e), None)
            if step is not None:
                break
        if step is None:
            return r
        steps += 1
        if steps > budget:
            raise ResourceLimit(budget, "pseudo-reduction over the algebra")
        u, d, e, g = step
        top = _coefficient_over(r, u, d) * g
        if d > e:
            top = top * DiffPoly.from_indet(r.field, u, d - e)
        r = _coefficient_over(g, u, e) * r - top
    return r


def check_coherent_over(lam: Sequence[DElement], budget: int = GROEBNER_BUDGET) -> CheckReport:
    """
    Coherence of lam itself, pairs read over D(K).

    A pair fails when its delta-polynomial leaves a nonzero remainder whose
    residue is zero. A remainder with a nonzero residue is left to the check
    on the residue image.
    """
    report = CheckReport(title=f"coherence over {lam[0].algebra.name}" if lam else "coherence")
    for a in range(len(lam)):
        for b in range(a + 1, len(lam)):
            f, g = lam[a], lam[b]
            found = delta_polynomial_over(f, g)
            if found is None:
                continue
            v, delta = found
            r = pseudo_remainder_over(delta, _lower_prolongations_over(lam, v), budget)
            name = f"pair ({f.to_text()}) , ({g.to_text()}) at {v}"
            if not r:
                report.add(name, True, "delta reduces to zero")
            elif r.residue(0):
                report.add(name, True, f"remainder {r.to_text()} decided on the residue image")
            else:
                logger.info("incoherent pair over %s: %s", f.algebra.name, name)
                report.add(name, False, f"remainder {r.to_text()}")
    return report


def check_preconditions(lam: Sequence[DElement], a: Point, budget: int = GROEBNER_BUDGET) -> AutoreducedSet:
    """
    Validate a lifting problem and return the residue image of lam.

    Raises:
        PreconditionFailed: naming the violated clause
    """
    residues = [f.residue(0) for f in lam]
    try:
        res_set = check_autoreduced(residues)
    except (NotAutoreduced, ConstantPolynomial) as exc:
        raise PreconditionFailed(f"the residue image is autoreduced ({exc})") from exc
    for f, r in zip(lam, residues):
        if _leader_over(f) != r.rank():
            raise PreconditionFailed(f"the residue map preserves the rank of {f.to_text()}")
    if not check_coherent(res_set, budget).coherent:
        raise PreconditionFailed("the residue image is coherent")
    over = check_coherent_over(lam, budget)
    if not over.passed:
        bad = over.failures()[0]
        raise PreconditionFailed(f"the set is coherent over {lam[0].algebra.name}: {bad.name}, {bad.detail}")
    for r in residues:
        if r.evaluate(a):
            raise PreconditionFailed(f"a is a root of {r.to_text()}")
    if not res_set.H.evaluate(a):
        raise PreconditionFailed("H does not vanish at a")
    return res_set


def _in_filtration(value: DElement, level: int, algebra: LocalAlgebra, solver: SolverStrategy,
                   order_loss: int) -> bool:
    return all(solver.residual_vanishes(c, value.field, order_loss)
               for k, c in enumerate(value.coords) if algebra.levels[k] < level)


def assemble_linearization(f: DElement, state: LiftState, k: int,
                           solver: Optional[SolverStrategy] = None) -> DiffPoly:
    """
    lambda_k(f(b_i)) + sum_theta res(dF/d theta x)(a) * theta(y).

    Raises:
        NotInFiltration: f(b_i) is not in m^i
    """
    solver = solver or ExactAnsatz()
    fld = f.field
    value = evaluate_over(f, state.b, fld.one)
    if not _in_filtration(value, state.level, state.algebra, solver, _order(f)):
        raise NotInFiltration(state.level, value.to_text())
    return DiffPoly.constant(fld, value.coords[k]) + linearize_residue(f.residue(0), state.a)


def _order(f: DElement) -> int:
    return max((c.order() for c in f.coords if c), default=0)


# ---------------------------
# Lifting
# ---------------------------
def check_linear_coherent(reduced: Sequence[DiffPoly], level: int = 0,
                          budget: int = GROEBNER_BUDGET) -> None:
    """
    Coherence of one level's linear set; sets that are only row-reduced and
    not autoreduced are left to the solver.

    Raises:
        ProvenInconsistent: naming the first pair whose delta-polynomial is not in the ideal
    """
    if len(reduced) < 2:
        return
    try:
        lin_set = check_autoreduced(reduced)
    except NotAutoreduced:
        logger.debug("level %d linear set is not autoreduced; coherence left to the solver", level)
        return
    report = check_coherent(lin_set, budget)
    if report.coherent:
        return
    bad = next(p for p in report.pairs if p.verdict == "not in ideal")
    raise ProvenInconsistent(f"linear set is not coherent: pair ({bad.f}) , ({bad.g}) at "
                             f"{bad.common_derivative} has delta {bad.delta}",
                             level=level, system=lin_set.texts())


def _solve_system(system: LinearDiffSystem, unknowns: List[Var], solver: SolverStrategy,
                  budget: int = GROEBNER_BUDGET) -> LinearDiffSystem:
    try:
        reduced = linear_autoreduce(system.equations)
        system.reduced = reduced
        check_linear_coherent(reduced, system.level, budget)
        system.solution = solver.solve(system.reduced, unknowns)
    except ProvenInconsistent as exc:
        # preconditions passed, so this points at a gap in the checks
        logger.error("level %d system is inconsistent: %s", system.level, exc)
        raise exc.tagged(level=system.level)
    except SolverFailed as exc:
        raise exc.tagged(level=system.level)
    return system


def lift(lam: Sequence[DElement], a: Point, solver: Optional[SolverStrategy] = None,
         n_jobs: int = N_JOBS, budget: int = GROEBNER_BUDGET) -> LiftResult:
    """
    Lift the root a of the residue image of lam to b with res(b) = a, f(b) = 0.

    Raises:
        PreconditionFailed: a clause of the hypothesis fails
        NotInFiltration: an intermediate value left the filtration
        SolverFailed: a linear system could not be solved (tagged with its level)
    """
    solver = solver or ExactAnsatz()
    lam = [_as_local(f) for f in lam]
    if not lam:
        raise PreconditionFailed("the set is not empty")
    local: LocalAlgebra = lam[0].algebra
    fld: CoefficientField = lam[0].field
    unknowns = sorted({v for f in lam for c in f.coords for v in c.variables()}, key=lambda v: v.key)
    missing = [str(v) for v in unknowns if v not in a]
    if missing:
        raise PreconditionFailed(f"a gives values for {', '.join(missing)}")
    a = {v: fld.convert(a[v]) for v in unknowns}
    res_set = check_preconditions(lam, a, budget)
    linear = [linearize_residue(r, a) for r in (f.residue(0) for f in lam)]
    loss = max(_order(f) for f in lam)
    state = LiftState(level=1, b={v: local.embed(a[v], fld) for v in unknowns}, a=a, algebra=local)
    result = LiftResult(value=state.b, solver=solver.describe())
    logger.info("lifting %s over %s (nilpotency %d)", res_set.texts(), local.name, local.nu)

    for level in range(1, local.nu):
        state.level = level
        values = [evaluate_over(f, state.b, fld.one) for f in lam]
        for value in values:
            if not _in_filtration(value, level, local, solver, loss):
                raise NotInFiltration(level, value.to_text())
        systems = [LinearDiffSystem(level=level, index=k,
                                    equations=[DiffPoly.constant(fld, value.coords[k]) + lin
                                               for value, lin in zip(values, linear)])
                   for k in state.basis_indices]
        solved = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_solve_system)(system, unknowns, solver, budget) for system in systems)
        new_b = dict(state.b)
        for system in solved:
            eps = local.basis_element(system.index, fld.one, fld)
            for v, y in system.solution.items():
                if y:
                    new_b[v] = new_b[v] + eps * y
        state.b = new_b
        result.systems.extend(solved)
        logger.debug("level %d solved for %d basis elements", level, len(solved))

    result.value = state.b
    final = [evaluate_over(f, state.b, fld.one) for f in lam]
    result.verified = all(solver.residual_vanishes(c, fld, loss) for value in final for c in value.coords)
    if isinstance(solver, ExactAnsatz):
        result.notes.append("f(b) = 0 checked by exact evaluation")
    else:
        result.notes.append(f"f(b) = 0 checked on truncated series ({solver.describe()}, order loss {loss})")
    if not result.verified:
        logger.error("lift failed verification for %s", res_set.texts())
    return result


def _lift_factor(lam: Sequence[DElement], i: int, point: Point, solver: SolverStrategy,
                 budget: int) -> LiftResult:
    local = lam[0].algebra.local_factor(i)
    projected = [local.project(f) for f in lam]
    try:
        result = lift(projected, point, solver, n_jobs=1, budget=budget)
    except PreconditionFailed as exc:
        raise PreconditionFailed(exc.clause, factor=i) from exc
    except SolverFailed as exc:
        raise exc.tagged(factor=i)
    result.factor = i
    return result


def lift_nonlocal(lam: Sequence[DElement], points: Union[Point, Sequence[Point]],
                  solver: Optional[SolverStrategy] = None, n_jobs: int = N_JOBS,
                  budget: int = GROEBNER_BUDGET) -> LiftResult:
    """
    Lift in every local factor and reassemble.

    ``points`` is one root per factor, or a single root used for all of them.
    """
    solver = solver or ExactAnsatz()
    algebra: FiniteAlgebra = lam[0].algebra
    count = algebra.factor_count
    if isinstance(points, Mapping):
        points = [points] * count
    if len(points) != count:
        raise PreconditionFailed(f"one root per local factor ({count})")
    parts = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_lift_factor)(lam, i, points[i], solver, budget) for i in range(count))
    fld = lam[0].field
    value: Dict[Var, DElement] = {}
    systems, notes = [], []
    for part in parts:
        local = algebra.local_factor(part.factor)
        for v, b in part.value.items():
            image = local.include(b)
            value[v] = value[v] + image if v in value else image
        for system in part.systems:
            system.label = f"{part.factor}:{local.symbol(system.index) or '1'}"
        systems.extend(part.systems)
        notes.extend(f"factor {part.factor}: {note}" for note in part.notes)
    for v in value:
        value[v] = DElement(algebra, value[v].coords, fld)
    return LiftResult(value=value, solver=solver.describe(), systems=systems,
                      verified=all(p.verified for p in parts), notes=notes)


def lift_any(lam: Sequence[DElement], points: Union[Point, Sequence[Point]],
             solver: Optional[SolverStrategy] = None, n_jobs: int = N_JOBS,
             budget: int = GROEBNER_BUDGET) -> LiftResult:
    """``lift`` on local algebras, ``lift_nonlocal`` otherwise."""
    algebra = lam[0].algebra
    if isinstance(algebra, LocalAlgebra) or algebra.factor_count == 1:
        point = points if isinstance(points, Mapping) else points[0]
        return lift(lam, point, solver, n_jobs, budget)
    return lift_nonlocal(lam, points, solver, n_jobs, budget)
