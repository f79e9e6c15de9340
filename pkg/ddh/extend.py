"""
Extending a structure to one more element.

For a in L with characteristic set lam over K (or a declared transcendental
a), and prescribed residues sigma_i(a), find b in D(L) with pi_i(b) equal to
the i-th target and f^{e_i}(b_i) = 0 in every local factor.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from joblib import Parallel, delayed

from .coeffield import FieldElem
from .config import N_JOBS, SAMPLE_BUDGET, SAMPLE_SEED
from .diffpoly import DiffPoly, Var
from .dstructure import MODE_COMPONENT, MODE_SIGMA, DStructure
from .errors import PreconditionFailed, SolverFailed
from .finitealg import DElement
from .hensel import LiftResult, lift
from .prolongation import components, evaluate_over, from_algebra_point, pihat
from .reduction import AutoreducedSet
from .reports import CheckReport, ExtendReport
from .solvers import ExactAnsatz, SolverStrategy

logger = logging.getLogger(__name__)


@dataclass
class ExtensionRequest:
    """
    Args:
        structure: the structure e on K
        element: a, an element of the configured field
        lam: characteristic set of the ideal of a over K; None declares a
            differentially transcendental
        targets: sigma_0(a)..sigma_t(a); sigma_0(a) must be a itself
        variable: the variable of lam standing for a
    """
    structure: DStructure
    element: FieldElem
    lam: Optional[AutoreducedSet]
    targets: List[FieldElem]
    variable: Var = Var(1)

    def __post_init__(self):
        fld = self.structure.field
        self.element = fld.convert(self.element)
        self.targets = [fld.convert(t) for t in self.targets]

    @property
    def transcendental(self) -> bool:
        return self.lam is None

    def validate(self) -> None:
        """
        Raises:
            PreconditionFailed: naming the violated clause
        """
        s = self.structure
        fld = s.field
        count = s.algebra.factor_count
        if len(self.targets) != count:
            raise PreconditionFailed(f"one target per local factor ({count}), got {len(self.targets)}")
        if self.targets[0] != self.element:
            raise PreconditionFailed("the target of factor 0 is the element itself")
        if self.lam is None:
            return
        for f in self.lam:
            others = [v for v in f.variables() if v != self.variable]
            if others:
                raise PreconditionFailed(f"{f.to_text()} only involves {self.variable}")
        point = {self.variable: self.element}
        for f in self.lam:
            if f.evaluate(point):
                raise PreconditionFailed(f"a is a root of {f.to_text()}")
        if not self.lam.H.evaluate(point):
            raise PreconditionFailed("H does not vanish at a")
        for i in range(1, count):
            target = {self.variable: self.targets[i]}
            for f in self.lam:
                if s.map_poly(f, MODE_SIGMA, i).evaluate(target):
                    raise PreconditionFailed(f"target {i} is a root of {f.to_text()} under sigma{i}", factor=i)
        logger.debug("extension request at %s is valid", fld.to_text(self.element))


@dataclass
class ExtensionResult:
    request: ExtensionRequest
    value: DElement
    locals: List[DElement]
    lifts: List[Optional[LiftResult]] = field(default_factory=list)
    solver: SolverStrategy = field(default_factory=ExactAnsatz)
    checks: Optional[CheckReport] = None

    def residues(self) -> List[FieldElem]:
        return [self.value.residue(i) for i in range(self.value.algebra.factor_count)]

    def extended_structure(self, j: int) -> DStructure:
        """The structure with e(t_j) = b, when a is the generator t_j."""
        s = self.request.structure
        if self.request.element != s.field.gen(j):
            raise PreconditionFailed(f"the element is the generator t{j}")
        return s.with_image(j, self.value)

    def to_report(self) -> ExtendReport:
        fld = self.request.structure.field
        notes = []
        if self.request.transcendental:
            notes.append("differentially transcendental element: canonical lift with zero corrections")
        else:
            notes.append("the set is assumed to be a characteristic set of the ideal of the element")
        return ExtendReport(
            element=fld.to_text(self.request.element),
            result=self.value.to_text(),
            residues=[fld.to_text(r) for r in self.residues()],
            factors=[lr.to_report() for lr in self.lifts if lr is not None],
            checks=self.checks,
            notes=notes,
        )


def _lift_in_factor(req: ExtensionRequest, i: int, solver: SolverStrategy) -> Optional[LiftResult]:
    s = req.structure
    lam_i = [s.map_poly(f, MODE_COMPONENT, i) for f in req.lam]
    try:
        result = lift(lam_i, {req.variable: req.targets[i]}, solver, n_jobs=1)
    except PreconditionFailed as exc:
        raise PreconditionFailed(exc.clause, factor=i) from exc
    except SolverFailed as exc:
        raise exc.tagged(factor=i)
    result.factor = i
    return result


def extend_to_element(req: ExtensionRequest, solver: Optional[SolverStrategy] = None,
                      n_jobs: int = N_JOBS, check: bool = True) -> ExtensionResult:
    """
    Compute b in D(L) with the prescribed residues annihilated by lam in
    every local factor.

    Raises:
        PreconditionFailed: the request is invalid (tagged with the factor)
        SolverFailed: a level could not be solved (tagged with factor and level)
    """
    solver = solver or ExactAnsatz()
    req.validate()
    s = req.structure
    algebra, fld = s.algebra, s.field
    count = algebra.factor_count
    if req.transcendental:
        lifts: List[Optional[LiftResult]] = [None] * count
        local_values = [algebra.local_factor(i).embed(req.targets[i], fld) for i in range(count)]
    else:
        lifts = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_lift_in_factor)(req, i, solver) for i in range(count))
        local_values = [lr.value[req.variable] for lr in lifts]
    total = algebra.zero(fld.zero, fld)
    for i, b_i in enumerate(local_values):
        total = total + algebra.local_factor(i).include(b_i)
    result = ExtensionResult(request=req, value=DElement(algebra, total.coords, fld),
                             locals=local_values, lifts=lifts, solver=solver)
    logger.info("extended %s to %s: b = %s", s.name, fld.to_text(req.element), result.value.to_text())
    if check:
        result.checks = check_extension(result)
    return result


# ---------------------------
# Checks
# ---------------------------
def _sample_combination(f: DiffPoly, variable: Var, rng: random.Random) -> DiffPoly:
    g = f
    for j in range(1, f.field.m + 1):
        for _ in range(rng.randint(0, 1)):
            g = g.derive(j)
    g = g * rng.choice([-2, -1, 1, 3])
    if rng.random() < 0.5:
        g = g * DiffPoly.variable(f.field, variable.index)
    return g


def check_extension(result: ExtensionResult, sample_budget: int = SAMPLE_BUDGET,
                    seed: int = SAMPLE_SEED) -> CheckReport:
    """
    Residues equal the targets, sampled differential combinations of lam
    vanish at b in every factor, and b read as a prolonged point lies on
    the prolongation with the expected pi-hat images.
    """
    req, solver = result.request, result.solver
    s = req.structure
    fld = s.field
    report = CheckReport(title=f"extension at {fld.to_text(req.element)}")
    residues = result.residues()
    for i, (r, target) in enumerate(zip(residues, req.targets)):
        report.add(f"pi{i}(b) = target {i}", r == target, fld.to_text(r))
    if req.transcendental:
        report.notes.append("no equations to check for a transcendental element")
        return report

    def vanishes(value: DElement, loss: int) -> bool:
        return all(solver.residual_vanishes(c, fld, loss) for c in value.coords)

    rng = random.Random(seed)
    bad: Optional[str] = None
    elements = list(req.lam)
    for _ in range(max(1, sample_budget // 10)):
        g = _sample_combination(rng.choice(elements), req.variable, rng)
        for i, b_i in enumerate(result.locals):
            image = s.map_poly(g, MODE_COMPONENT, i)
            if not vanishes(evaluate_over(image, {req.variable: b_i}, fld.one), g.order()):
                bad = f"{g.to_text()} in factor {i}"
                break
        if bad:
            break
    report.add("combinations of the set vanish at b", bad is None, bad or "")

    abar = from_algebra_point({req.variable: result.value})
    off = None
    for f in elements:
        for j, comp in enumerate(components(f, s)):
            if not solver.residual_vanishes(comp.evaluate(abar), fld, f.order()):
                off = f"({f.to_text()})^({j})"
                break
        if off:
            break
    report.add("b lies on the prolongation", off is None, off or "")
    for i in range(s.algebra.factor_count):
        image = pihat(i, abar, s).get(Var(req.variable.index), fld.zero)
        report.add(f"pihat{i}(b) = target {i}", image == req.targets[i], fld.to_text(image))
    return report


def extend(structure: DStructure, element, lam: Optional[AutoreducedSet], targets: Sequence,
           solver: Optional[SolverStrategy] = None, variable: Var = Var(1)) -> ExtensionResult:
    """Build the request and run ``extend_to_element``."""
    return extend_to_element(ExtensionRequest(structure, element, lam, list(targets), variable), solver)
