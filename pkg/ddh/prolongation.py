"""
Coordinate prolongations.

For f over K and a structure e, the components f^(0)..f^(l) are the
polynomials in the prolonged variables x<i>_<j> defined by

    f^e(sum_j x^(j) e_j) = sum_j f^(j)(x^(0), ..., x^(l)) e_j.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence

from joblib import Parallel, delayed

from .config import N_JOBS
from .diffpoly import DiffPoly, Var
from .dstructure import MODE_SIGMA, DStructure
from .errors import PointError
from .finitealg import DElement
from .reduction import AutoreducedSet
from .reports import ValuesReport

logger = logging.getLogger(__name__)

Point = Mapping[Var, object]


def _prolonged_variable(s: DStructure, index: int) -> DElement:
    """sum_j x<index>_<j> e_j with differential polynomial coordinates."""
    coords = [DiffPoly.variable(s.field, index, j) for j in range(s.algebra.dim)]
    return DElement(s.algebra, coords, s.field)


def evaluate_over(fe: DElement, assignment: Mapping, ring_one) -> DElement:
    """
    Evaluate a polynomial over the algebra, given by its coordinate
    polynomials, at algebra-valued points; the basis elements are constants.
    """
    algebra, fld = fe.algebra, fe.field
    one = algebra.one(ring_one, fld)
    total = algebra.zero(ring_one * 0, fld)
    for j, coord in enumerate(fe.coords):
        if not coord:
            continue
        value = coord.evaluate(assignment, one=one, derive=lambda k, a: a.apply_delta(k))
        total = total + value * algebra.basis_element(j, ring_one, fld)
    return total


def expand(fe: DElement, s: DStructure, variables: Sequence[Var]) -> DElement:
    """Substitute sum_j x^(j) e_j for every variable of a polynomial over D(K)."""
    assignment = {v: _prolonged_variable(s, v.index) for v in variables}
    return evaluate_over(fe, assignment, DiffPoly.constant(s.field, 1))


def components(f: DiffPoly, s: DStructure) -> List[DiffPoly]:
    """
    The list f^(0)..f^(l).

    Raises:
        DenominatorNotUnit: a coefficient image is not defined
    """
    for v in f.variables():
        if v.copy is not None:
            raise ValueError(f"{f.to_text()} already uses prolonged variables")
    fe = s.map_poly(f)
    return list(expand(fe, s, f.variables()).coords)


@dataclass
class ProlongedSystem:
    """Generators of the prolongation tau V, one component list per source element."""
    source: List[DiffPoly]
    components: List[List[DiffPoly]]
    structure: DStructure
    assertion: str = "the source is assumed to be a characteristic set of I(V/K)"
    notes: List[str] = field(default_factory=list)

    def generators(self) -> List[DiffPoly]:
        return [c for comps in self.components for c in comps]

    def to_report(self) -> ValuesReport:
        values = []
        for f, comps in zip(self.source, self.components):
            for j, c in enumerate(comps):
                values.append(f"({f.to_text()})^({j}) = {c.to_text()}")
        values.append(f"assumption: {self.assertion}")
        return ValuesReport(title=f"prolongation by {self.structure.name}", values=values)


def tau_generators(lam: AutoreducedSet, s: DStructure, n_jobs: int = N_JOBS) -> ProlongedSystem:
    """Components of every element of lam as a generator set of tau V."""
    logger.warning("prolonging %s: treating it as a characteristic set", lam.texts())
    comps = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(components)(f, s) for f in lam)
    return ProlongedSystem(source=list(lam), components=list(comps), structure=s)


# ---------------------------
# Points
# ---------------------------
def nabla(a: Point, s: DStructure) -> Dict[Var, object]:
    """a -> (a, d1 a, ..., dl a) as values of the prolonged variables."""
    out = {}
    for v in sorted(a, key=lambda v: v.key):
        image = s.e_of(a[v])
        for j, c in enumerate(image.coords):
            out[Var(v.index, j)] = c
    return out


def pihat(i: int, abar: Point, s: DStructure) -> Dict[Var, object]:
    """
    x_k -> sum_j a_k^(j) pi_i(e_j).

    Raises:
        PointError: a variable is not a prolonged copy x<k>_<j> with j < dim B
    """
    proj = s.algebra.projection(i)
    out: Dict[Var, object] = {}
    for v, value in abar.items():
        if v.copy is None or not 0 <= v.copy < len(proj):
            raise PointError(f"pihat needs prolonged variables x{v.index}_0..x{v.index}_{len(proj) - 1}, "
                             f"got {v}", str(v))
        base = Var(v.index)
        total = out.get(base, s.field.zero)
        c = proj[v.copy]
        out[base] = total + value * c if c else total
    return out


def to_algebra_point(abar: Point, s: DStructure) -> Dict[Var, DElement]:
    """Read a prolonged point as a point with coordinates in D(L)."""
    indices = sorted({v.index for v in abar})
    out = {}
    for k in indices:
        coords = [s.field.convert(abar.get(Var(k, j), 0)) for j in range(s.algebra.dim)]
        out[Var(k)] = DElement(s.algebra, coords, s.field)
    return out


def from_algebra_point(b: Mapping[Var, DElement]) -> Dict[Var, object]:
    out = {}
    for v, value in b.items():
        for j, c in enumerate(value.coords):
            out[Var(v.index, j)] = c
    return out


def point_text(point: Point, field) -> List[str]:
    return [f"{v} = {field.to_text(point[v])}" for v in sorted(point, key=lambda v: (v.index, v.key))]


def difference_prolongation(f: DiffPoly, s: DStructure) -> bool:
    """
    For B = k x k with the idempotent basis, tau V = V x V^sigma:
    the components are f(x_0) and f^sigma(x_1).
    """
    algebra = s.algebra
    units = [algebra.basis(0), algebra.basis(1)]
    if algebra.dim != 2 or algebra.factor_count != 2 or algebra.decomposition.idempotents != units:
        raise ValueError("difference prolongation needs B = k x k in the idempotent basis")
    comps = components(f, s)
    first = f.rename(lambda v: Var(v.index, 0))
    second = s.map_poly(f, MODE_SIGMA, 1).rename(lambda v: Var(v.index, 1))
    return comps[0] == first and comps[1] == second
