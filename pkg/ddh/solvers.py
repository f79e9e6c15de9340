"""
Solvers for coherent systems of linear differential equations.

Every strategy returns one particular solution: free parameters are set to
zero, so a homogeneous system always gets the zero solution.

* ``exact:deg=D``            -- polynomial ansatz of total degree <= D with
                                rational unknown coefficients;
* ``jet:point=p,order=N``    -- truncated power series at the rational point
                                p up to total degree N.

Systems without derivatives are solved directly over K by either strategy.
"""

import logging
import re
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from . import linalg
from .coeffield import RATIONALS, CoefficientField, FieldElem, rational_text, to_qq, truncate
from .config import DEFAULT_SOLVER
from .diffpoly import AlgIndet, DiffPoly, Var
from .errors import NoSolutionFoundAtBound, PoleAtPoint, ProvenInconsistent, SingularPoint, SolverFailed

logger = logging.getLogger(__name__)

Solution = Dict[Var, FieldElem]
LinearForm = Tuple[FieldElem, Dict[AlgIndet, FieldElem]]


def linear_form(f: DiffPoly) -> LinearForm:
    """(constant term, {indeterminate: coefficient}) of a linear polynomial."""
    const = f.field.zero
    coeffs: Dict[AlgIndet, FieldElem] = {}
    for mono, c in f.terms.items():
        if not mono:
            const = c
        elif len(mono) == 1 and mono[0][1] == 1:
            coeffs[mono[0][0]] = c
        else:
            raise ValueError(f"{f.to_text()} is not linear")
    return const, coeffs


def matrix_domain(field: CoefficientField):
    return QQ if field.kind == RATIONALS else field.domain.to_domain()


def _texts(system: Sequence[DiffPoly]) -> List[str]:
    return [f.to_text() for f in system]


def solve_algebraic(system: Sequence[DiffPoly], unknowns: Sequence[Var]) -> Solution:
    """Solve a derivative-free linear system over K."""
    if not system:
        return {}
    field = system[0].field
    domain = matrix_domain(field)
    rows, rhs = [], []
    for f in system:
        const, coeffs = linear_form(f)
        rows.append([coeffs.get(AlgIndet(v, (0,) * field.m), field.zero) for v in unknowns])
        rhs.append(-const)
    sol = linalg.solve(rows, rhs, len(unknowns), domain)
    if sol is None:
        raise ProvenInconsistent("linear system over K is inconsistent", system=_texts(system))
    return {v: field.convert(x) for v, x in zip(unknowns, sol)}


class SolverStrategy:
    """Base class; ``solve`` returns one value per unknown."""

    name = "solver"

    def solve(self, system: Sequence[DiffPoly], unknowns: Sequence[Var]) -> Solution:
        if not system:
            return {}
        if all(f.order() == 0 for f in system):
            return solve_algebraic(system, unknowns)
        return self._solve(system, unknowns)

    def _solve(self, system: Sequence[DiffPoly], unknowns: Sequence[Var]) -> Solution:
        raise NotImplementedError

    def residual_vanishes(self, value: FieldElem, field: CoefficientField, order_loss: int = 0) -> bool:
        """Whether a residual counts as zero for this strategy."""
        return not value

    def describe(self) -> str:
        return self.name


def _monomials(s: int, degree: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree <= degree, by increasing degree."""
    out = [e for e in product(range(degree + 1), repeat=s) if sum(e) <= degree]
    return sorted(out, key=lambda e: (sum(e), tuple(-x for x in e)))


class ExactAnsatz(SolverStrategy):
    """Polynomial solutions of total degree <= ``degree``."""

    def __init__(self, degree: int = 2):
        if degree < 0:
            raise ValueError("ansatz degree must be non-negative")
        self.degree = degree
        self.name = f"exact:deg={degree}"

    def _monomial(self, field: CoefficientField, alpha: Tuple[int, ...]) -> FieldElem:
        value = field.one
        for j, e in enumerate(alpha, start=1):
            if e:
                value = value * field.gen(j) ** e
        return value

    def _solve(self, system, unknowns):
        field = system[0].field
        alphas = _monomials(field.s, self.degree)
        columns = [(v, alpha) for v in unknowns for alpha in alphas]
        basis = {alpha: self._monomial(field, alpha) for alpha in alphas}
        rows, rhs = [], []
        for f in system:
            const, coeffs = linear_form(f)
            entries = []
            for v, alpha in columns:
                total = field.zero
                for u, c in coeffs.items():
                    if u.var == v:
                        total = total + c * field.derive_theta(u.theta, basis[alpha])
                entries.append(total)
            new_rows, new_rhs = _equate_coefficients(field, entries, -const)
            rows.extend(new_rows)
            rhs.extend(new_rhs)
        sol = linalg.solve(rows, rhs, len(columns), QQ) if rows else [QQ.zero] * len(columns)
        if sol is None:
            if field.kind == RATIONALS:
                raise ProvenInconsistent("no constant solution exists", system=_texts(system))
            raise NoSolutionFoundAtBound(f"no polynomial solution of degree <= {self.degree}",
                                         system=_texts(system))
        out = {v: field.zero for v in unknowns}
        for (v, alpha), c in zip(columns, sol):
            if c:
                out[v] = out[v] + basis[alpha] * field.convert(c)
        logger.debug("ansatz solution %s", {str(v): field.to_text(x) for v, x in out.items()})
        return out


def _as_polynomial(field: CoefficientField, value: FieldElem):
    """The polynomial equal to a fraction with constant denominator."""
    if not value:
        return field.ring.zero
    if not value.denom.is_ground:
        raise ValueError(f"{field.to_text(value)} is not a polynomial")
    return value.numer.quo_ground(value.denom.LC)


def _equate_coefficients(field: CoefficientField, entries: List[FieldElem], rhs: FieldElem):
    """Rows over QQ expressing sum_c x_c * entries[c] = rhs in K."""
    if field.kind == RATIONALS:
        return [[QQ.convert(e) for e in entries]], [QQ.convert(rhs)]
    denom = field.ring.one
    for e in entries + [rhs]:
        if e:
            denom = denom.lcm(e.denom)
    scale = field.domain.new(denom)
    numerators = [_as_polynomial(field, e * scale) for e in entries]
    target = _as_polynomial(field, rhs * scale)
    monoms = set(target.keys())
    for p in numerators:
        monoms.update(p.keys())
    rows, values = [], []
    for monom in sorted(monoms):
        rows.append([QQ.convert(p.get(monom, 0)) for p in numerators])
        values.append(QQ.convert(target.get(monom, 0)))
    return rows, values


class JetSolver(SolverStrategy):
    """Truncated power-series solutions at a rational point."""

    def __init__(self, point: Sequence, order: int = 3):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        self.point = tuple(to_qq(v) for v in point)
        self.order = order
        coords = ";".join(rational_text(v) for v in self.point)
        self.name = f"jet:point={coords},order={order}"

    def _shifted_derive(self, field: CoefficientField, theta, poly):
        for j, e in enumerate(theta, start=1):
            for _ in range(e):
                if j > field.s:
                    return poly.ring.zero
                poly = poly.diff(poly.ring.gens[j - 1])
        return poly

    def _solve(self, system, unknowns):
        field = system[0].field
        if field.kind == RATIONALS:
            raise SolverFailed("jet solving needs a rational-function field", system=_texts(system))
        ring = field.ring
        loss = max(f.order() for f in system)
        valid = self.order - loss
        alphas = _monomials(field.s, self.order)
        columns = [(v, alpha) for v in unknowns for alpha in alphas]
        rows, rhs = [], []
        for f in system:
            const, coeffs = linear_form(f)
            try:
                series = {u: field.taylor(c, self.point, self.order) for u, c in coeffs.items()}
                const_series = field.taylor(const, self.point, self.order)
            except PoleAtPoint as exc:
                raise SingularPoint(f"coefficient has a pole: {exc}", system=_texts(system)) from exc
            polys = []
            for v, alpha in columns:
                total = ring.zero
                mono = ring.from_dict({alpha: QQ.one})
                for u, c in series.items():
                    if u.var == v:
                        total += c * self._shifted_derive(field, u.theta, mono)
                polys.append(truncate(total, valid) if valid >= 0 else ring.zero)
            target = truncate(-const_series, valid) if valid >= 0 else ring.zero
            monoms = set(target.keys())
            for p in polys:
                monoms.update(p.keys())
            for monom in sorted(monoms):
                rows.append([QQ.convert(p.get(monom, 0)) for p in polys])
                rhs.append(QQ.convert(target.get(monom, 0)))
        sol = linalg.solve(rows, rhs, len(columns), QQ) if rows else [QQ.zero] * len(columns)
        if sol is None:
            raise ProvenInconsistent(f"truncated system at {self.name} is inconsistent", system=_texts(system))
        shifted = [field.gen(j) - field.convert(p) for j, p in enumerate(self.point, start=1)]
        out = {v: field.zero for v in unknowns}
        for (v, alpha), c in zip(columns, sol):
            if c:
                term = field.convert(c)
                for g, e in zip(shifted, alpha):
                    if e:
                        term = term * g ** e
                out[v] = out[v] + term
        return out

    def residual_vanishes(self, value, field, order_loss=0):
        if not value:
            return True
        valid = self.order - order_loss
        if valid < 0:
            return True
        return not truncate(field.taylor(value, self.point, valid), valid)


_EXACT = re.compile(r"^exact(?::deg=(\d+))?$")
_JET = re.compile(r"^jet:point=([^,]+),order=(\d+)$")


def parse_solver(text: Optional[str]) -> SolverStrategy:
    """Read ``exact:deg=D`` or ``jet:point=p1;p2,order=N``."""
    text = (text or DEFAULT_SOLVER).replace(" ", "")
    match = _EXACT.match(text)
    if match:
        return ExactAnsatz(int(match.group(1) or 2))
    match = _JET.match(text)
    if match:
        point = [to_qq(v) for v in match.group(1).split(";")]
        return JetSolver(point, int(match.group(2)))
    raise ValueError(f"unknown solver {text!r}; use exact:deg=D or jet:point=p,order=N")


def solve(system: Sequence[DiffPoly], unknowns: Sequence[Var], strategy: SolverStrategy) -> Solution:
    return strategy.solve(system, unknowns)
