"""
A small Buchberger engine with a step budget.

Polynomials are sympy ``PolyElement``s in a ring over the coefficient field,
with a graded reverse lexicographic order whose variables follow the
differential ranking (highest-ranked indeterminate first).
"""

import logging
from typing import List, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.monomials import monomial_div, monomial_lcm
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyRing

from .config import GROEBNER_BUDGET
from .coeffield import RATIONALS, CoefficientField
from .diffpoly import AlgIndet, DiffPoly, make_monomial
from .errors import ResourceLimit

logger = logging.getLogger(__name__)


class PolyBridge:
    """
    Moves differential polynomials into an ordinary polynomial ring.

    Every indeterminate listed becomes a ring variable; ``extra`` names
    additional variables appended after them (e.g. the Rabinowitsch
    variable).
    """

    def __init__(self, field: CoefficientField, indets: Sequence[AlgIndet], extra: Sequence[str] = ()):
        self.field = field
        self.indets = sorted(set(indets), reverse=True)
        self.position = {u: k for k, u in enumerate(self.indets)}
        domain = QQ if field.kind == RATIONALS else field.domain.to_domain()
        symbols = [f"v{k}" for k in range(len(self.indets))] + list(extra)
        self.ring = PolyRing(symbols or ["v0"], domain, grevlex)
        self.extra = {name: self.ring.gens[len(self.indets) + k] for k, name in enumerate(extra)}

    def to_ring(self, f: DiffPoly):
        width = self.ring.ngens
        terms = {}
        for mono, c in f.terms.items():
            expv = [0] * width
            for u, e in mono:
                expv[self.position[u]] = e
            terms[tuple(expv)] = c
        return self.ring.from_dict(terms) if terms else self.ring.zero

    def from_ring(self, p) -> DiffPoly:
        terms = {}
        for expv, c in p.terms():
            if any(expv[len(self.indets):]):
                raise ValueError("polynomial involves auxiliary variables")
            terms[make_monomial({self.indets[k]: e for k, e in enumerate(expv[: len(self.indets)]) if e})] = c
        return DiffPoly(self.field, terms)


def s_polynomial(f, g):
    ring = f.ring
    lm_f, lc_f = f.LT
    lm_g, lc_g = g.LT
    lcm = monomial_lcm(lm_f, lm_g)
    uf = monomial_div(lcm, lm_f)
    ug = monomial_div(lcm, lm_g)
    return f.mul_term((uf, ring.domain.one / lc_f)) - g.mul_term((ug, ring.domain.one / lc_g))


def _coprime(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def groebner_basis(polys: Sequence, budget: int = GROEBNER_BUDGET) -> List:
    """
    Buchberger's algorithm with the coprime-leading-monomial criterion.

    Raises:
        ResourceLimit: more than ``budget`` S-pairs were processed.
    """
    basis = [p.monic() for p in polys if p]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    steps = 0
    while pairs:
        # normal selection strategy: smallest lcm degree first
        pairs.sort(key=lambda ij: sum(monomial_lcm(basis[ij[0]].LM, basis[ij[1]].LM)))
        i, j = pairs.pop(0)
        if _coprime(basis[i].LM, basis[j].LM):
            continue
        steps += 1
        if steps > budget:
            raise ResourceLimit(budget)
        r = s_polynomial(basis[i], basis[j]).rem(basis)
        if r:
            if r.LM == basis[0].ring.zero_monom:
                logger.debug("Groebner basis is the unit ideal after %d steps", steps)
                return [basis[0].ring.one]
            basis.append(r.monic())
            k = len(basis) - 1
            pairs.extend((i, k) for i in range(k))
    logger.debug("Groebner basis with %d elements after %d steps", len(basis), steps)
    return reduce_basis(basis)


def reduce_basis(basis: Sequence) -> List:
    """Interreduce a Groebner basis into its reduced form."""
    minimal = []
    for k, g in enumerate(basis):
        redundant = any(
            monomial_div(g.LM, h.LM) is not None and (h.LM != g.LM or j < k)
            for j, h in enumerate(basis) if j != k
        )
        if not redundant:
            minimal.append(g)
    reduced = []
    for k, g in enumerate(minimal):
        rest = minimal[:k] + minimal[k + 1:]
        reduced.append(g.rem(rest).monic() if rest else g.monic())
    if not reduced:
        return reduced
    order = reduced[0].ring.order
    return sorted(reduced, key=lambda p: order(p.LM), reverse=True)


def saturation_member(f: DiffPoly, generators: Sequence[DiffPoly], h: DiffPoly,
                      budget: int = GROEBNER_BUDGET) -> bool:
    """
    Decide whether h^N * f lies in the ideal generated by ``generators`` for some N.

    Uses f in (G) : h^oo  <=>  f in (G, 1 - z*h) in K[vars, z].
    """
    indets = set()
    for p in [f, h, *generators]:
        indets.update(p.indeterminates())
    bridge = PolyBridge(f.field, indets, extra=("z",))
    z = bridge.extra["z"]
    polys = [bridge.to_ring(g) for g in generators] + [bridge.ring.one - z * bridge.to_ring(h)]
    basis = groebner_basis(polys, budget)
    return not bridge.to_ring(f).rem(basis)


def ideal_member_algebraic(f: DiffPoly, generators: Sequence[DiffPoly], budget: int = GROEBNER_BUDGET) -> bool:
    """Plain membership of f in the algebraic ideal generated by ``generators``."""
    indets = set(f.indeterminates())
    for g in generators:
        indets.update(g.indeterminates())
    bridge = PolyBridge(f.field, indets)
    basis = groebner_basis([bridge.to_ring(g) for g in generators], budget)
    return not bridge.to_ring(f).rem(basis)
