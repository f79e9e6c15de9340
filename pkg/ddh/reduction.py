"""
Autoreduced and coherent sets, Ritt-Kolchin reduction with certificates.

A reduction of f by an autoreduced set returns a ``ReductionCertificate``
recording

    M * f = sum_k c_k * theta_k(g_k) + r,    M = prod_g I_g^a_g * S_g^b_g

so that M divides H^s for s = max(a_g, b_g), and the identity can be checked
by plain expansion.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .coeffield import CoefficientField
from .config import GROEBNER_BUDGET
from .diffpoly import (AlgIndet, DerivOp, DiffPoly, theta_lcm, theta_quotient, theta_text)
from .errors import ConstantPolynomial, HVanishesUnderMap, NotAutoreduced
from .groebner import saturation_member
from .reports import (CertificateStep, CoherencePair, CoherenceReport, MembershipReport, RankEntry, RankReport,
                      ReductionReport)

logger = logging.getLogger(__name__)


class AutoreducedSet:
    """
    A validated autoreduced set, sorted by increasing rank.

    Use ``check_autoreduced`` to build one; the constructor trusts its input.
    """

    def __init__(self, elements: Sequence[DiffPoly]):
        self.elements: List[DiffPoly] = sorted(elements, key=lambda f: f.rank_key())
        self.field: Optional[CoefficientField] = self.elements[0].field if self.elements else None
        self.leaders: List[AlgIndet] = [f.leader() for f in self.elements]
        self.degrees: List[int] = [f.degree() for f in self.elements]
        self.initials: List[DiffPoly] = [f.initial() for f in self.elements]
        self.separants: List[DiffPoly] = [f.separant() for f in self.elements]
        self._h: Optional[DiffPoly] = None

    @property
    def H(self) -> DiffPoly:
        """Product of all initials and separants."""
        if self._h is None:
            h = DiffPoly.constant(self.field, 1) if self.field else None
            for i, s in zip(self.initials, self.separants):
                h = h * i * s
            self._h = h
        return self._h

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def __eq__(self, other):
        return isinstance(other, AutoreducedSet) and self.elements == other.elements

    def texts(self) -> List[str]:
        return [f.to_text() for f in self.elements]

    def __repr__(self):
        return "AutoreducedSet{" + ", ".join(self.texts()) + "}"


def autoreduction_violation(f: DiffPoly, g: DiffPoly) -> Optional[Tuple[AlgIndet, str]]:
    """The indeterminate of g that breaks reducedness against f's leader, if any."""
    v, d = f.rank()
    for u in g.indeterminates():
        if u.is_proper_derivative_of(v):
            return u, "proper derivative of the leader"
    if g.degree(v) >= d:
        return v, f"degree {g.degree(v)} >= {d}"
    return None


def check_autoreduced(polys: Sequence[DiffPoly]) -> AutoreducedSet:
    """
    Validate both autoreduction clauses and build the cached set.

    Raises:
        ConstantPolynomial: an element has no indeterminates
        NotAutoreduced: with the offending pair and indeterminate
    """
    polys = [p for p in polys]
    for p in polys:
        if p.is_constant():
            raise ConstantPolynomial(p.to_text())
    for a, f in enumerate(polys):
        for b, g in enumerate(polys):
            if a == b:
                continue
            bad = autoreduction_violation(f, g)
            if bad is not None:
                raise NotAutoreduced(f.to_text(), g.to_text(), str(bad[0]), bad[1])
    return AutoreducedSet(polys)


def is_reduced(f: DiffPoly, lam: AutoreducedSet) -> bool:
    return all(autoreduction_violation(g, f) is None for g in lam) if not f.is_constant() else True


# ---------------------------
# Ritt-Kolchin reduction
# ---------------------------
@dataclass
class ReductionCertificate:
    poly: DiffPoly
    remainder: DiffPoly
    lam: AutoreducedSet
    # per element index: [initial power, separant power]
    exponents: Dict[int, List[int]] = field(default_factory=dict)
    # (coefficient, theta, element index)
    combination: List[Tuple[DiffPoly, DerivOp, int]] = field(default_factory=list)

    def multiplier(self) -> DiffPoly:
        m = DiffPoly.constant(self.poly.field, 1)
        for k, (a, b) in sorted(self.exponents.items()):
            m = m * self.lam.initials[k] ** a * self.lam.separants[k] ** b
        return m

    def h_power(self) -> int:
        """An exponent s such that the multiplier divides H^s."""
        return max((max(a, b) for a, b in self.exponents.values()), default=0)

    def verify(self) -> bool:
        """Expand multiplier*f - sum(c*theta(g)) - r and test for zero."""
        total = self.multiplier() * self.poly - self.remainder
        for c, theta, k in self.combination:
            total = total - c * self.lam[k].theta_apply(theta)
        return not total

    def to_report(self) -> ReductionReport:
        exponents = []
        for k, (a, b) in sorted(self.exponents.items()):
            exponents.append(f"({self.lam[k].to_text()}): initial^{a} separant^{b}")
        steps = [CertificateStep(element=self.lam[k].to_text(), theta=theta_text(theta), coefficient=c.to_text())
                 for c, theta, k in self.combination]
        return ReductionReport(poly=self.poly.to_text(), remainder=self.remainder.to_text(),
                               multiplier=self.multiplier().to_text(), exponents=exponents,
                               steps=steps, verified=self.verify())


def _find_reducer(u: AlgIndet, deg: int, lam: AutoreducedSet) -> Optional[Tuple[int, DerivOp]]:
    """(element index, theta) of the first element reducing u^deg, proper derivatives first."""
    for k, v in enumerate(lam.leaders):
        if u.is_proper_derivative_of(v):
            return k, theta_quotient(u.theta, v.theta)
    for k, v in enumerate(lam.leaders):
        if u == v and deg >= lam.degrees[k]:
            return k, (0,) * len(u.theta)
    return None


def ritt_remainder(f: DiffPoly, lam: AutoreducedSet) -> ReductionCertificate:
    """
    Reduce f by lam, highest reducible indeterminate first.

    Proper derivatives theta(v_g) are removed with the separant S_g, leader
    powers are lowered with the initial I_g.
    """
    cert = ReductionCertificate(poly=f, remainder=f, lam=lam)
    w = f
    while True:
        target = None
        for u in w.indeterminates():
            found = _find_reducer(u, w.degree(u), lam)
            if found is not None:
                target = (u, found)
                break
        if target is None:
            break
        u, (k, theta) = target
        g = lam[k]
        if any(theta):
            reducer = g.theta_apply(theta)
            mult = lam.separants[k]
            slot, low = 1, 1
        else:
            reducer = g
            mult = lam.initials[k]
            slot, low = 0, lam.degrees[k]
        while w.degree(u) >= low:
            d = w.degree(u)
            c = w.coefficient_of(u, d) * DiffPoly.from_indet(w.field, u, d - low) if d > low else w.coefficient_of(u, d)
            w = mult * w - c * reducer
            cert.combination = [(mult * q, th, idx) for q, th, idx in cert.combination]
            cert.combination.append((c, theta, k))
            powers = cert.exponents.setdefault(k, [0, 0])
            powers[slot] += 1
            logger.debug("reduced %s by [%s](%s)", u, theta_text(theta), g.to_text())
    cert.remainder = w
    return cert


def ideal_member(f: DiffPoly, lam: AutoreducedSet) -> bool:
    """Membership in the prime ideal whose characteristic set is lam (assumed)."""
    return not ritt_remainder(f, lam).remainder


def membership_report(f: DiffPoly, lam: AutoreducedSet) -> MembershipReport:
    r = ritt_remainder(f, lam).remainder
    return MembershipReport(poly=f.to_text(), member=not r, remainder=r.to_text())


# ---------------------------
# Coherence
# ---------------------------
def delta_polynomial(f: DiffPoly, g: DiffPoly) -> Optional[Tuple[AlgIndet, DiffPoly]]:
    """
    (v, S_g*theta_f(f) - S_f*theta_g(g)) at the least common derivative v of
    the leaders, or None when the leaders belong to different variables.
    """
    vf, vg = f.leader(), g.leader()
    if vf.var != vg.var:
        return None
    theta = theta_lcm(vf.theta, vg.theta)
    v = AlgIndet(vf.var, theta)
    tf = theta_quotient(theta, vf.theta)
    tg = theta_quotient(theta, vg.theta)
    delta = g.separant() * f.theta_apply(tf) - f.separant() * g.theta_apply(tg)
    return v, delta


def lower_prolongations(lam: AutoreducedSet, v: AlgIndet) -> List[DiffPoly]:
    """The finite set {theta(h) : h in lam, theta(v_h) < v}, highest leader first."""
    out = []
    m = len(v.theta)
    for k, h in enumerate(lam):
        vh = lam.leaders[k]
        budget = v.order - vh.order
        if budget < 0:
            continue
        for theta in product(range(budget + 1), repeat=m):
            if sum(theta) > budget:
                continue
            if vh.apply(theta) < v:
                out.append(h.theta_apply(theta))
    return sorted(out, key=lambda p: p.rank_key(), reverse=True)


def algebraic_pseudo_remainder(f: DiffPoly, generators: Sequence[DiffPoly]) -> DiffPoly:
    """
    Algebraic pseudo-reduction by polynomials treated as ordinary ones.

    Only leader-degree steps are taken, premultiplying by the initial of the
    reducer, so each multiplier is an initial or a separant of the set.
    """
    ranked = [(g.rank(), g.initial(), g) for g in generators if not g.is_constant()]
    w = f
    while True:
        step = None
        for u in w.indeterminates():
            for (v, d), ini, g in ranked:
                if v == u and w.degree(u) >= d:
                    step = (u, d, ini, g)
                    break
            if step:
                break
        if step is None:
            return w
        u, d, ini, g = step
        e = w.degree(u)
        c = w.coefficient_of(u, e)
        if e > d:
            c = c * DiffPoly.from_indet(w.field, u, e - d)
        w = ini * w - c * g


def check_coherent(lam: AutoreducedSet, budget: int = GROEBNER_BUDGET) -> CoherenceReport:
    """
    Check every pair with a common leader derivative.

    Raises:
        ResourceLimit: the saturation computation ran out of budget
    """
    pairs = []
    coherent = True
    witness = None
    for a in range(len(lam)):
        for b in range(a + 1, len(lam)):
            f, g = lam[a], lam[b]
            found = delta_polynomial(f, g)
            if found is None:
                continue
            v, delta = found
            gens = lower_prolongations(lam, v)
            r = algebraic_pseudo_remainder(delta, gens)
            if not r:
                verdict, method = "reduces to zero", "pseudo-reduction"
            else:
                ok = saturation_member(r, gens, lam.H, budget)
                verdict, method = ("in saturation", "groebner") if ok else ("not in ideal", "groebner")
            passed = verdict != "not in ideal"
            pairs.append(CoherencePair(f=f.to_text(), g=g.to_text(), common_derivative=str(v),
                                       delta=delta.to_text(), verdict=verdict, method=method))
            if not passed and coherent:
                coherent = False
                witness = delta.to_text()
                logger.info("incoherent pair %s / %s at %s", f.to_text(), g.to_text(), v)
    return CoherenceReport(coherent=coherent, pairs=pairs, witness=witness)


# ---------------------------
# Orders and coefficient maps
# ---------------------------
def compare_autoreduced(a: AutoreducedSet, b: AutoreducedSet) -> int:
    """Kolchin's order: -1 when a ranks lower than b, 0 when equal, 1 otherwise."""
    for f, g in zip(a, b):
        kf, kg = f.rank_key(), g.rank_key()
        if kf != kg:
            return -1 if kf < kg else 1
    if len(a) == len(b):
        return 0
    return -1 if len(a) > len(b) else 1


def map_coefficients(lam: AutoreducedSet, phi: Callable, field: Optional[CoefficientField] = None) -> AutoreducedSet:
    """
    Apply a coefficient homomorphism to every element.

    Raises:
        HVanishesUnderMap: H^phi is zero
    """
    h_phi = lam.H.map_coefficients(phi, field)
    if not h_phi:
        bad = next((f for k, f in enumerate(lam)
                    if not lam.initials[k].map_coefficients(phi, field)
                    or not lam.separants[k].map_coefficients(phi, field)), lam[0])
        raise HVanishesUnderMap(bad.to_text())
    return check_autoreduced([f.map_coefficients(phi, field) for f in lam])


def rank_report(polys: Sequence[DiffPoly]) -> RankReport:
    """Leader, degree, separant and initial of each polynomial, plus their rank order."""
    entries = []
    for f in polys:
        if f.is_constant():
            entries.append(RankEntry(poly=f.to_text()))
            continue
        v, d = f.rank()
        entries.append(RankEntry(poly=f.to_text(), leader=str(v), degree=d,
                                 separant=f.separant().to_text(), initial=f.initial().to_text()))
    ordering = [f.to_text() for f in sorted(polys, key=lambda f: f.rank_key())]
    return RankReport(entries=entries, ordering=ordering)
