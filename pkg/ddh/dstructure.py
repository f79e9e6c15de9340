"""
D-differential structures on a coefficient field.

A structure is presented by the images e(t_j) in D(K) of (some of) the
field generators. Every other value of e is forced: polynomials are pushed
through ring operations and denominators are inverted in D(K).
"""

import logging
import random
import threading
from typing import Dict, List, Mapping, Optional, Sequence

from sympy.polys.matrices import DomainMatrix

from .coeffield import RATIONALS, CoefficientField, FieldElem
from .config import SAMPLE_BUDGET, SAMPLE_SEED
from .diffpoly import DiffPoly
from .errors import DenominatorNotUnit, InvalidAlgebra, NotAUnit, NotInDomain
from .finitealg import DElement, FiniteAlgebra
from .reports import CheckReport

logger = logging.getLogger(__name__)

MODE_E = "e"
MODE_SIGMA = "sigma"
MODE_COMPONENT = "component"


class DStructure:
    """
    The homomorphism e: K -> D(K) with pi o e = id.

    Args:
        algebra: the finite algebra B
        field: the coefficient field K
        images: e(t_j) keyed by generator index j; generators left out are
            outside the structure's domain (used when extending it)
        name: label used in reports
    """

    def __init__(self, algebra: FiniteAlgebra, field: CoefficientField,
                 images: Optional[Mapping[int, DElement]] = None, name: str = "e"):
        self.algebra = algebra
        self.field = field
        self.name = name
        self.images: Dict[int, DElement] = {}
        for j, image in (images or {}).items():
            if not 1 <= j <= field.s:
                raise InvalidAlgebra(f"t{j} is not a generator of {field!r}")
            if image.algebra != algebra:
                raise InvalidAlgebra(f"image of t{j} lives in another algebra")
            self.images[j] = DElement(algebra, [field.convert(c) for c in image.coords], field)
        self._cache: Dict[FieldElem, DElement] = {}
        self._lock = threading.RLock()

    @classmethod
    def trivial(cls, algebra: FiniteAlgebra, field: CoefficientField) -> "DStructure":
        """e(t_j) = t_j * 1 on every generator."""
        return cls(algebra, field, {j: algebra.embed(field.gen(j), field) for j in range(1, field.s + 1)})

    @property
    def declared(self) -> List[int]:
        return sorted(self.images)

    def with_image(self, j: int, image: DElement) -> "DStructure":
        images = dict(self.images)
        images[j] = image
        return DStructure(self.algebra, self.field, images, self.name)

    def __repr__(self):
        return f"DStructure({self.name} on {self.algebra.name}, generators {self.declared})"

    # ---------------------------
    # Values of e
    # ---------------------------
    def in_domain(self, a: FieldElem) -> bool:
        if self.field.kind == RATIONALS:
            return True
        numer, denom = self.field.fraction_terms(self.field.convert(a))
        used = {j + 1 for monom, _ in numer + denom for j, e in enumerate(monom) if e}
        return used <= set(self.images)

    def _invert(self, d: DElement) -> DElement:
        try:
            return d.invert()
        except NotAUnit as exc:
            raise DenominatorNotUnit(exc.index, d.to_text()) from exc

    def e_of(self, a) -> DElement:
        """
        e(a) for a fraction of polynomials in the declared generators.

        Raises:
            NotInDomain: a involves an undeclared generator
            DenominatorNotUnit: e(denominator) has a vanishing residue
        """
        a = self.field.convert(a)
        with self._lock:
            cached = self._cache.get(a)
        if cached is not None:
            return cached
        if not self.in_domain(a):
            raise NotInDomain(f"{self.field.to_text(a)} involves generators outside {self.declared}")
        images = [self.images.get(j) for j in range(1, self.field.s + 1)]
        one = self.algebra.one(self.field.one, self.field)
        value = self.field.apply_homomorphism(a, images, one, self._invert)
        with self._lock:
            self._cache[a] = value
        return value

    def partial_of(self, j: int, a) -> FieldElem:
        """The e_j-coordinate of e(a); partial_0 is the identity coordinate."""
        return self.e_of(a).coords[j]

    def sigma(self, i: int, a) -> FieldElem:
        """sigma_i(a) = pi_i(e(a))."""
        if i == 0:
            return self.field.convert(a)
        return self.e_of(a).residue(i)

    # ---------------------------
    # Coefficientwise application
    # ---------------------------
    def map_poly(self, f: DiffPoly, mode: str = MODE_E, index: int = 0):
        """
        Apply the structure to the coefficients of f.

        ``e`` returns f^e as a DElement whose coordinates are differential
        polynomials over K; ``sigma`` returns f^{sigma_i}; ``component``
        returns f^{e_i} in the i-th local factor's adapted basis.
        """
        if mode == MODE_SIGMA:
            return f.map_coefficients(lambda c: self.sigma(index, c))
        zero = DiffPoly.zero(f.field)
        coords = [zero] * self.algebra.dim
        for mono, c in f.terms.items():
            image = self.e_of(c)
            for j, v in enumerate(image.coords):
                if v:
                    coords[j] = coords[j] + DiffPoly(f.field, {mono: v})
        fe = DElement(self.algebra, coords, f.field)
        if mode == MODE_E:
            return fe
        if mode == MODE_COMPONENT:
            return self.algebra.local_factor(index).project(fe)
        raise ValueError(f"unknown mode {mode!r}")


# ---------------------------
# Verification
# ---------------------------
def _random_element(field: CoefficientField, gens: Sequence[int], rng: random.Random) -> FieldElem:
    def poly():
        total = field.convert(rng.randint(-3, 3))
        for _ in range(rng.randint(1, 3)):
            term = field.convert(rng.choice([-2, -1, 1, 2, 3]))
            for j in gens:
                e = rng.randint(0, 2)
                if e:
                    term = term * field.gen(j) ** e
            total = total + term
        return total

    top = poly()
    if not gens or rng.random() < 0.5:
        return top
    bottom = poly()
    return top / bottom if bottom else top


def _jacobian_rank(field: CoefficientField, values: Sequence[FieldElem], gens: Sequence[int]) -> int:
    """Rank of d(values)/d(t_j); full rank witnesses algebraic independence."""
    if not values or not gens:
        return 0
    rows = [[v.diff(field.gen(j)) for j in gens] for v in values]
    matrix = DomainMatrix(rows, (len(rows), len(gens)), field.domain.to_domain())
    return matrix.rank()


def check_structure(s: DStructure, sample_budget: int = SAMPLE_BUDGET, seed: int = SAMPLE_SEED) -> CheckReport:
    """
    Check the defining laws on generators and on seeded random samples.

    The report names the first counterexample of each failed law.
    """
    field, algebra = s.field, s.algebra
    report = CheckReport(title=f"structure {s.name} on {algebra.name}")
    gens = s.declared
    for j in gens:
        g = field.gen(j)
        image = s.images[j]
        res = image.residue(0)
        report.add(f"pi(e(t{j})) = t{j}", res == g, "" if res == g else f"got {field.to_text(res)}")
    for k in range(1, field.m + 1):
        bad = None
        for j in gens:
            g = field.gen(j)
            lhs = s.e_of(field.derive(k, g))
            rhs = s.images[j].apply_delta(k)
            if lhs != rhs:
                bad = f"e(d{k} t{j}) = {lhs.to_text()} but d{k} e(t{j}) = {rhs.to_text()}"
                break
        report.add(f"e commutes with d{k} on generators", bad is None, bad or "")

    rng = random.Random(seed)
    failures: Dict[str, str] = {}
    for _ in range(sample_budget):
        a = _random_element(field, gens, rng)
        b = _random_element(field, gens, rng)
        try:
            ea, eb = s.e_of(a), s.e_of(b)
            if "additive" not in failures and s.e_of(a + b) != ea + eb:
                failures["additive"] = f"a = {field.to_text(a)}, b = {field.to_text(b)}"
            if "multiplicative" not in failures and s.e_of(a * b) != ea * eb:
                failures["multiplicative"] = f"a = {field.to_text(a)}, b = {field.to_text(b)}"
            if "pi(e(a)) = a" not in failures and ea.residue(0) != a:
                failures["pi(e(a)) = a"] = f"a = {field.to_text(a)}"
            for k in range(1, field.m + 1):
                key = f"e(d{k} a) = d{k} e(a)"
                if key not in failures and s.e_of(field.derive(k, a)) != ea.apply_delta(k):
                    failures[key] = f"a = {field.to_text(a)}"
        except DenominatorNotUnit as exc:
            failures.setdefault("denominators are units", str(exc))
    for name in ["additive", "multiplicative", "pi(e(a)) = a"] + \
            [f"e(d{k} a) = d{k} e(a)" for k in range(1, field.m + 1)] + ["denominators are units"]:
        report.add(f"{name} on {sample_budget} samples", name not in failures, failures.get(name, ""))

    if algebra.has_decomposition():
        for i in range(1, algebra.factor_count):
            values = [s.sigma(i, field.gen(j)) for j in gens]
            distinct = len(set(values)) == len(values)
            independent = _jacobian_rank(field, values, gens) == len(gens)
            detail = ", ".join(f"sigma{i}(t{j}) = {field.to_text(v)}" for j, v in zip(gens, values))
            report.add(f"sigma{i} injective on generators", distinct and independent, detail)
    else:
        report.notes.append("no local decomposition: sigma_i checks skipped")
    logger.info("checked structure %s: %s", s.name, "pass" if report.passed else "fail")
    return report


# ---------------------------
# Operation-style helpers
# ---------------------------
def e_of(s: DStructure, a) -> DElement:
    return s.e_of(a)


def partial_of(s: DStructure, j: int, a) -> FieldElem:
    return s.partial_of(j, a)


def sigma(s: DStructure, i: int, a) -> FieldElem:
    return s.sigma(i, a)


def map_poly(s: DStructure, f: DiffPoly, mode: str = MODE_E, index: int = 0):
    return s.map_poly(f, mode, index)
