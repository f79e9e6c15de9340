"""
Computable differential coefficient fields of characteristic zero.

Two kinds are supported:

* ``rationals``          -- the field QQ, every derivation acts as zero;
* ``rational-functions`` -- QQ(t1, ..., ts) where delta_j acts as d/dt_j for
                            j <= min(m, s) and as zero otherwise.

Elements are plain sympy domain elements (``QQ`` rationals or
``FracElement`` rational functions), so they are immutable, hashable and
canonical: two elements are equal iff their reduced representations are.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField

from .errors import DerivationIndexError, PoleAtPoint

logger = logging.getLogger(__name__)

RATIONALS = "rationals"
RATIONAL_FUNCTIONS = "rational-functions"

FieldElem = Union[FracElement, object]
Point = Tuple[object, ...]


def to_qq(value) -> object:
    """Convert an int, Fraction, decimal-free string or QQ element into QQ."""
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def rational_text(q) -> str:
    """Render a rational number as ``p`` or ``p/q``."""
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


class CoefficientField:
    """
    A differential field with ``m`` commuting derivations.

    Args:
        m: number of derivations delta_1..delta_m (may be zero)
        kind: ``rationals`` or ``rational-functions``
        s: number of function variables t1..ts (rational-functions only)
    """

    def __init__(self, m: int, kind: str = RATIONALS, s: int = 0):
        if m < 0:
            raise ValueError("number of derivations must be non-negative")
        if kind not in (RATIONALS, RATIONAL_FUNCTIONS):
            raise ValueError(f"unknown field kind {kind!r}")
        if kind == RATIONAL_FUNCTIONS and s < 1:
            raise ValueError("rational-functions needs at least one variable")
        if kind == RATIONALS:
            s = 0
        self.m = m
        self.kind = kind
        self.s = s
        if kind == RATIONAL_FUNCTIONS:
            self.domain = FracField(",".join(f"t{j}" for j in range(1, s + 1)), QQ)
            self.ring = self.domain.ring
            self.gens: Tuple[FieldElem, ...] = tuple(self.domain.gens)
            self.zero = self.domain.zero
            self.one = self.domain.one
        else:
            self.domain = QQ
            self.ring = None
            self.gens = ()
            self.zero = QQ.zero
            self.one = QQ.one

    # ---------------------------
    # Identity and conversion
    # ---------------------------
    def __eq__(self, other):
        return isinstance(other, CoefficientField) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        if self.kind == RATIONALS:
            return f"CoefficientField(m={self.m}, QQ)"
        return f"CoefficientField(m={self.m}, QQ({', '.join(f't{j}' for j in range(1, self.s + 1))}))"

    def signature(self) -> Tuple[int, str, int]:
        return (self.m, self.kind, self.s)

    def is_element(self, a) -> bool:
        if self.kind == RATIONAL_FUNCTIONS:
            return isinstance(a, FracElement) and a.field == self.domain
        return QQ.of_type(a)

    def convert(self, a) -> FieldElem:
        """Coerce ints, Fractions, QQ elements and field elements into this field."""
        if self.is_element(a):
            return a
        if self.kind == RATIONAL_FUNCTIONS:
            if isinstance(a, FracElement):
                raise TypeError(f"element of {a.field} is not in {self!r}")
            return self.domain.ground_new(to_qq(a))
        if isinstance(a, FracElement):
            if not self._is_ground(a):
                raise TypeError(f"{a} is not a rational number")
            return self._ground_value(a)
        return to_qq(a)

    def from_rational(self, num: int, den: int = 1) -> FieldElem:
        return self.convert(Fraction(num, den))

    def gen(self, j: int) -> FieldElem:
        """The function variable t_j."""
        if not 1 <= j <= self.s:
            raise IndexError(f"t{j} is not a variable of {self!r}")
        return self.gens[j - 1]

    # ---------------------------
    # Derivations
    # ---------------------------
    def derive(self, j: int, a: FieldElem) -> FieldElem:
        """delta_j(a)."""
        if not 1 <= j <= self.m:
            raise DerivationIndexError(j, self.m)
        if self.kind == RATIONALS or j > self.s:
            return self.zero
        return a.diff(self.gens[j - 1])

    def derive_theta(self, theta: Sequence[int], a: FieldElem) -> FieldElem:
        for j, e in enumerate(theta, start=1):
            for _ in range(e):
                a = self.derive(j, a)
        return a

    def is_constant(self, a: FieldElem) -> bool:
        """True when every derivation kills ``a``."""
        return all(not self.derive(j, a) for j in range(1, self.m + 1))

    def is_rational(self, a: FieldElem) -> bool:
        if self.kind == RATIONALS:
            return True
        return self._is_ground(a)

    def to_rational(self, a: FieldElem):
        if self.kind == RATIONALS:
            return a
        if not self._is_ground(a):
            raise ValueError(f"{self.to_text(a)} is not a rational number")
        return self._ground_value(a)

    @staticmethod
    def _is_ground(a: FracElement) -> bool:
        return a.numer.is_ground and a.denom.is_ground

    @staticmethod
    def _ground_value(a: FracElement):
        num = a.numer.LC if a.numer else QQ.zero
        return QQ.convert(num) / QQ.convert(a.denom.LC)

    # ---------------------------
    # Structure of elements
    # ---------------------------
    def fraction_terms(self, a: FieldElem) -> Tuple[List[Tuple[Tuple[int, ...], object]], List[Tuple[Tuple[int, ...], object]]]:
        """
        Numerator and denominator of ``a`` as lists of (exponents, QQ coefficient).

        Used to push an element through a ring homomorphism given by the
        images of t1..ts.
        """
        if self.kind == RATIONALS:
            return [((), a)] if a else [], [((), QQ.one)]
        numer = [(monom, QQ.convert(c)) for monom, c in a.numer.terms()]
        denom = [(monom, QQ.convert(c)) for monom, c in a.denom.terms()]
        return numer, denom

    def from_terms(self, terms: Iterable[Tuple[Tuple[int, ...], object]]) -> FieldElem:
        """Build a polynomial element from (exponents, coefficient) pairs."""
        if self.kind == RATIONALS:
            total = QQ.zero
            for _, c in terms:
                total += to_qq(c)
            return total
        poly = self.ring.from_dict({tuple(monom): to_qq(c) for monom, c in terms}) if terms else self.ring.zero
        return self.domain.new(poly)

    def apply_homomorphism(self, a: FieldElem, images: Sequence, one, invert):
        """
        Evaluate ``a`` in another ring from the images of t1..ts.

        ``one`` is the unit of the target ring and ``invert`` inverts the
        image of the denominator there; coefficients are rationals multiplied
        into target elements.
        """
        numer, denom = self.fraction_terms(a)

        def image(terms):
            total = one * 0
            for monom, c in terms:
                term = one * c
                for g, e in zip(images, monom):
                    if e:
                        term = term * (g ** e)
                total = total + term
            return total

        top = image(numer)
        if self.kind == RATIONALS or a.denom == 1:
            return top
        return top * invert(image(denom))

    # ---------------------------
    # Evaluation at rational points
    # ---------------------------
    def _coerce_point(self, p: Sequence) -> Point:
        if len(p) < self.s:
            raise ValueError(f"point needs {self.s} coordinates, got {len(p)}")
        return tuple(to_qq(v) for v in p[: self.s])

    @staticmethod
    def _poly_value(terms, point) -> object:
        total = QQ.zero
        for monom, c in terms:
            term = QQ.convert(c)
            for v, e in zip(point, monom):
                if e:
                    term *= v ** e
            total += term
        return total

    def eval_at_point(self, a: FieldElem, p: Sequence) -> object:
        """Exact rational value of ``a`` at the point ``p``."""
        if self.kind == RATIONALS:
            return a
        point = self._coerce_point(p)
        numer, denom = self.fraction_terms(a)
        bottom = self._poly_value(denom, point)
        if not bottom:
            raise PoleAtPoint(self.to_text(a), tuple(rational_text(v) for v in point))
        return self._poly_value(numer, point) / bottom

    def taylor(self, a: FieldElem, p: Sequence, order: int):
        """
        Truncated Taylor expansion of ``a`` at ``p``.

        The result is a polynomial of total degree <= order in the shifted
        variables s_j = t_j - p_j, returned as an element of ``self.ring``
        (whose generators then stand for s_1..s_s).
        """
        if self.kind == RATIONALS:
            raise ValueError("Taylor expansion needs function variables")
        point = self._coerce_point(p)
        shift = [(g, g + v) for g, v in zip(self.ring.gens, point)]
        numer = a.numer.compose(shift)
        denom = a.denom.compose(shift)
        d0 = denom.coeff(1) if denom else QQ.zero
        if not d0:
            raise PoleAtPoint(self.to_text(a), tuple(rational_text(v) for v in point))
        # 1/D = (1/d0) * sum_k (-(D - d0)/d0)^k, truncated
        tail = truncate(-(denom - d0).quo_ground(d0), order)
        inverse = self.ring.one
        power = self.ring.one
        for _ in range(order):
            power = truncate(power * tail, order)
            if not power:
                break
            inverse += power
        return truncate(truncate(numer, order) * inverse.quo_ground(d0), order)

    # ---------------------------
    # Rendering
    # ---------------------------
    def split_sign(self, a: FieldElem) -> Tuple[bool, FieldElem]:
        """(negative, |a|) where the sign is pulled out of single-term numerators."""
        if self.kind == RATIONALS:
            return (a < 0, -a if a < 0 else a)
        if len(a.numer.terms()) == 1 and a.numer.LC < 0:
            return True, -a
        return False, a

    def to_text(self, a: FieldElem) -> str:
        """Canonical rendering in the polynomial grammar."""
        negative, body = self.split_sign(a)
        text = self.body_text(body)
        return "-" + text if negative else text

    def body_text(self, a: FieldElem) -> str:
        if self.kind == RATIONALS:
            return rational_text(a)
        if not a:
            return "0"
        numer, denom = a.numer, a.denom
        lc = denom.LC
        numer, denom = numer.quo_ground(lc), denom.quo_ground(lc)
        terms = numer.terms()
        if len(terms) == 1:
            top = self._term_text(*terms[0])
        else:
            top = "(" + self.poly_text(numer) + ")"
        if denom == 1:
            return top
        dterms = denom.terms()
        if len(dterms) == 1 and sum(1 for e in dterms[0][0] if e) == 1:
            bottom = self._monomial_text(dterms[0][0])
        else:
            bottom = "(" + self.poly_text(denom) + ")"
        return f"{top}/{bottom}"

    @staticmethod
    def _monomial_text(monom: Tuple[int, ...]) -> str:
        parts = []
        for j, e in enumerate(monom, start=1):
            if e == 1:
                parts.append(f"t{j}")
            elif e > 1:
                parts.append(f"t{j}^{e}")
        return "*".join(parts)

    def _term_text(self, monom, c) -> str:
        c = QQ.convert(c)
        sign = "-" if c < 0 else ""
        c = -c if c < 0 else c
        mono = self._monomial_text(monom)
        if not mono:
            return sign + rational_text(c)
        if c == 1:
            return sign + mono
        return f"{sign}{rational_text(c)}*{mono}"

    def poly_text(self, poly) -> str:
        """Render a polynomial in t1..ts, highest total degree first."""
        if not poly:
            return "0"
        terms = sorted(poly.terms(), key=lambda mc: (sum(mc[0]), mc[0]), reverse=True)
        out = ""
        for k, (monom, c) in enumerate(terms):
            text = self._term_text(monom, c)
            if k == 0:
                out = text
            elif text.startswith("-"):
                out += " - " + text[1:]
            else:
                out += " + " + text
        return out


def truncate(poly, order: int):
    """Drop every term of total degree above ``order``."""
    return poly.ring.from_dict({monom: c for monom, c in poly.terms() if sum(monom) <= order}) if poly else poly


def series_coefficients(poly) -> Dict[Tuple[int, ...], object]:
    return {monom: QQ.convert(c) for monom, c in poly.terms()} if poly else {}
