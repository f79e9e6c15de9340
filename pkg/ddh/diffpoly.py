"""
Sparse exact differential polynomials in x1..xn under m commuting derivations.

An algebraic indeterminate theta x_i is an ``AlgIndet``; a monomial is a tuple
of (indeterminate, exponent) pairs sorted from the highest-ranked
indeterminate down; a ``DiffPoly`` maps monomials to nonzero coefficients of
a ``CoefficientField``.

The ranking compares (total order, variable, e_m, ..., e_1) lexicographically.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from sympy.polys.polyerrors import CoercionFailed

from .coeffield import CoefficientField, FieldElem
from .errors import ConstantPolynomial, DerivationIndexError, MissingIndeterminate

logger = logging.getLogger(__name__)

DerivOp = Tuple[int, ...]


def compose_theta(a: DerivOp, b: DerivOp) -> DerivOp:
    """Composition in the free commutative monoid on the derivations."""
    return tuple(x + y for x, y in zip(a, b))


def theta_divides(a: DerivOp, b: DerivOp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def theta_quotient(b: DerivOp, a: DerivOp) -> DerivOp:
    return tuple(y - x for x, y in zip(a, b))


def theta_lcm(a: DerivOp, b: DerivOp) -> DerivOp:
    return tuple(max(x, y) for x, y in zip(a, b))


def unit_theta(m: int, j: int) -> DerivOp:
    return tuple(1 if k == j else 0 for k in range(1, m + 1))


def theta_text(theta: DerivOp) -> str:
    parts = []
    for j, e in enumerate(theta, start=1):
        if e == 1:
            parts.append(f"d{j}")
        elif e > 1:
            parts.append(f"d{j}^{e}")
    return " ".join(parts) if parts else "id"


@dataclass(frozen=True)
class Var:
    """A differential variable: x<index>, or the prolonged copy x<index>_<copy>."""
    index: int
    copy: Optional[int] = None

    @property
    def key(self) -> Tuple[int, int]:
        return (-1 if self.copy is None else self.copy, self.index)

    def __str__(self):
        return f"x{self.index}" if self.copy is None else f"x{self.index}_{self.copy}"


@total_ordering
@dataclass(frozen=True)
class AlgIndet:
    """The algebraic indeterminate theta(var)."""
    var: Var
    theta: DerivOp
    key: tuple = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (sum(self.theta), self.var.key, tuple(reversed(self.theta))))

    def __lt__(self, other):
        if not isinstance(other, AlgIndet):
            return NotImplemented
        return self.key < other.key

    @property
    def order(self) -> int:
        return sum(self.theta)

    def derive(self, j: int) -> "AlgIndet":
        theta = list(self.theta)
        theta[j - 1] += 1
        return AlgIndet(self.var, tuple(theta))

    def apply(self, theta: DerivOp) -> "AlgIndet":
        return AlgIndet(self.var, compose_theta(self.theta, theta))

    def is_derivative_of(self, other: "AlgIndet") -> bool:
        return self.var == other.var and theta_divides(other.theta, self.theta)

    def is_proper_derivative_of(self, other: "AlgIndet") -> bool:
        return self != other and self.is_derivative_of(other)

    def __str__(self):
        if not any(self.theta):
            return str(self.var)
        return f"{theta_text(self.theta)} {self.var}"


def rank_compare(u: AlgIndet, v: AlgIndet) -> int:
    """-1, 0 or 1 as u ranks below, equal to, or above v."""
    if u.key == v.key:
        return 0
    return -1 if u.key < v.key else 1


def indeterminates_up_to(n: int, m: int, order: int) -> List[AlgIndet]:
    """Every theta x_i with i <= n and total order <= ``order``, in rank order."""
    out = []
    for i in range(1, n + 1):
        for theta in product(range(order + 1), repeat=m):
            if sum(theta) <= order:
                out.append(AlgIndet(Var(i), tuple(theta)))
    return sorted(out)


Monomial = Tuple[Tuple[AlgIndet, int], ...]


def make_monomial(powers: Mapping[AlgIndet, int]) -> Monomial:
    return tuple(sorted(((u, e) for u, e in powers.items() if e), key=lambda it: it[0].key, reverse=True))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for u, e in b:
        powers[u] = powers.get(u, 0) + e
    return make_monomial(powers)


def monomial_key(mono: Monomial) -> tuple:
    return tuple((u.key, e) for u, e in mono)


def monomial_text(mono: Monomial) -> str:
    parts = []
    for u, e in mono:
        text = str(u)
        if e == 1:
            parts.append(text)
        elif any(u.theta):
            parts.append(f"({text})^{e}")
        else:
            parts.append(f"{text}^{e}")
    return "*".join(parts)


Scalar = Union[int, Fraction, FieldElem]


class DiffPoly:
    """
    A differential polynomial with coefficients in ``field``.

    Instances are immutable; every operation returns a new polynomial.
    """

    __slots__ = ("field", "terms", "_hash")

    def __init__(self, field: CoefficientField, terms: Optional[Mapping[Monomial, FieldElem]] = None):
        self.field = field
        self.terms: Dict[Monomial, FieldElem] = {mono: c for mono, c in (terms or {}).items() if c}
        self._hash = None

    # ---------------------------
    # Constructors
    # ---------------------------
    @classmethod
    def zero(cls, field: CoefficientField) -> "DiffPoly":
        return cls(field)

    @classmethod
    def constant(cls, field: CoefficientField, c: Scalar) -> "DiffPoly":
        return cls(field, {(): field.convert(c)})

    @classmethod
    def from_indet(cls, field: CoefficientField, u: AlgIndet, exp: int = 1) -> "DiffPoly":
        if len(u.theta) != field.m:
            raise DerivationIndexError(len(u.theta), field.m)
        return cls(field, {((u, exp),): field.one})

    @classmethod
    def variable(cls, field: CoefficientField, index: int, copy: Optional[int] = None) -> "DiffPoly":
        return cls.from_indet(field, AlgIndet(Var(index, copy), (0,) * field.m))

    # ---------------------------
    # Arithmetic
    # ---------------------------
    def _coerce(self, other) -> Optional["DiffPoly"]:
        if isinstance(other, DiffPoly):
            return other
        try:
            return DiffPoly.constant(self.field, other)
        except (TypeError, ValueError, CoercionFailed):
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, self.field.zero) + c
        return DiffPoly(self.field, terms)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly(self.field, {mono: -c for mono, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            try:
                c = self.field.convert(other)
            except (TypeError, ValueError, CoercionFailed):
                return NotImplemented
            return self.scale(c)
        terms: Dict[Monomial, FieldElem] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = monomial_mul(m1, m2)
                terms[mono] = terms.get(mono, self.field.zero) + c1 * c2
        return DiffPoly(self.field, terms)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.is_constant():
            raise ValueError("division by a polynomial with indeterminates")
        c = other.constant_value()
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(self.field.one / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = DiffPoly.constant(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: FieldElem) -> "DiffPoly":
        return DiffPoly(self.field, {mono: v * c for mono, v in self.terms.items()})

    def __eq__(self, other):
        other = self._coerce(other) if not isinstance(other, DiffPoly) else other
        if other is None:
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"DiffPoly({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    # ---------------------------
    # Structure
    # ---------------------------
    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def constant_value(self) -> FieldElem:
        return self.terms.get((), self.field.zero)

    def indeterminates(self) -> List[AlgIndet]:
        """Indeterminates occurring in the polynomial, highest rank first."""
        seen = {u for mono in self.terms for u, _ in mono}
        return sorted(seen, reverse=True)

    def variables(self) -> List[Var]:
        return sorted({u.var for u in self.indeterminates()}, key=lambda v: v.key)

    def order(self) -> int:
        return max((u.order for u in self.indeterminates()), default=0)

    def degree(self, u: Optional[AlgIndet] = None) -> int:
        """Degree in ``u`` (the leader when omitted)."""
        if u is None:
            u = self.leader()
        return max((dict(mono).get(u, 0) for mono in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self.terms), default=0)

    def leader(self) -> AlgIndet:
        if self.is_constant():
            raise ConstantPolynomial(self.to_text())
        return max(mono[0][0] for mono in self.terms if mono)

    def rank(self) -> Tuple[AlgIndet, int]:
        u = self.leader()
        return u, self.degree(u)

    def rank_key(self) -> tuple:
        """Sort key for ranks; constants rank below every non-constant."""
        if self.is_constant():
            return (0,)
        u, d = self.rank()
        return (1, u.key, d)

    def coefficient_of(self, u: AlgIndet, d: int) -> "DiffPoly":
        """Coefficient of u^d when the polynomial is read as univariate in u."""
        terms = {}
        for mono, c in self.terms.items():
            powers = dict(mono)
            if powers.get(u, 0) == d:
                powers.pop(u, None)
                terms[make_monomial(powers)] = c
        return DiffPoly(self.field, terms)

    def partial(self, u: AlgIndet) -> "DiffPoly":
        """Formal partial derivative in the indeterminate ``u``."""
        terms: Dict[Monomial, FieldElem] = {}
        for mono, c in self.terms.items():
            powers = dict(mono)
            e = powers.get(u, 0)
            if not e:
                continue
            powers[u] = e - 1
            new = make_monomial(powers)
            terms[new] = terms.get(new, self.field.zero) + c * e
        return DiffPoly(self.field, terms)

    def initial(self) -> "DiffPoly":
        u, d = self.rank()
        return self.coefficient_of(u, d)

    def separant(self) -> "DiffPoly":
        return self.partial(self.leader())

    def leading_part(self) -> "DiffPoly":
        """I_f * v_f^d_f."""
        u, d = self.rank()
        return self.initial() * DiffPoly.from_indet(self.field, u, d)

    # ---------------------------
    # Derivations
    # ---------------------------
    def derive(self, j: int) -> "DiffPoly":
        """delta_j by the Leibniz rule on coefficients and indeterminates."""
        if not 1 <= j <= self.field.m:
            raise DerivationIndexError(j, self.field.m)
        terms: Dict[Monomial, FieldElem] = {}
        zero = self.field.zero
        for mono, c in self.terms.items():
            dc = self.field.derive(j, c)
            if dc:
                terms[mono] = terms.get(mono, zero) + dc
            for u, e in mono:
                powers = dict(mono)
                powers[u] = e - 1
                du = u.derive(j)
                powers[du] = powers.get(du, 0) + 1
                new = make_monomial(powers)
                terms[new] = terms.get(new, zero) + c * e
        return DiffPoly(self.field, terms)

    def theta_apply(self, theta: DerivOp) -> "DiffPoly":
        f = self
        for j, e in enumerate(theta, start=1):
            for _ in range(e):
                f = f.derive(j)
        return f

    # ---------------------------
    # Substitution and evaluation
    # ---------------------------
    def map_coefficients(self, phi: Callable[[FieldElem], FieldElem],
                         field: Optional[CoefficientField] = None) -> "DiffPoly":
        target = field or self.field
        return DiffPoly(target, {mono: phi(c) for mono, c in self.terms.items()})

    def rename(self, mapping: Callable[[Var], Var]) -> "DiffPoly":
        """Rename variables, keeping every derivative pattern."""
        terms = {}
        for mono, c in self.terms.items():
            terms[make_monomial({AlgIndet(mapping(u.var), u.theta): e for u, e in mono})] = c
        return DiffPoly(self.field, terms)

    def evaluate(self, assignment: Mapping, one=None,
                 derive: Optional[Callable] = None,
                 coefficient: Optional[Callable] = None):
        """
        Evaluate the polynomial in a ring.

        Args:
            assignment: values for indeterminates. Keys are ``AlgIndet`` (a
                direct value) or ``Var`` (a point whose jets are computed
                with ``derive``).
            one: unit of the target ring (defaults to the field's one)
            derive: derive(j, value) in the target ring (defaults to the
                coefficient field derivation)
            coefficient: maps a coefficient into the target ring
        """
        one = self.field.one if one is None else one
        derive = derive or self.field.derive
        coefficient = coefficient or (lambda c: c)
        jets = {}

        def value_of(u: AlgIndet):
            if u in assignment:
                return assignment[u]
            if u.var not in assignment:
                raise MissingIndeterminate(str(u))
            if u not in jets:
                v = assignment[u.var]
                for j, e in enumerate(u.theta, start=1):
                    for _ in range(e):
                        v = derive(j, v)
                jets[u] = v
            return jets[u]

        total = one * 0
        for mono, c in self.terms.items():
            term = one
            for u, e in mono:
                term = term * (value_of(u) ** e)
            total = total + term * coefficient(c)
        return total

    def substitute(self, mapping: Mapping[AlgIndet, "DiffPoly"]) -> "DiffPoly":
        """Replace indeterminates by polynomials; unmapped ones are kept."""
        total = DiffPoly(self.field)
        for mono, c in self.terms.items():
            term = DiffPoly.constant(self.field, c)
            for u, e in mono:
                image = mapping.get(u)
                term = term * (image ** e if image is not None else DiffPoly.from_indet(self.field, u, e))
            total = total + term
        return total

    # ---------------------------
    # Rendering
    # ---------------------------
    def sorted_terms(self) -> List[Tuple[Monomial, FieldElem]]:
        return sorted(self.terms.items(), key=lambda it: monomial_key(it[0]), reverse=True)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for k, (mono, c) in enumerate(self.sorted_terms()):
            if not mono:
                negative, body = self.field.split_sign(c)
                text = self.field.body_text(body)
            else:
                negative, body = self.field.split_sign(c)
                mono_text = monomial_text(mono)
                text = mono_text if body == self.field.one else f"{self.field.body_text(body)}*{mono_text}"
            if k == 0:
                out = "-" + text if negative else text
            else:
                out += (" - " if negative else " + ") + text
        return out


# ---------------------------
# Operation-style helpers
# ---------------------------
def apply_derivation(j: int, f: DiffPoly) -> DiffPoly:
    return f.derive(j)


def theta_apply(theta: DerivOp, f: DiffPoly) -> DiffPoly:
    return f.theta_apply(theta)


def leader(f: DiffPoly) -> AlgIndet:
    return f.leader()


def degree(f: DiffPoly) -> int:
    return f.degree()


def rank(f: DiffPoly) -> Tuple[AlgIndet, int]:
    return f.rank()


def separant(f: DiffPoly) -> DiffPoly:
    return f.separant()


def initial(f: DiffPoly) -> DiffPoly:
    return f.initial()


def evaluate(f: DiffPoly, assignment: Mapping) -> FieldElem:
    return f.evaluate(assignment)


def jets_for(field: CoefficientField, point: Mapping[Var, FieldElem],
             indets: Iterable[AlgIndet]) -> Dict[AlgIndet, FieldElem]:
    """Values theta(a_i) for the given indeterminates of the point a."""
    out = {}
    for u in indets:
        if u.var not in point:
            raise MissingIndeterminate(str(u))
        out[u] = field.derive_theta(u.theta, point[u.var])
    return out
