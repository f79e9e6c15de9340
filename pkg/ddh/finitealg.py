"""
Finite commutative QQ-algebras B, their local decomposition, and D(R) = B (x) R.

A ``FiniteAlgebra`` is given by structure constants on a basis e0..el with
e0 the distinguished element (pi(e0) = 1, pi(ej) = 0 otherwise). Elements of
D(R) are ``DElement``s: coordinate vectors over any commutative ring whose
elements support + - * with rationals (field elements, differential
polynomials, ...).
"""

import logging
import re
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from . import linalg
from .coeffield import rational_text, to_qq
from .errors import (AlgebraMismatch, IdempotentsRequired, InvalidAlgebra, InvalidIdempotents,
                     NoDecomposition, NotAUnit)

logger = logging.getLogger(__name__)

Vector = List


def _vec_add(a, b):
    return [x + y for x, y in zip(a, b)]


def _vec_scale(a, c):
    return [x * c for x in a]


@dataclass
class LocalDecomposition:
    """Orthogonal idempotents u_0..u_t with per-factor data."""
    idempotents: List[Vector]
    projections: List[Vector]
    radicals: List[List[Vector]]
    generators: List[List[Vector]]
    nilpotency: List[int]

    @property
    def count(self) -> int:
        return len(self.idempotents)

    @property
    def index_bound(self) -> int:
        return max(self.nilpotency)


class FiniteAlgebra:
    """
    A finite commutative QQ-algebra with basis e0..el.

    Args:
        table: table[j][k] is the coordinate vector of e_j * e_k
        pi: coordinates of the distinguished projection (defaults to (1, 0, ..., 0))
        idempotents: optional hints for the local decomposition
        name: label used in reports
    """

    def __init__(self, table: Sequence[Sequence[Sequence]], pi: Optional[Sequence] = None,
                 idempotents: Optional[Sequence[Sequence]] = None, name: str = "B",
                 decomposition: Optional[LocalDecomposition] = None):
        self.dim = len(table)
        self.name = name
        self.table = [[[to_qq(c) for c in table[j][k]] for k in range(self.dim)] for j in range(self.dim)]
        for j in range(self.dim):
            if len(self.table[j]) != self.dim or any(len(v) != self.dim for v in self.table[j]):
                raise InvalidAlgebra(f"structure constants must form a {self.dim}x{self.dim}x{self.dim} table")
        self.pi = [to_qq(c) for c in pi] if pi is not None else [QQ.one] + [QQ.zero] * (self.dim - 1)
        if self.pi != [QQ.one] + [QQ.zero] * (self.dim - 1):
            raise InvalidAlgebra("pi must have coordinates (1, 0, ..., 0) on the basis")
        self._sparse = [[[(r, c) for r, c in enumerate(self.table[j][k]) if c] for k in range(self.dim)]
                        for j in range(self.dim)]
        self._check_laws()
        self.unit = self._find_unit()
        self._hints = [[to_qq(c) for c in u] for u in idempotents] if idempotents else None
        self._decomposition = decomposition
        self.levels: Optional[List[int]] = None
        self._locals: Dict[int, "LocalAlgebra"] = {}

    # ---------------------------
    # Constructors
    # ---------------------------
    @classmethod
    def product(cls, pieces: Sequence, name: str = "B") -> "FiniteAlgebra":
        """
        Product of local pieces QQ[eta_1..eta_q]/(eta)^d and points.

        ``pieces`` holds strings ``local(d=2)``, ``local(d=3, q=2)``, ``point``
        or (d, q) tuples. The basis lists each factor's unit followed by its
        monomials in eta of increasing degree; factor 0 carries pi.
        """
        specs = [_parse_piece(p) for p in pieces]
        if not specs:
            raise InvalidAlgebra("an algebra needs at least one factor")
        blocks = []
        for d, q in specs:
            monos = [mono for deg in range(d) for mono in _monomials(q, deg)]
            blocks.append(monos)
        dim = sum(len(b) for b in blocks)
        table = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
        offsets = []
        pos = 0
        for b in blocks:
            offsets.append(pos)
            pos += len(b)
        idempotents, generators, nilpotency, radicals, projections = [], [], [], [], []
        for (d, q), monos, off in zip(specs, blocks, offsets):
            index = {mono: off + k for k, mono in enumerate(monos)}
            for a, b in product(monos, repeat=2):
                prod = tuple(x + y for x, y in zip(a, b))
                if sum(prod) < d:
                    table[index[a]][index[b]][index[prod]] = 1
            unit = [0] * dim
            unit[off] = 1
            idempotents.append(unit)
            proj = [0] * dim
            proj[off] = 1
            projections.append(proj)
            gens, rad = [], []
            for mono in monos[1:]:
                vec = [0] * dim
                vec[index[mono]] = 1
                rad.append(vec)
                if sum(mono) == 1:
                    gens.append(vec)
            generators.append(gens)
            radicals.append(rad)
            nilpotency.append(d)
        conv = lambda rows: [[to_qq(c) for c in row] for row in rows]
        decomposition = LocalDecomposition(
            idempotents=conv(idempotents), projections=conv(projections),
            radicals=[conv(r) for r in radicals], generators=[conv(g) for g in generators],
            nilpotency=nilpotency)
        algebra = cls(table, name=name, decomposition=decomposition)
        algebra.pieces = [_piece_text(d, q) for d, q in specs]
        return algebra

    @classmethod
    def dual_numbers(cls, order: int = 2) -> "FiniteAlgebra":
        """QQ[eps]/(eps^order)."""
        return cls.product([f"local(d={order})"])

    # ---------------------------
    # Laws
    # ---------------------------
    def _check_laws(self):
        for j, k in combinations_with_replacement(range(self.dim), 2):
            if self.table[j][k] != self.table[k][j]:
                raise InvalidAlgebra(f"product e{j}*e{k} is not commutative")
        for a, b, c in product(range(self.dim), repeat=3):
            left = self.mul_vec(self.mul_vec(self.basis(a), self.basis(b)), self.basis(c))
            right = self.mul_vec(self.basis(a), self.mul_vec(self.basis(b), self.basis(c)))
            if left != right:
                raise InvalidAlgebra(f"product is not associative on e{a}, e{b}, e{c}")
        for j, k in product(range(self.dim), repeat=2):
            if self.apply_functional(self.pi, self.mul_vec(self.basis(j), self.basis(k))) != self.pi[j] * self.pi[k]:
                raise InvalidAlgebra(f"pi is not multiplicative on e{j}*e{k}")

    def _find_unit(self) -> Vector:
        # u * e_k = e_k for every k: sum_j u_j c[j][k][r] = delta_kr
        rows, rhs = [], []
        for k in range(self.dim):
            for r in range(self.dim):
                rows.append([self.table[j][k][r] for j in range(self.dim)])
                rhs.append(QQ.one if k == r else QQ.zero)
        unit = linalg.solve(rows, rhs, self.dim, QQ)
        if unit is None:
            raise InvalidAlgebra("algebra has no unit element")
        return unit

    # ---------------------------
    # Vector arithmetic over QQ
    # ---------------------------
    def basis(self, j: int) -> Vector:
        return [QQ.one if k == j else QQ.zero for k in range(self.dim)]

    def mul_vec(self, a: Sequence, b: Sequence) -> Vector:
        out = [QQ.zero] * self.dim
        for j, x in enumerate(a):
            if not x:
                continue
            for k, y in enumerate(b):
                if not y:
                    continue
                for r, c in self._sparse[j][k]:
                    out[r] += x * y * c
        return out

    def power_vec(self, a: Sequence, n: int) -> Vector:
        result = list(self.unit)
        for _ in range(n):
            result = self.mul_vec(result, a)
        return result

    @staticmethod
    def apply_functional(phi: Sequence, a: Sequence):
        total = QQ.zero
        for x, y in zip(phi, a):
            total += x * y
        return total

    def trace(self, a: Sequence):
        """Trace of multiplication by a."""
        total = QQ.zero
        for k in range(self.dim):
            total += self.mul_vec(a, self.basis(k))[k]
        return total

    # ---------------------------
    # Decomposition
    # ---------------------------
    @property
    def decomposition(self) -> LocalDecomposition:
        if self._decomposition is None:
            self._decomposition = decompose(self, self._hints)
        return self._decomposition

    def has_decomposition(self) -> bool:
        try:
            self.decomposition
        except (IdempotentsRequired, InvalidIdempotents):
            return False
        return True

    @property
    def factor_count(self) -> int:
        return self.decomposition.count

    def projection(self, i: int) -> Vector:
        if i == 0:
            return self.pi
        try:
            return self.decomposition.projections[i]
        except (IdempotentsRequired, InvalidIdempotents) as exc:
            raise NoDecomposition(str(exc)) from exc

    def nilpotency_bound(self) -> int:
        return self.decomposition.index_bound

    def local_factor(self, i: int) -> "LocalAlgebra":
        if i not in self._locals:
            self._locals[i] = LocalAlgebra(self, i)
        return self._locals[i]

    # ---------------------------
    # Elements
    # ---------------------------
    def element(self, coords: Sequence, field=None) -> "DElement":
        return DElement(self, coords, field)

    def one(self, ring_one=QQ.one, field=None) -> "DElement":
        return DElement(self, [ring_one * c for c in self.unit], field)

    def zero(self, ring_zero=QQ.zero, field=None) -> "DElement":
        return DElement(self, [ring_zero] * self.dim, field)

    def embed(self, r, field=None) -> "DElement":
        """r * 1 in D(R)."""
        return DElement(self, [r * c for c in self.unit], field)

    def basis_element(self, j: int, ring_one=QQ.one, field=None) -> "DElement":
        coords = [ring_one * 0] * self.dim
        coords[j] = ring_one
        return DElement(self, coords, field)

    # ---------------------------
    # Rendering
    # ---------------------------
    def symbol(self, j: int) -> str:
        """Text of basis element j; empty for e0 when it is the unit."""
        if j == 0 and self.unit == self.basis(0):
            return ""
        if self.dim == 2 and j == 1:
            return "e"
        return f"e{j}"

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self.table == other.table and self.pi == other.pi

    def __hash__(self):
        return hash((self.dim, tuple(tuple(tuple(v) for v in row) for row in self.table)))

    def __repr__(self):
        return f"FiniteAlgebra({self.name}, dim={self.dim})"

    def describe(self) -> List[str]:
        lines = [f"algebra {self.name}: dimension {self.dim}"]
        dec = self.decomposition
        for i in range(dec.count):
            lines.append(f"  factor {i}: radical dimension {len(dec.radicals[i])}, "
                         f"{len(dec.generators[i])} nilpotent generators, index {dec.nilpotency[i]}")
        return lines


# ---------------------------
# Product pieces
# ---------------------------
_PIECE = re.compile(r"^\s*local\s*\(\s*d\s*=\s*(\d+)\s*(?:,\s*q\s*=\s*(\d+)\s*)?\)\s*$")


def _parse_piece(piece) -> Tuple[int, int]:
    if isinstance(piece, (tuple, list)):
        d, q = piece
        return int(d), int(q)
    if isinstance(piece, str) and piece.strip() == "point":
        return 1, 1
    match = _PIECE.match(str(piece))
    if not match:
        raise InvalidAlgebra(f"cannot read algebra piece {piece!r}")
    d, q = int(match.group(1)), int(match.group(2) or 1)
    if d < 1 or q < 1:
        raise InvalidAlgebra(f"piece {piece!r} needs d >= 1 and q >= 1")
    return d, q


def _piece_text(d: int, q: int) -> str:
    if d == 1:
        return "point"
    return f"local(d={d})" if q == 1 else f"local(d={d}, q={q})"


def _monomials(q: int, degree: int) -> List[Tuple[int, ...]]:
    out = [e for e in product(range(degree + 1), repeat=q) if sum(e) == degree]
    return sorted(out, reverse=True)


# ---------------------------
# Decomposition from hints
# ---------------------------
def _span_power(algebra: FiniteAlgebra, space: List[Vector], base: List[Vector]) -> List[Vector]:
    """A basis of the span of products space*base."""
    vectors = [algebra.mul_vec(a, b) for a in space for b in base]
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    reduced, pivots = linalg.rref(vectors, algebra.dim, QQ)
    return [reduced[r] for r in range(len(pivots))]


def _local_data(algebra: FiniteAlgebra, u: Vector, proj: Vector):
    # radical of the factor: kernel of pi_i restricted to B*u
    factor = [algebra.mul_vec(algebra.basis(k), u) for k in range(algebra.dim)]
    reduced, pivots = linalg.rref([v for v in factor if any(v)] or [[QQ.zero] * algebra.dim], algebra.dim, QQ)
    span = [reduced[r] for r in range(len(pivots))]
    rad = []
    for v in span:
        w = _vec_add(v, _vec_scale(u, -algebra.apply_functional(proj, v)))
        if any(w) and not linalg.in_span(w, rad, QQ):
            rad.append(w)
    square = _span_power(algebra, rad, rad)
    gens = []
    for v in rad:
        if not linalg.in_span(v, square + gens, QQ):
            gens.append(v)
    index, power = 1, rad
    while power:
        index += 1
        power = _span_power(algebra, power, rad)
        if index > algebra.dim + 1:
            raise InvalidIdempotents("radical of a factor is not nilpotent")
    return rad, gens, index


def decompose(algebra: FiniteAlgebra, hints: Optional[Sequence[Sequence]] = None) -> LocalDecomposition:
    """
    Validate an idempotent system and compute per-factor data.

    Without hints the algebra must be local (pi's kernel nilpotent).

    Raises:
        IdempotentsRequired: no hints and the algebra is not local
        InvalidIdempotents: the hints are not a complete orthogonal system of local factors
    """
    if not hints:
        hints = [algebra.unit]
        local_only = True
    else:
        local_only = False
        hints = [[to_qq(c) for c in u] for u in hints]
    zero = [QQ.zero] * algebra.dim
    for a, u in enumerate(hints):
        if algebra.mul_vec(u, u) != u:
            raise InvalidIdempotents(f"u{a} is not idempotent")
        for b in range(a + 1, len(hints)):
            if algebra.mul_vec(u, hints[b]) != zero:
                raise InvalidIdempotents(f"u{a} * u{b} != 0")
    total = zero
    for u in hints:
        total = _vec_add(total, u)
    if total != algebra.unit:
        raise InvalidIdempotents("idempotents do not sum to 1")
    # pi_i(x) = tr(x u_i) / tr(u_i) on a local factor with residue field QQ
    projections = []
    for u in hints:
        size = algebra.trace(u)
        projections.append([algebra.trace(algebra.mul_vec(algebra.basis(j), u)) / size for j in range(algebra.dim)])
    for i, proj in enumerate(projections):
        for j, k in product(range(algebra.dim), repeat=2):
            lhs = algebra.apply_functional(proj, algebra.mul_vec(algebra.basis(j), algebra.basis(k)))
            if lhs != proj[j] * proj[k]:
                if local_only:
                    raise IdempotentsRequired("algebra is not local; supply idempotent hints")
                raise InvalidIdempotents(f"factor {i} is not local with residue field QQ")
    order = sorted(range(len(hints)), key=lambda i: projections[i] != algebra.pi)
    if projections[order[0]] != algebra.pi:
        raise InvalidIdempotents("no factor projection agrees with pi")
    hints = [hints[i] for i in order]
    projections = [projections[i] for i in order]
    radicals, generators, nilpotency = [], [], []
    for u, proj in zip(hints, projections):
        try:
            rad, gens, index = _local_data(algebra, u, proj)
        except InvalidIdempotents:
            if local_only:
                raise IdempotentsRequired("algebra is not local; supply idempotent hints")
            raise
        radicals.append(rad)
        generators.append(gens)
        nilpotency.append(index)
    dec = LocalDecomposition(idempotents=hints, projections=projections, radicals=radicals,
                             generators=generators, nilpotency=nilpotency)
    verify_jacobson(algebra, dec)
    logger.debug("decomposed %s into %d local factors", algebra.name, dec.count)
    return dec


def jacobson_radical(algebra: FiniteAlgebra) -> List[Vector]:
    """Nullspace of the trace form (characteristic zero)."""
    rows = [[algebra.trace(algebra.mul_vec(algebra.basis(j), algebra.basis(k))) for k in range(algebra.dim)]
            for j in range(algebra.dim)]
    return linalg.nullspace(rows, algebra.dim, QQ)


def verify_jacobson(algebra: FiniteAlgebra, dec: LocalDecomposition) -> None:
    """The Jacobson radical equals the sum of the factors' maximal ideals."""
    jac = jacobson_radical(algebra)
    radicals = [v for rad in dec.radicals for v in rad]
    if len(jac) != len(radicals) or not all(linalg.in_span(v, jac, QQ) for v in radicals):
        raise InvalidIdempotents("Jacobson radical differs from the product of the maximal ideals")


# ---------------------------
# Elements of D(R)
# ---------------------------
class DElement:
    """
    sum_j a_j e_j in D(R) = B (x) R.

    ``field`` is the coefficient field used to differentiate field-valued
    coordinates; coordinates with their own ``derive`` (differential
    polynomials, nested elements) do not need it.
    """

    __slots__ = ("algebra", "coords", "field")

    def __init__(self, algebra: FiniteAlgebra, coords: Sequence, field=None):
        if len(coords) != algebra.dim:
            raise AlgebraMismatch(f"expected {algebra.dim} coordinates, got {len(coords)}")
        self.algebra = algebra
        self.coords = tuple(coords)
        self.field = field

    def _new(self, coords) -> "DElement":
        return DElement(self.algebra, coords, self.field)

    def _check(self, other: "DElement"):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra!r} vs {other.algebra!r}")

    def _lift(self, other):
        if isinstance(other, DElement):
            self._check(other)
            return other
        return self.algebra.embed(other, self.field)

    def __add__(self, other):
        other = self._lift(other)
        return self._new([_add(a, b) for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return self._new([-a for a in self.coords])

    def __sub__(self, other):
        other = self._lift(other)
        return self._new([_add(a, -b) for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, DElement):
            return self._new([_mul(a, other) for a in self.coords])
        self._check(other)
        zero = self.coords[0] * 0
        out = [zero] * self.algebra.dim
        sparse = self.algebra._sparse
        for j, a in enumerate(self.coords):
            if not a:
                continue
            for k, b in enumerate(other.coords):
                if not b:
                    continue
                ab = _mul(a, b)
                for r, c in sparse[j][k]:
                    out[r] = _add(out[r], ab * c)
        return self._new(out)

    def __rmul__(self, other):
        return self._new([_mul(other, a) for a in self.coords])

    def __truediv__(self, other):
        if isinstance(other, DElement):
            return self * other.invert()
        return self._new([a / other for a in self.coords])

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = self.algebra.one(self.coords[0] * 0 + 1, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, DElement):
            try:
                other = self.algebra.embed(other, self.field)
            except TypeError:
                return False
        return self.algebra == other.algebra and all(a == b for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(bool(a) for a in self.coords)

    def __repr__(self):
        return f"DElement({self.to_text()!r})"

    # ---------------------------
    # Operations
    # ---------------------------
    def map(self, fn: Callable) -> "DElement":
        return self._new([fn(a) for a in self.coords])

    def apply_delta(self, j: int) -> "DElement":
        """delta_j coordinatewise; the basis consists of constants."""
        return self._new([_derive(j, a, self.field) for a in self.coords])

    def residue(self, i: int = 0):
        """Image under the i-th residue map pi_i."""
        proj = self.algebra.projection(i)
        total = self.coords[0] * 0
        for a, c in zip(self.coords, proj):
            if c:
                total = _add(total, a * c)
        return total

    def residues(self) -> List:
        return [self.residue(i) for i in range(self.algebra.factor_count)]

    def component(self, i: int) -> "DElement":
        """The part a * u_i in the i-th local factor."""
        u = self.algebra.decomposition.idempotents[i]
        return self * DElement(self.algebra, [self.coords[0] * 0 + c for c in u], self.field)

    def invert(self) -> "DElement":
        """
        Inverse via a geometric series in each local factor.

        Raises:
            NotAUnit: some residue vanishes
        """
        dec = self.algebra.decomposition
        zero = self.coords[0] * 0
        one = zero + 1
        total = self.algebra.zero(zero, self.field)
        for i in range(dec.count):
            r = self.residue(i)
            if not r:
                raise NotAUnit(i)
            u = DElement(self.algebra, [one * c for c in dec.idempotents[i]], self.field)
            part = self * u
            q = (part - u * r) * (one / r) * -1
            term, acc = u, u
            for _ in range(dec.nilpotency[i] - 1):
                term = term * q
                acc = acc + term
            total = total + acc * (one / r)
        return total

    def is_unit(self) -> bool:
        return all(self.residues())

    def to_text(self, render: Optional[Callable] = None) -> str:
        """Render as sum of coordinate * basis symbol."""
        render = render or _render_coordinate
        out = []
        for j, a in enumerate(self.coords):
            if not a:
                continue
            sym = self.algebra.symbol(j)
            text = render(a, self.field)
            if not sym:
                piece = text
            elif text == "1":
                piece = sym
            elif text == "-1":
                piece = "-" + sym
            elif _is_atomic(text):
                piece = f"{text}*{sym}"
            else:
                piece = f"({text})*{sym}"
            out.append(piece)
        if not out:
            return "0"
        text = out[0]
        for piece in out[1:]:
            text += " - " + piece[1:] if piece.startswith("-") else " + " + piece
        return text


def _is_atomic(text: str) -> bool:
    """True when the text is a single term (no top-level + or -)."""
    depth = 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and k > 0:
            return False
    return True


def _richer(x, y) -> bool:
    """True when x lives in a larger ring than y (polynomials over field elements)."""
    return hasattr(x, "terms") and not hasattr(y, "terms")


def _add(x, y):
    return y + x if _richer(y, x) else x + y


def _mul(x, y):
    return y * x if _richer(y, x) else x * y


def _derive(j: int, a, field):
    if hasattr(a, "derive"):
        return a.derive(j)
    if field is None:
        return a * 0
    return field.derive(j, a)


def _render_coordinate(a, field) -> str:
    if hasattr(a, "to_text"):
        return a.to_text()
    if field is not None:
        return field.to_text(a)
    return rational_text(QQ.convert(a))


# ---------------------------
# Local factors in a filtration-adapted basis
# ---------------------------
class LocalAlgebra(FiniteAlgebra):
    """
    The local factor B_i = B u_i, rebased so that the basis is

        u_i, then monomials of degree 1 in the nilpotent generators, then
        degree 2, ...

    ``levels[k]`` is the filtration level of basis element k; the elements
    of level >= L span m^L. ``project`` maps B-coordinates onto B_i and
    ``include`` maps back.
    """

    def __init__(self, parent: FiniteAlgebra, i: int):
        dec = parent.decomposition
        u = dec.idempotents[i]
        gens = dec.generators[i]
        nu = dec.nilpotency[i]
        basis, levels, words = [u], [0], [()]
        for level in range(1, nu):
            deeper = _power_basis(parent, gens, u, level + 1, nu)
            chosen: List[Vector] = []
            for word in combinations_with_replacement(range(len(gens)), level):
                vec = _word_vector(parent, gens, u, word)
                if any(vec) and not linalg.in_span(vec, deeper + chosen, QQ):
                    chosen.append(vec)
                    basis.append(vec)
                    levels.append(level)
                    words.append(word)
        n = len(basis)
        self.parent = parent
        self.factor = i
        self.inclusion = basis
        self.words = words
        table = [[self._coordinates_of(parent.mul_vec(basis[a], basis[b]), basis) for b in range(n)]
                 for a in range(n)]
        unit = [QQ.one] + [QQ.zero] * (n - 1)
        unit_vectors = [[QQ.one if k == j else QQ.zero for k in range(n)] for j in range(n)]
        local_dec = LocalDecomposition(
            idempotents=[unit], projections=[list(unit)], radicals=[unit_vectors[1:]],
            generators=[[unit_vectors[k] for k, lv in enumerate(levels) if lv == 1]], nilpotency=[nu])
        super().__init__(table, name=f"{parent.name}[{i}]", decomposition=local_dec)
        self.levels = levels
        self.nu = nu

    @staticmethod
    def _coordinates_of(vec: Vector, basis: List[Vector]) -> Vector:
        n = len(basis)
        dim = len(vec)
        rows = [[basis[k][r] for k in range(n)] for r in range(dim)]
        sol = linalg.solve(rows, vec, n, QQ)
        if sol is None:
            raise InvalidAlgebra("product leaves the local factor")
        return sol

    def project(self, element: DElement) -> DElement:
        """Coordinates of element * u_i in the adapted basis."""
        part = element.component(self.factor)
        n = self.dim
        dim = self.parent.dim
        rows = [[self.inclusion[k][r] for k in range(n)] for r in range(dim)]
        # the adapted basis has full column rank; pick independent rows once
        if not hasattr(self, "_left"):
            self._left = _left_inverse(rows, n)
        coords = []
        zero = element.coords[0] * 0
        for k in range(n):
            total = zero
            for r, c in enumerate(self._left[k]):
                if c:
                    total = _add(total, part.coords[r] * c)
            coords.append(total)
        return DElement(self, coords, element.field)

    def include(self, element: DElement) -> DElement:
        zero = element.coords[0] * 0
        coords = [zero] * self.parent.dim
        for k, a in enumerate(element.coords):
            if not a:
                continue
            for r, c in enumerate(self.inclusion[k]):
                if c:
                    coords[r] = _add(coords[r], a * c)
        return DElement(self.parent, coords, element.field)

    def level_indices(self, level: int) -> List[int]:
        return [k for k, lv in enumerate(self.levels) if lv == level]

    def symbol(self, j: int) -> str:
        if j == 0:
            return ""
        k = _single_support(self.inclusion[j])
        return self.parent.symbol(k) if k is not None else f"e{j}"


def _single_support(vec: Vector) -> Optional[int]:
    support = [k for k, c in enumerate(vec) if c]
    if len(support) == 1 and vec[support[0]] == 1:
        return support[0]
    return None


def _left_inverse(rows: List[List], n: int) -> List[List]:
    """Rows L (n x dim) with L*A = I for a full column rank A (dim x n)."""
    dim = len(rows)
    chosen = []
    for r in range(dim):
        if linalg.rank([rows[c] for c in chosen] + [rows[r]], n, QQ) > len(chosen):
            chosen.append(r)
        if len(chosen) == n:
            break
    inv = linalg.inverse([rows[r] for r in chosen], QQ) if n else []
    left = [[QQ.zero] * dim for _ in range(n)]
    for k in range(n):
        for idx, r in enumerate(chosen):
            left[k][r] = inv[k][idx]
    return left


def _word_vector(parent: FiniteAlgebra, gens: List[Vector], u: Vector, word: Tuple[int, ...]) -> Vector:
    vec = u
    for g in word:
        vec = parent.mul_vec(vec, gens[g])
    return vec


def _power_basis(parent: FiniteAlgebra, gens: List[Vector], u: Vector, level: int, nu: int) -> List[Vector]:
    """Basis of m^level: span of all products of at least ``level`` generators."""
    out: List[Vector] = []
    for deg in range(level, nu):
        for word in combinations_with_replacement(range(len(gens)), deg):
            vec = _word_vector(parent, gens, u, word)
            if any(vec) and not linalg.in_span(vec, out, QQ):
                out.append(vec)
    return out


# ---------------------------
# Operation-style helpers
# ---------------------------
def multiply(a: DElement, b: DElement) -> DElement:
    return a * b


def apply_delta(j: int, a: DElement) -> DElement:
    return a.apply_delta(j)


def residue(i: int, a: DElement):
    return a.residue(i)


def invert(a: DElement) -> DElement:
    return a.invert()
