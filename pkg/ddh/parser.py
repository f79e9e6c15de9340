"""
Text grammar for differential polynomials.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' nat)?
    atom   := nat | 't' nat | 'e' nat? | derivs? 'x' nat ('_' nat)? | '(' expr ')'
    derivs := ('d' nat ('^' nat)?)+          each followed by whitespace

Divisors must be free of indeterminates and basis symbols. ``e`` and
``e<j>`` are basis elements of the algebra and are only accepted when one is
given; the result is then a ``DElement`` with polynomial coordinates.
Multiplication is never implicit.
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

from .coeffield import CoefficientField, FieldElem
from .diffpoly import AlgIndet, DiffPoly, Var
from .errors import PolySyntaxError, UnknownSymbol
from .finitealg import DElement, FiniteAlgebra

logger = logging.getLogger(__name__)

Value = Union[DiffPoly, DElement]

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<deriv>d(?P<dj>\d+)(?:\^(?P<de>\d+))?(?=\s))
  | (?P<var>x(?P<xi>\d+)(?:_(?P<xc>\d+))?(?![\w]))
  | (?P<gen>t(?P<tj>\d+)(?![\w]))
  | (?P<basis>e(?P<ej>\d+)?(?![\w]))
  | (?P<num>\d+)
  | (?P<op>[-+*/^()=,])
  | (?P<word>[A-Za-z_]\w*)
""", re.VERBOSE)

ATOM_START = ["integer", "t<j>", "x<i>", "d<j>", "("]


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    groups: Dict[str, Optional[str]]


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            line, col = _position(text, pos)
            raise PolySyntaxError(text, line, col, ATOM_START + ["operator"])
        kind = _kind_of(match)
        if kind == "word":
            raise UnknownSymbol(match.group(0))
        if kind != "space":
            tokens.append(Token(kind, match.group(0), pos, match.groupdict()))
        pos = match.end()
    return tokens


def _kind_of(match) -> str:
    for kind in ("space", "deriv", "var", "gen", "basis", "num", "op"):
        if match.group(kind) is not None:
            return kind
    return "word"


def _position(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class PolyParser:
    """
    Recursive descent over the token list.

    Args:
        field: coefficient field; fixes m and the generators t1..ts
        algebra: when given, basis symbols are accepted and results are DElements
    """

    def __init__(self, field: CoefficientField, algebra: Optional[FiniteAlgebra] = None):
        self.field = field
        self.algebra = algebra

    def parse(self, text: str) -> Value:
        self.text = text
        self.tokens = tokenize(text)
        self.k = 0
        if not self.tokens:
            raise PolySyntaxError(text, 1, 1, ATOM_START)
        value = self.expr()
        if self.k < len(self.tokens):
            self.fail(["+", "-", "*", "/", "^", "end of input"])
        if self.algebra is not None:
            value = self._as_element(value)
        return value

    # ---------------------------
    # Helpers
    # ---------------------------
    def peek(self) -> Optional[Token]:
        return self.tokens[self.k] if self.k < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def accept(self, op: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == op:
            self.k += 1
            return True
        return False

    def fail(self, expected: Sequence[str]):
        self._fail_at(self.peek(), expected)

    def _as_element(self, v: Value) -> DElement:
        return v if isinstance(v, DElement) else self.algebra.embed(v, self.field)

    def _pair(self, a: Value, b: Value):
        if isinstance(a, DElement) or isinstance(b, DElement):
            return self._as_element(a), self._as_element(b)
        return a, b

    # ---------------------------
    # Grammar
    # ---------------------------
    def expr(self) -> Value:
        value = self.term()
        while True:
            if self.accept("+"):
                a, b = self._pair(value, self.term())
                value = a + b
            elif self.accept("-"):
                a, b = self._pair(value, self.term())
                value = a - b
            else:
                return value

    def term(self) -> Value:
        value = self.factor()
        while True:
            if self.accept("*"):
                a, b = self._pair(value, self.factor())
                value = a * b
            elif self.accept("/"):
                tok = self.peek()
                divisor = self.factor()
                value = value / self._constant(divisor, tok)
            else:
                tok = self.peek()
                if tok is not None and (tok.kind != "op" or tok.text == "("):
                    self.fail(["*", "/", "+", "-", "^", ")", "end of input"])
                return value

    def _constant(self, v: Value, tok: Token) -> FieldElem:
        if isinstance(v, DElement):
            base = v.residue(0)
            if v != self.algebra.embed(base, self.field):
                self._fail_at(tok, ["a divisor without x or e"])
            v = base
        if not v.is_constant():
            self._fail_at(tok, ["a divisor without x or e"])
        c = v.constant_value()
        if not c:
            raise ZeroDivisionError(f"division by zero in {self.text!r}")
        return c

    def _fail_at(self, tok: Optional[Token], expected: Sequence[str]):
        pos = tok.pos if tok is not None else len(self.text)
        line, col = _position(self.text, pos)
        raise PolySyntaxError(self.text, line, col, list(expected))

    def factor(self) -> Value:
        if self.accept("-"):
            return -self.factor()
        value = self.atom()
        if self.accept("^"):
            tok = self.peek()
            if tok is None or tok.kind != "num":
                self.fail(["natural exponent"])
            value = value ** int(self.take().text)
        return value

    def atom(self) -> Value:
        tok = self.peek()
        if tok is None:
            self.fail(ATOM_START)
        if tok.kind == "op" and tok.text == "(":
            self.take()
            value = self.expr()
            if not self.accept(")"):
                self.fail([")"])
            return value
        if tok.kind == "num":
            self.take()
            return DiffPoly.constant(self.field, int(tok.text))
        if tok.kind == "gen":
            self.take()
            j = int(tok.groups["tj"])
            if not 1 <= j <= self.field.s:
                raise UnknownSymbol(tok.text)
            return DiffPoly.constant(self.field, self.field.gen(j))
        if tok.kind == "basis":
            self.take()
            return self._basis(tok)
        if tok.kind in ("deriv", "var"):
            return self.indet()
        self.fail(ATOM_START)

    def _basis(self, tok: Token) -> DElement:
        if self.algebra is None:
            raise UnknownSymbol(tok.text)
        j = int(tok.groups["ej"]) if tok.groups["ej"] is not None else 1
        if not 0 <= j < self.algebra.dim:
            raise UnknownSymbol(tok.text)
        return self.algebra.basis_element(j, DiffPoly.constant(self.field, 1), self.field)

    def indet(self) -> DiffPoly:
        theta = [0] * self.field.m
        while self.peek() is not None and self.peek().kind == "deriv":
            tok = self.take()
            j = int(tok.groups["dj"])
            if not 1 <= j <= self.field.m:
                raise UnknownSymbol(f"d{j}")
            theta[j - 1] += int(tok.groups["de"] or 1)
        tok = self.peek()
        if tok is None or tok.kind != "var":
            self.fail(["x<i>"])
        self.take()
        index = int(tok.groups["xi"])
        if index < 1:
            raise UnknownSymbol(tok.text)
        copy = int(tok.groups["xc"]) if tok.groups["xc"] is not None else None
        return DiffPoly.from_indet(self.field, AlgIndet(Var(index, copy), tuple(theta)))


# ---------------------------
# Entry points
# ---------------------------
def parse_poly(text: str, field: CoefficientField, algebra: Optional[FiniteAlgebra] = None) -> Value:
    """
    Raises:
        PolySyntaxError: with line, column and the expected tokens
        UnknownSymbol: a name outside the field, derivations or algebra
    """
    return PolyParser(field, algebra).parse(text)


def parse_element(text: str, field: CoefficientField) -> FieldElem:
    """A field element: an expression without indeterminates."""
    value = parse_poly(text, field)
    if not value.is_constant():
        raise PolySyntaxError(text, 1, 1, ["an expression without x"])
    return value.constant_value()


def parse_set(lines: Sequence[str], field: CoefficientField,
              algebra: Optional[FiniteAlgebra] = None) -> List[Value]:
    return [parse_poly(line, field, algebra) for line in lines if line.strip()]


def parse_point(text: str, field: CoefficientField) -> Dict[Var, FieldElem]:
    """
    ``x1 = t1, x2 = 1/2``; a bare value is read as the value of x1.

    Values are field elements, so they may not contain commas themselves.
    """
    out: Dict[Var, FieldElem] = {}
    for k, part in enumerate(p for p in text.split(",") if p.strip()):
        if "=" in part:
            name, value = part.split("=", 1)
            var = parse_poly(name, field)
            if len(var.terms) != 1 or var.is_constant():
                raise PolySyntaxError(text, 1, 1, ["x<i> = value"])
            (mono, _), = var.terms.items()
            if len(mono) != 1 or any(mono[0][0].theta):
                raise PolySyntaxError(text, 1, 1, ["x<i> = value"])
            out[mono[0][0].var] = parse_element(value, field)
        else:
            if k:
                raise PolySyntaxError(text, 1, 1, ["x<i> = value"])
            out[Var(1)] = parse_element(part, field)
    return out


def render(value: Value) -> str:
    return value.to_text()


def round_trip(text: str, field: CoefficientField, algebra: Optional[FiniteAlgebra] = None) -> str:
    """render(parse(text)); the identity on canonical renderings."""
    return render(parse_poly(text, field, algebra))
