"""
Tests for the polynomial text grammar and the canonical rendering.
"""

import random

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import AlgIndet, DiffPoly, Var
from ddh.errors import PolySyntaxError, UnknownSymbol
from ddh.finitealg import DElement, FiniteAlgebra
from ddh.parser import parse_element, parse_point, parse_poly, parse_set, render, round_trip

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
F2 = CoefficientField(2, RATIONAL_FUNCTIONS, 2)
QQF = CoefficientField(1)
D = FiniteAlgebra.dual_numbers()
t1 = F1.gen(1)
x = DiffPoly.variable(F1, 1)
dx = x.derive(1)


def test_parse_examples():
    assert parse_poly("x1*d1 x1 - t1", F1) == x * dx - t1
    assert parse_poly("d1^2 x1", F1) == dx.derive(1)
    assert parse_poly("x2_1", F1) == DiffPoly.variable(F1, 2, 1)
    assert parse_poly("(x1 + 1)^2", F1) == x ** 2 + x * 2 + 1
    assert parse_poly("x1/2 - -3", F1) == x * F1.from_rational(1, 2) + 3
    assert parse_poly("x1/(t1 + 1)", F1) == x / (t1 + 1)
    u = DiffPoly.variable(F2, 1)
    assert parse_poly("d1 d2 x1", F2) == u.derive(1).derive(2)
    assert parse_poly("3/4", QQF) == DiffPoly.constant(QQF, QQF.from_rational(3, 4))


def test_parse_over_an_algebra():
    value = parse_poly("x1*d1 x1 - t1 - e", F1, D)
    assert isinstance(value, DElement)
    assert value.coords == (x * dx - t1, DiffPoly.constant(F1, -1))
    assert parse_poly("x1", F1, D) == D.embed(x, F1)
    assert parse_poly("e/t1", F1, D).coords[1] == DiffPoly.constant(F1, F1.one / t1)


def test_syntax_errors_carry_positions():
    with pytest.raises(PolySyntaxError) as err:
        parse_poly("x1 x2", F1)
    assert (err.value.line, err.value.column) == (1, 4)
    with pytest.raises(PolySyntaxError) as err:
        parse_poly("x1 +", F1)
    assert err.value.column == 5
    with pytest.raises(PolySyntaxError):
        parse_poly("x1^x1", F1)
    with pytest.raises(PolySyntaxError):
        parse_poly("x1/x2", F1)
    with pytest.raises(PolySyntaxError):
        parse_poly("(x1 + e)/e", F1, D)
    with pytest.raises(PolySyntaxError) as err:
        parse_poly("x1 $ 2", F1)
    assert err.value.column == 4
    with pytest.raises(PolySyntaxError):
        parse_poly("", F1)
    with pytest.raises(PolySyntaxError):
        parse_poly("(x1 + 1", F1)


def test_unknown_symbols():
    for text in ["y1", "t2", "e", "d2 x1", "x0"]:
        with pytest.raises(UnknownSymbol):
            parse_poly(text, F1)
    with pytest.raises(UnknownSymbol):
        parse_poly("e2", F1, D)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        parse_poly("x1/0", F1)
    with pytest.raises(ZeroDivisionError):
        parse_poly("x1/(t1 - t1)", F1)


def test_parse_element_and_point():
    assert parse_element("1/2 + t1", F1) == t1 + F1.from_rational(1, 2)
    with pytest.raises(PolySyntaxError):
        parse_element("x1", F1)
    assert parse_point("x1 = t1, x2 = 1/2", F1) == {Var(1): t1, Var(2): F1.from_rational(1, 2)}
    assert parse_point("t1^2", F1) == {Var(1): t1 ** 2}
    with pytest.raises(PolySyntaxError):
        parse_point("d1 x1 = 2", F1)
    with pytest.raises(PolySyntaxError):
        parse_point("1, 2", F1)


def test_parse_set_skips_blank_lines():
    assert parse_set(["x1", "  ", "d1 x1 - 1"], F1) == [x, dx - 1]


def test_render_examples():
    assert render(x * dx - t1) == "d1 x1*x1 - t1"
    assert round_trip("x1 + e*t1", F1, D) == "x1 + t1*e"
    assert round_trip("-(t1 + 1)/(t1^2 + 1)*x1", F1) == "(-t1 - 1)/(t1^2 + 1)*x1"


def _random_coefficient(rng):
    t1, t2 = F2.gen(1), F2.gen(2)

    def poly():
        total = F2.convert(rng.randint(-3, 3))
        for _ in range(rng.randint(0, 2)):
            total = total + F2.from_rational(rng.choice([-3, -1, 1, 2, 5]), rng.choice([1, 1, 2, 3])) * \
                rng.choice([t1, t2, t1 * t2, t1 ** 2, t2 ** 3])
        return total

    top = poly()
    if rng.random() < 0.4:
        bottom = poly()
        if bottom:
            return top / bottom
    return top


def _random_indet(rng):
    theta = (rng.randint(0, 2), rng.randint(0, 1))
    copy = rng.choice([None, None, 0, 1])
    return DiffPoly.from_indet(F2, AlgIndet(Var(rng.randint(1, 3), copy), theta))


def test_round_trip_randomized():
    rng = random.Random(42)
    for _ in range(500):
        f = DiffPoly.constant(F2, _random_coefficient(rng))
        for _ in range(rng.randint(0, 3)):
            term = DiffPoly.constant(F2, _random_coefficient(rng))
            for _ in range(rng.randint(1, 3)):
                term = term * _random_indet(rng)
            f = f + term
        text = render(f)
        assert parse_poly(text, F2) == f, text
        assert round_trip(text, F2) == text
