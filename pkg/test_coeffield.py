"""
Tests for the coefficient fields QQ and QQ(t1..ts).
"""

import random
from fractions import Fraction

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField, series_coefficients
from ddh.errors import DerivationIndexError, PoleAtPoint

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
F2 = CoefficientField(2, RATIONAL_FUNCTIONS, 2)
QQF = CoefficientField(2)


def _random_fraction(rng, field):
    def poly():
        total = field.convert(rng.randint(-3, 3))
        for _ in range(rng.randint(1, 3)):
            term = field.convert(rng.choice([-2, -1, 1, 2, 5]))
            for j in range(1, field.s + 1):
                term = term * field.gen(j) ** rng.randint(0, 2)
            total = total + term
        return total

    bottom = poly()
    return poly() / bottom if bottom else poly()


def test_derive_examples():
    t1, t2 = F2.gen(1), F2.gen(2)
    assert F2.derive(1, t1 ** 2) == 2 * t1
    assert F2.derive(2, t1) == 0
    assert F2.derive(1, F2.one / t1) == -F2.one / t1 ** 2


def test_derive_index_out_of_range():
    with pytest.raises(DerivationIndexError):
        F2.derive(3, F2.gen(1))


def test_rationals_have_zero_derivations():
    q = QQF.convert(Fraction(3, 4))
    assert QQF.derive(1, q) == 0
    assert QQF.is_constant(q)


def test_eval_at_point_examples():
    t1 = F1.gen(1)
    assert F1.eval_at_point(t1 ** 2 + 1, [2]) == 5
    with pytest.raises(PoleAtPoint):
        F1.eval_at_point(F1.one / t1, [0])
    t1, t2 = F2.gen(1), F2.gen(2)
    assert F2.eval_at_point((t1 + t2) / (t1 - t2), [3, 1]) == 2


def test_derivations_commute_and_obey_leibniz():
    rng = random.Random(42)
    for _ in range(40):
        a = _random_fraction(rng, F2)
        b = _random_fraction(rng, F2)
        assert F2.derive(1, F2.derive(2, a)) == F2.derive(2, F2.derive(1, a))
        assert F2.derive(1, a * b) == a * F2.derive(1, b) + b * F2.derive(1, a)


def test_to_text_canonical_forms():
    t1, t2 = F2.gen(1), F2.gen(2)
    assert F2.to_text(t1 / t2) == "t1/t2"
    assert F2.to_text((t1 + 1) / (t2 ** 2 + 1)) == "(t1 + 1)/(t2^2 + 1)"
    assert F2.to_text(-t1) == "-t1"
    assert F2.to_text(F2.convert(Fraction(1, 2))) == "1/2"
    assert F2.to_text(F2.zero) == "0"
    assert QQF.to_text(QQF.convert(Fraction(-7, 3))) == "-7/3"


def test_taylor_geometric_series():
    t1 = F1.gen(1)
    series = F1.taylor(F1.one / (1 - t1), [0], 3)
    assert series_coefficients(series) == {(0,): 1, (1,): 1, (2,): 1, (3,): 1}


def test_taylor_pole():
    t1 = F1.gen(1)
    with pytest.raises(PoleAtPoint):
        F1.taylor(F1.one / t1, [0], 2)


def test_convert_and_gen():
    assert F1.convert(3) == 3 * F1.one
    assert F1.from_rational(1, 2) * 2 == F1.one
    with pytest.raises(IndexError):
        F1.gen(2)
    with pytest.raises(ValueError):
        CoefficientField(1, RATIONAL_FUNCTIONS, 0)
