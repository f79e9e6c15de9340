"""
Tests for differential polynomials and the canonical ranking.
"""

import random
from itertools import combinations

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import (AlgIndet, DiffPoly, Var, indeterminates_up_to, jets_for, rank_compare,
                          theta_apply)
from ddh.errors import ConstantPolynomial, DerivationIndexError, MissingIndeterminate

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
F2 = CoefficientField(2, RATIONAL_FUNCTIONS, 2)


def u(i, *theta):
    return AlgIndet(Var(i), tuple(theta))


def test_rank_compare_examples():
    assert rank_compare(u(1, 0, 1), u(2, 1, 0)) == -1
    assert rank_compare(u(1, 1, 0), u(1, 0, 1)) == -1
    assert rank_compare(u(1, 1, 0), u(1, 1, 0)) == 0
    assert u(1, 0, 1) < u(2, 1, 0)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_ranking_laws_exhaustive(n, m):
    indets = indeterminates_up_to(n, m, 3)
    keys = [w.key for w in indets]
    assert len(set(keys)) == len(keys)
    violations = 0
    for w in indets:
        for j in range(1, m + 1):
            if not w < w.derive(j):
                violations += 1
    for a, b in combinations(indets, 2):
        lo, hi = (a, b) if a < b else (b, a)
        if rank_compare(lo, hi) != -1 or rank_compare(hi, lo) != 1:
            violations += 1
        for j in range(1, m + 1):
            if not lo.derive(j) < hi.derive(j):
                violations += 1
    assert violations == 0


def test_apply_derivation_leibniz():
    x = DiffPoly.variable(F2, 1)
    d1x, d2x = x.derive(1), x.derive(2)
    assert (x * d2x).derive(1) == d1x * d2x + x * d2x.derive(1)
    t1 = F2.gen(1)
    assert (x * t1).derive(1) == x + d1x * t1
    assert x.derive(1).derive(2) == x.derive(2).derive(1)
    with pytest.raises(DerivationIndexError):
        x.derive(3)


def test_leader_degree_rank():
    x = DiffPoly.variable(F1, 1)
    dx = x.derive(1)
    f = dx ** 3 + x * dx + 1
    assert f.leader() == u(1, 1)
    assert f.degree() == 3
    assert f.rank() == (u(1, 1), 3)

    x1, x2 = DiffPoly.variable(F2, 1), DiffPoly.variable(F2, 2)
    g = x2 * x1.derive(1) ** 2 + x1.derive(2)
    assert g.rank() == (u(1, 0, 1), 1)

    with pytest.raises(ConstantPolynomial):
        DiffPoly.constant(F1, 5).leader()


def test_separant_and_initial():
    x = DiffPoly.variable(F1, 1)
    dx = x.derive(1)
    f = dx ** 3 + x * dx + 1
    assert f.separant() == dx ** 2 * 3 + x
    assert f.initial() == 1
    g = x * dx ** 2 - 1
    assert g.separant() == x * dx * 2
    assert g.initial() == x
    h = dx - x
    assert h.separant() == 1 and h.initial() == 1


def test_evaluate_with_jets():
    t1 = F1.gen(1)
    x = DiffPoly.variable(F1, 1)
    dx = x.derive(1)
    assert (x * dx - t1).evaluate({Var(1): t1}) == 0
    assert dx.evaluate({Var(1): F1.convert(7)}) == 0
    assert (x ** 2).evaluate({Var(1): t1 + 1}) == t1 ** 2 + 2 * t1 + 1
    with pytest.raises(MissingIndeterminate):
        (x * DiffPoly.variable(F1, 2)).evaluate({Var(1): t1})


def test_evaluate_with_direct_values():
    x = DiffPoly.variable(F1, 1)
    f = x.derive(1) * x
    assert f.evaluate({u(1, 1): F1.convert(2), u(1, 0): F1.convert(3)}) == 6
    assert jets_for(F1, {Var(1): F1.gen(1) ** 2}, [u(1, 2)]) == {u(1, 2): F1.convert(2)}


def test_theta_apply():
    x = DiffPoly.variable(F2, 1)
    assert theta_apply((2, 0), x) == x.derive(1).derive(1)
    assert theta_apply((1, 1), x) == x.derive(2).derive(1)
    f = x * x.derive(1) + F2.gen(2)
    assert theta_apply((0, 0), f) == f


def test_canonical_rendering():
    x = DiffPoly.variable(F1, 1)
    dx = x.derive(1)
    f = dx ** 3 + x * dx + 1
    assert f.to_text() == "(d1 x1)^3 + d1 x1*x1 + 1"
    t1 = F1.gen(1)
    g = x * (t1 / 2) - dx.derive(1) * 3
    assert g.to_text() == "-3*d1^2 x1 + 1/2*t1*x1"
    assert DiffPoly.zero(F1).to_text() == "0"
    assert DiffPoly.variable(F1, 2, 1).to_text() == "x2_1"


def test_partial_substitute_and_variables():
    x1, x2 = DiffPoly.variable(F2, 1), DiffPoly.variable(F2, 2)
    f = x1 ** 2 * x2 + x2.derive(1)
    assert f.partial(u(1, 0, 0)) == x1 * x2 * 2
    assert f.variables() == [Var(1), Var(2)]
    assert f.order() == 1
    assert f.coefficient_of(u(1, 0, 0), 2) == x2
    assert f.substitute({u(2, 1, 0): x1}) == x1 ** 2 * x2 + x1


def _random_poly(rng, field=F2):
    f = DiffPoly.constant(field, field.convert(rng.randint(-2, 2)))
    for _ in range(rng.randint(1, 3)):
        c = field.convert(rng.choice([-3, -1, 1, 2])) * field.gen(rng.randint(1, field.s)) ** rng.randint(0, 2)
        term = DiffPoly.constant(field, c)
        for _ in range(rng.randint(1, 3)):
            theta = (rng.randint(0, 2), rng.randint(0, 1))
            term = term * DiffPoly.from_indet(field, AlgIndet(Var(rng.randint(1, 2)), theta))
        f = f + term
    return f


def _random_value(rng, field=F2):
    t1, t2 = field.gen(1), field.gen(2)
    return field.convert(rng.randint(-3, 3)) + rng.choice([1, 2, -1]) * t1 ** rng.randint(0, 2) * t2 ** rng.randint(0, 2)


def test_separant_and_initial_rank_below_randomized():
    rng = random.Random(42)
    checked = 0
    while checked < 40:
        f = _random_poly(rng)
        if f.is_constant():
            continue
        checked += 1
        assert f.separant().rank_key() < f.rank_key(), f.to_text()
        assert f.initial().rank_key() < f.rank_key(), f.to_text()


def test_derivative_leader_and_separant_randomized():
    rng = random.Random(42)
    checked = 0
    while checked < 40:
        f = _random_poly(rng)
        if f.is_constant():
            continue
        checked += 1
        for j in (1, 2):
            g = f.derive(j)
            assert g.leader() == f.leader().derive(j), f.to_text()
            assert g.degree() == 1
            assert g.separant() == f.separant()
            assert g.initial() == f.separant()


def test_evaluate_is_a_differential_homomorphism_randomized():
    rng = random.Random(42)
    for _ in range(40):
        f, g = _random_poly(rng), _random_poly(rng)
        point = {Var(1): _random_value(rng), Var(2): _random_value(rng)}
        fa, ga = f.evaluate(point), g.evaluate(point)
        assert (f + g).evaluate(point) == fa + ga
        assert (f * g).evaluate(point) == fa * ga
        assert f.derive(1).evaluate(point) == F2.derive(1, fa)
