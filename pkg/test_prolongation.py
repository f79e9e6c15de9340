"""
Tests for coordinate prolongations, nabla and the residue maps on prolonged points.
"""

import random

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import DiffPoly, Var
from ddh.dstructure import MODE_SIGMA, DStructure
from ddh.errors import PointError
from ddh.finitealg import DElement, FiniteAlgebra
from ddh.prolongation import (components, difference_prolongation, from_algebra_point, nabla, pihat,
                              point_text, tau_generators, to_algebra_point)
from ddh.reduction import check_autoreduced

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
D = FiniteAlgebra.dual_numbers()
QxQ = FiniteAlgebra.product(["point", "point"], name="QxQ")
t1 = F1.gen(1)
x = DiffPoly.variable(F1, 1)
dx = x.derive(1)


def taylor():
    return DStructure(D, F1, {1: DElement(D, [t1, F1.one], F1)}, name="taylor")


def shift():
    return DStructure(QxQ, F1, {1: DElement(QxQ, [t1, t1 + 1], F1)}, name="shift")


def xj(j, index=1):
    return DiffPoly.variable(F1, index, j)


def test_components_over_dual_numbers():
    s = taylor()
    assert components(x ** 2, s) == [xj(0) ** 2, xj(0) * xj(1) * 2]
    assert components(x * t1, s) == [xj(0) * t1, xj(0) + xj(1) * t1]
    assert components(DiffPoly.constant(F1, t1 ** 2), s) == [DiffPoly.constant(F1, t1 ** 2),
                                                            DiffPoly.constant(F1, 2 * t1)]


def test_components_over_points():
    comps = components(dx - t1, shift())
    assert comps == [xj(0).derive(1) - t1, xj(1).derive(1) - (t1 + 1)]


def test_components_reject_prolonged_input():
    with pytest.raises(ValueError):
        components(xj(1), taylor())


def test_difference_prolongation():
    s = shift()
    assert difference_prolongation(x * dx - t1, s)
    with pytest.raises(ValueError):
        difference_prolongation(x, taylor())


def test_tau_generators_report():
    lam = check_autoreduced([dx - x])
    system = tau_generators(lam, taylor())
    assert system.generators() == [xj(0).derive(1) - xj(0), xj(1).derive(1) - xj(1)]
    text = system.to_report().render()
    assert "(d1 x1 - x1)^(0) = d1 x1_0 - x1_0" in text
    assert "assumption:" in text


def test_nabla_and_residues():
    s = taylor()
    abar = nabla({Var(1): t1 ** 2}, s)
    assert abar == {Var(1, 0): t1 ** 2, Var(1, 1): 2 * t1}
    assert pihat(0, abar, s) == {Var(1): t1 ** 2}

    b = shift()
    abar = nabla({Var(1): t1 ** 2}, b)
    assert pihat(1, abar, b) == {Var(1): (t1 + 1) ** 2}
    assert point_text(abar, F1) == ["x1_0 = t1^2", "x1_1 = t1^2 + 2*t1 + 1"]


def test_pihat_needs_prolonged_variables():
    s = taylor()
    with pytest.raises(PointError) as err:
        pihat(0, {Var(1): F1.convert(3)}, s)
    assert err.value.var == "x1"
    with pytest.raises(PointError):
        pihat(0, {Var(1, 2): t1}, s)


def test_algebra_point_round_trip():
    s = taylor()
    abar = {Var(1, 0): t1, Var(1, 1): F1.one, Var(2, 0): F1.convert(3)}
    b = to_algebra_point(abar, s)
    assert b[Var(1)] == DElement(D, [t1, F1.one], F1)
    assert b[Var(2)] == DElement(D, [F1.convert(3), F1.zero], F1)
    assert from_algebra_point(b) == {Var(1, 0): t1, Var(1, 1): F1.one,
                                     Var(2, 0): F1.convert(3), Var(2, 1): F1.zero}


def _random_coefficient(rng):
    c = F1.convert(rng.randint(-3, 3)) + F1.convert(rng.choice([-1, 1, 2])) * t1 ** rng.randint(0, 2)
    return c / (t1 + 2) if rng.random() < 0.3 else c


def _random_poly(rng):
    f = DiffPoly.constant(F1, _random_coefficient(rng))
    for _ in range(rng.randint(1, 3)):
        term = DiffPoly.constant(F1, _random_coefficient(rng))
        for _ in range(rng.randint(1, 2)):
            term = term * rng.choice([x, dx, dx.derive(1)])
        f = f + term
    return f


def test_sections_and_transport_randomized():
    rng = random.Random(42)
    structures = [taylor(), shift()]
    for n in range(100):
        s = structures[n % 2]
        f = _random_poly(rng)
        a = _random_coefficient(rng)
        abar = nabla({Var(1): a}, s)
        comps = components(f, s)
        expected = s.e_of(f.evaluate({Var(1): a}))
        for j, comp in enumerate(comps):
            assert comp.evaluate(abar) == expected.coords[j], (f.to_text(), F1.to_text(a))
        assert pihat(0, abar, s) == {Var(1): a}
        if s is structures[1]:
            fs = s.map_poly(f, MODE_SIGMA, 1)
            image = pihat(1, abar, s)
            assert fs.evaluate(image) == s.sigma(1, f.evaluate({Var(1): a}))
