"""
Tests for autoreduced sets, Ritt-Kolchin reduction certificates and coherence.
"""

import random

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import AlgIndet, DiffPoly, Var
from ddh.dstructure import DStructure
from ddh.errors import HVanishesUnderMap, NotAutoreduced
from ddh.finitealg import DElement, FiniteAlgebra
from ddh.reduction import (check_autoreduced, check_coherent, compare_autoreduced, delta_polynomial,
                           ideal_member, is_reduced, map_coefficients, membership_report, rank_report,
                           ritt_remainder)

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
F2 = CoefficientField(2, RATIONAL_FUNCTIONS, 2)

x = DiffPoly.variable(F1, 1)
dx = x.derive(1)


def _coefficient(rng, field):
    t1, t2 = field.gen(1), field.gen(2)
    return field.convert(rng.choice([-2, -1, 1, 3])) * rng.choice([field.one, t1, t2, t1 + t2, t1 * t2 + 1])


def _random_lambda(rng):
    """One or two elements in separate variables, autoreduced by construction."""
    elements = []
    for index, j in [(1, 1), (2, 2)][: rng.randint(1, 2)]:
        v = DiffPoly.variable(F2, index)
        lead = v.derive(j)
        degree = rng.randint(1, 2)
        g = lead ** degree * _coefficient(rng, F2) + v * _coefficient(rng, F2) + _coefficient(rng, F2)
        if rng.random() < 0.5:
            g = g + lead * v * _coefficient(rng, F2) if degree == 2 else g
        elements.append(g)
    return check_autoreduced(elements)


def _random_poly(rng):
    indets = []
    for index in (1, 2):
        v = DiffPoly.variable(F2, index)
        indets.extend([v, v.derive(1), v.derive(2), v.derive(1).derive(1), v.derive(1).derive(2)])
    f = DiffPoly.constant(F2, rng.randint(-2, 2))
    for _ in range(rng.randint(1, 3)):
        term = DiffPoly.constant(F2, _coefficient(rng, F2))
        for _ in range(rng.randint(1, 2)):
            term = term * rng.choice(indets)
        f = f + term
    return f


def test_check_autoreduced_examples():
    assert len(check_autoreduced([dx - 1])) == 1
    with pytest.raises(NotAutoreduced) as err:
        check_autoreduced([dx - 1, dx.derive(1)])
    assert err.value.indet == "d1^2 x1"

    x1, x2 = DiffPoly.variable(F2, 1), DiffPoly.variable(F2, 2)
    lam = check_autoreduced([x1.derive(1) - x2, x2.derive(2) - x1])
    assert [str(v) for v in lam.leaders] == ["d1 x1", "d2 x2"]


def test_ritt_remainder_examples():
    lam = check_autoreduced([dx - x])
    cert = ritt_remainder(dx.derive(1), lam)
    assert cert.remainder == x
    assert cert.verify()

    assert not ritt_remainder(dx - x, lam).remainder

    cert = ritt_remainder(x * dx ** 2 - 1, check_autoreduced([dx - 1]))
    assert cert.remainder == x - 1
    assert cert.verify()


def test_reduction_certificates_randomized():
    rng = random.Random(42)
    for _ in range(200):
        lam = _random_lambda(rng)
        f = _random_poly(rng)
        cert = ritt_remainder(f, lam)
        assert cert.verify(), (lam.texts(), f.to_text())
        assert is_reduced(cert.remainder, lam)
        assert cert.h_power() >= 0


def test_reduction_is_idempotent_randomized():
    rng = random.Random(42)
    for _ in range(100):
        lam = _random_lambda(rng)
        r = ritt_remainder(_random_poly(rng), lam).remainder
        again = ritt_remainder(r, lam)
        assert again.remainder == r, (lam.texts(), r.to_text())
        assert again.multiplier() == 1
        assert not again.combination


def _witness_value(rng):
    t1, t2 = F2.gen(1), F2.gen(2)
    return F2.convert(rng.randint(-3, 3)) + _coefficient(rng, F2) * rng.choice([t1, t2, t1 ** 2])


def test_remainder_vanishes_on_vstar_randomized():
    rng = random.Random(42)
    checked = 0
    while checked < 50:
        point = {Var(1): _witness_value(rng), Var(2): _witness_value(rng)}
        shifted = [g - DiffPoly.constant(F2, g.evaluate(point)) for g in _random_lambda(rng)]
        lam = check_autoreduced(shifted)
        if not lam.H.evaluate(point):
            continue
        checked += 1
        f = _random_poly(rng)
        f = f - DiffPoly.constant(F2, f.evaluate(point))
        cert = ritt_remainder(f, lam)
        assert not cert.remainder.evaluate(point), (lam.texts(), f.to_text())
        g = _random_poly(rng)
        assert ritt_remainder(g, lam).remainder.evaluate(point) == \
            ritt_remainder(g, lam).multiplier().evaluate(point) * g.evaluate(point)


def test_certificate_report():
    lam = check_autoreduced([dx - x])
    report = ritt_remainder(dx.derive(1), lam).to_report()
    text = report.render()
    assert "remainder = x1" in text
    assert "certificate verified: yes" in text


def test_coherence_ground_truth():
    t1, t2 = F2.gen(1), F2.gen(2)
    x1 = DiffPoly.variable(F2, 1)
    good = check_autoreduced([x1.derive(1) - t2, x1.derive(2) - t1])
    report = check_coherent(good)
    assert report.coherent
    assert report.pairs[0].delta == "0"

    bad = check_autoreduced([x1.derive(1) - t2, x1.derive(2)])
    report = check_coherent(bad)
    assert not report.coherent
    assert report.witness == "-1"
    assert "witness delta-polynomial: -1" in report.render()

    assert check_coherent(check_autoreduced([dx - x])).coherent


def test_delta_polynomial_of_different_variables():
    x1, x2 = DiffPoly.variable(F2, 1), DiffPoly.variable(F2, 2)
    assert delta_polynomial(x1.derive(1), x2.derive(2)) is None
    v, delta = delta_polynomial(x1.derive(1) - F2.gen(2), x1.derive(2) - F2.gen(1))
    assert v == AlgIndet(Var(1), (1, 1))
    assert not delta


def test_ideal_member_examples():
    lam = check_autoreduced([dx - x])
    assert ideal_member(dx.derive(1) - x, lam)
    assert not ideal_member(x, lam)
    assert ideal_member(DiffPoly.zero(F1), lam)
    report = membership_report(x, lam)
    assert not report.member and report.remainder == "x1"


def test_compare_autoreduced_examples():
    a = check_autoreduced([dx - x])
    b = check_autoreduced([dx.derive(1)])
    assert compare_autoreduced(a, b) == -1
    assert compare_autoreduced(a, a) == 0
    x1, x2 = DiffPoly.variable(F1, 1), DiffPoly.variable(F1, 2)
    short = check_autoreduced([x1])
    longer = check_autoreduced([x1, x2.derive(1)])
    assert compare_autoreduced(longer, short) == -1


def _shift(field, k):
    images = [field.gen(1) + k] + [field.gen(j) for j in range(2, field.s + 1)]
    return lambda c: field.apply_homomorphism(c, images, field.one, lambda d: field.one / d)


def test_map_coefficients_examples():
    t1 = F1.gen(1)
    lam = check_autoreduced([dx - t1])
    assert map_coefficients(lam, lambda c: c) == lam
    shifted = map_coefficients(lam, _shift(F1, 1))
    assert shifted[0] == dx - (t1 + 1)
    assert shifted.leaders == lam.leaders
    assert shifted.H == 1

    with pytest.raises(HVanishesUnderMap):
        map_coefficients(check_autoreduced([dx * t1 - 1]),
                         lambda c: F1.apply_homomorphism(c, [F1.zero], F1.one, lambda d: F1.one / d))


def _shift_structure(k):
    algebra = FiniteAlgebra.product(["point", "point"], name="QxQ")
    t1, t2 = F2.gen(1), F2.gen(2)
    return DStructure(algebra, F2, {1: DElement(algebra, [t1, t1 + k], F2),
                                    2: DElement(algebra, [t2, t2], F2)}, name=f"shift{k}")


def test_transport_under_coefficient_maps():
    rng = random.Random(42)
    x1 = DiffPoly.variable(F2, 1)
    integrable = check_autoreduced([x1.derive(1) - F2.gen(2), x1.derive(2) - F2.gen(1)])
    for n in range(50):
        lam = integrable if n % 5 == 0 else _random_lambda(rng)
        k = rng.randint(1, 3)
        if n % 2:
            s = _shift_structure(k)
            phi = lambda c, s=s: s.sigma(1, c)
        else:
            phi = _shift(F2, k)
        h_phi = lam.H.map_coefficients(phi)
        if not h_phi:
            continue
        mapped = map_coefficients(lam, phi)
        assert mapped.leaders == lam.leaders
        assert mapped.H == h_phi
        assert check_coherent(mapped).coherent == check_coherent(lam).coherent


def test_rank_report():
    report = rank_report([dx ** 3 + x * dx + 1, DiffPoly.constant(F1, 5), dx - x])
    text = report.render()
    assert report.entries[0].leader == "d1 x1"
    assert report.entries[0].degree == 3
    assert report.entries[1].leader is None
    assert report.ordering[0] == "5"
    assert "d1 x1" in text
