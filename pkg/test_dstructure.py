"""
Tests for D-structures: values of e, sigma maps, coefficientwise application and the law checks.
"""

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import DiffPoly
from ddh.dstructure import MODE_COMPONENT, MODE_E, MODE_SIGMA, DStructure, check_structure
from ddh.errors import DenominatorNotUnit, InvalidAlgebra, NotInDomain
from ddh.finitealg import DElement, FiniteAlgebra

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
F2 = CoefficientField(2, RATIONAL_FUNCTIONS, 2)
D = FiniteAlgebra.dual_numbers()
QxQ = FiniteAlgebra.product(["point", "point"], name="QxQ")
t1 = F1.gen(1)


def taylor_structure():
    return DStructure(D, F1, {1: DElement(D, [t1, F1.one], F1)}, name="taylor")


def shift_structure(k=1):
    return DStructure(QxQ, F1, {1: DElement(QxQ, [t1, t1 + k], F1)}, name="shift")


def test_e_of_on_dual_numbers():
    s = taylor_structure()
    assert s.e_of(t1 ** 2) == DElement(D, [t1 ** 2, 2 * t1], F1)
    assert s.e_of(F1.one / t1) == DElement(D, [F1.one / t1, -F1.one / t1 ** 2], F1)
    assert s.partial_of(1, t1 ** 3) == 3 * t1 ** 2
    assert s.partial_of(0, t1 ** 3) == t1 ** 3
    assert s.e_of(5) == D.embed(F1.convert(5), F1)


def test_e_of_on_points_is_a_shift():
    s = shift_structure()
    assert s.e_of(F1.one / t1) == DElement(QxQ, [F1.one / t1, F1.one / (t1 + 1)], F1)
    assert s.sigma(1, t1 ** 2) == (t1 + 1) ** 2
    assert s.sigma(0, t1 ** 2) == t1 ** 2


def test_denominator_not_unit():
    s = DStructure(QxQ, F1, {1: DElement(QxQ, [t1, F1.zero], F1)})
    with pytest.raises(DenominatorNotUnit) as err:
        s.e_of(F1.one / t1)
    assert err.value.index == 1


def test_undeclared_generator_is_outside_domain():
    s = DStructure(D, F2, {1: D.embed(F2.gen(1), F2)})
    assert s.in_domain(F2.gen(1) ** 2)
    with pytest.raises(NotInDomain):
        s.e_of(F2.gen(2))
    extended = s.with_image(2, D.embed(F2.gen(2), F2))
    assert extended.declared == [1, 2]
    assert extended.e_of(F2.gen(2)) == D.embed(F2.gen(2), F2)


def test_images_are_validated():
    with pytest.raises(InvalidAlgebra):
        DStructure(D, F1, {2: D.embed(t1, F1)})
    with pytest.raises(InvalidAlgebra):
        DStructure(D, F1, {1: QxQ.embed(t1, F1)})


def test_map_poly_modes():
    s = taylor_structure()
    x = DiffPoly.variable(F1, 1)
    f = x * t1 ** 2 - t1
    fe = s.map_poly(f, MODE_E)
    assert fe.coords[0] == f
    assert fe.coords[1] == x * t1 * 2 - 1
    assert s.map_poly(f, MODE_SIGMA, 0) == f
    local = s.map_poly(f, MODE_COMPONENT, 0)
    assert local.coords[1] == x * t1 * 2 - 1

    shifted = shift_structure().map_poly(f, MODE_SIGMA, 1)
    assert shifted == x * (t1 + 1) ** 2 - (t1 + 1)
    with pytest.raises(ValueError):
        s.map_poly(f, "bogus")


def test_check_structure_passes():
    for s in [taylor_structure(), shift_structure(), DStructure.trivial(D, F1)]:
        report = check_structure(s)
        assert report.passed, report.render()
    names = [item.name for item in check_structure(shift_structure()).items]
    assert "pi(e(t1)) = t1" in names
    assert "e commutes with d1 on generators" in names
    assert "sigma1 injective on generators" in names


def test_check_structure_reports_commutation_failure():
    s = DStructure(QxQ, F1, {1: DElement(QxQ, [t1, t1 ** 2], F1)})
    report = check_structure(s)
    assert not report.passed
    failed = [item.name for item in report.failures()]
    assert "e commutes with d1 on generators" in failed
    assert "pi(e(t1)) = t1" not in failed


def test_check_structure_reports_wrong_residue():
    s = DStructure(D, F1, {1: DElement(D, [t1 + 1, F1.one], F1)})
    failed = [item.name for item in check_structure(s).failures()]
    assert "pi(e(t1)) = t1" in failed


def test_constant_image_fails_injectivity():
    s = DStructure(QxQ, F1, {1: DElement(QxQ, [t1, F1.convert(3)], F1)})
    failed = [item.name for item in check_structure(s).failures()]
    assert "sigma1 injective on generators" in failed
