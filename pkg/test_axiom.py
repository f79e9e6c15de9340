"""
Tests for condition (i) certificates and witness points.
"""

from ddh.axiom import VStar, check_condition_i, check_witness, point_in_vstar
from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import DiffPoly, Var
from ddh.dstructure import DStructure
from ddh.finitealg import DElement, FiniteAlgebra
from ddh.reduction import check_autoreduced

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
D = FiniteAlgebra.dual_numbers()
QxQ = FiniteAlgebra.product(["point", "point"], name="QxQ")
t1 = F1.gen(1)
x = DiffPoly.variable(F1, 1)
dx = x.derive(1)
x0, x1 = DiffPoly.variable(F1, 1, 0), DiffPoly.variable(F1, 1, 1)

LAM = VStar(check_autoreduced([dx - 1]), "lam")


def taylor():
    return DStructure(D, F1, {1: DElement(D, [t1, F1.one], F1)}, name="taylor")


def shift():
    return DStructure(QxQ, F1, {1: DElement(QxQ, [t1, t1 + 1], F1)}, name="shift")


def test_condition_i_certificates():
    s = taylor()
    gamma1 = VStar(check_autoreduced([x0.derive(1) - 1, x1.derive(1)]), "gamma1")
    report = check_condition_i(LAM, gamma1, s)
    assert report.passed, report.render()
    assert "(d1 x1 - 1)^(1) in ideal of gamma1" in [item.name for item in report.items]

    gamma2 = VStar(check_autoreduced([x0.derive(1) - 1, x1]), "gamma2")
    assert check_condition_i(LAM, gamma2, s).passed


def test_condition_i_failure_reports_remainder():
    gamma3 = VStar(check_autoreduced([x0.derive(1) - 1, x1.derive(1) - 1]), "gamma3")
    report = check_condition_i(LAM, gamma3, taylor())
    assert not report.passed
    failed = report.failures()
    assert [item.name for item in failed] == ["(d1 x1 - 1)^(1) in ideal of gamma3"]
    assert failed[0].detail == "remainder 1"


def test_point_in_vstar():
    assert point_in_vstar({Var(1): t1}, LAM)
    assert not point_in_vstar({Var(1): t1 ** 2}, LAM)
    assert LAM.contains({Var(1): t1 + 5})
    singular = VStar(check_autoreduced([x * dx - t1]), "singular")
    assert singular.contains({Var(1): t1})
    assert not singular.contains({Var(1): F1.zero})
    assert singular.h_outside_ideal()


def test_witness_on_dual_numbers():
    s = taylor()
    gamma = VStar(check_autoreduced([x0.derive(1) - 1, x1.derive(1)]), "gamma")
    report = check_witness({Var(1): t1}, LAM, gamma, s)
    assert report.passed, report.render()
    assert "density of the projections is not decided" in report.notes

    bad = check_witness({Var(1): t1 ** 2}, LAM, gamma, s)
    assert not bad.passed
    assert "a in V*(lam)" in [item.name for item in bad.failures()]


def test_witness_on_points():
    s = shift()
    gamma = VStar(check_autoreduced([x0.derive(1) - 1, x1.derive(1) - 1]), "gamma")
    report = check_witness({Var(1): t1}, LAM, gamma, s)
    assert report.passed, report.render()
    assert any(note.startswith("pihat1(nabla(a)) = x1 = t1 + 1") and note.endswith("yes")
               for note in report.notes)
