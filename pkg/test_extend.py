"""
Tests for extending a structure to a new element.
"""

import pytest

from ddh.coeffield import RATIONAL_FUNCTIONS, CoefficientField
from ddh.diffpoly import DiffPoly
from ddh.dstructure import DStructure, check_structure
from ddh.errors import PreconditionFailed
from ddh.extend import ExtensionRequest, check_extension, extend, extend_to_element
from ddh.finitealg import DElement, FiniteAlgebra
from ddh.reduction import check_autoreduced

F1 = CoefficientField(1, RATIONAL_FUNCTIONS, 1)
D = FiniteAlgebra.dual_numbers()
QxQ = FiniteAlgebra.product(["point", "point"], name="QxQ")
t1 = F1.gen(1)
x = DiffPoly.variable(F1, 1)
dx = x.derive(1)


def test_extend_over_dual_numbers():
    lam = check_autoreduced([dx - 1])
    result = extend(DStructure(D, F1, {}), t1, lam, [t1])
    assert result.value == DElement(D, [t1, F1.zero], F1)
    assert result.checks.passed, result.checks.render()
    assert result.residues() == [t1]
    extended = result.extended_structure(1)
    assert check_structure(extended).passed
    text = result.to_report().render()
    assert "extension at t1" in text
    assert "b = t1" in text


def test_extend_over_points_gives_a_shift():
    lam = check_autoreduced([dx - 1])
    result = extend(DStructure(QxQ, F1, {}), t1, lam, [t1, t1 + 1])
    assert result.value == DElement(QxQ, [t1, t1 + 1], F1)
    assert result.checks.passed, result.checks.render()
    assert result.residues() == [t1, t1 + 1]
    shift = result.extended_structure(1)
    assert shift.sigma(1, t1 ** 2) == (t1 + 1) ** 2
    assert check_structure(shift).passed


def test_extend_nonlinear_set():
    lam = check_autoreduced([x * dx - t1])
    result = extend(DStructure.trivial(D, F1), t1, lam, [t1])
    assert result.value == DElement(D, [t1, F1.zero], F1)
    assert result.checks.passed, result.checks.render()
    assert result.lifts[0].verified


def test_extend_transcendental_element():
    req = ExtensionRequest(DStructure(D, F1, {}), t1, None, [t1])
    assert req.transcendental
    result = extend_to_element(req)
    assert result.value == D.embed(t1, F1)
    assert result.lifts == [None]
    assert "differentially transcendental" in result.to_report().render()
    assert check_extension(result).passed


def test_request_validation():
    lam = check_autoreduced([dx - 1])
    empty = DStructure(QxQ, F1, {})
    with pytest.raises(PreconditionFailed) as err:
        extend(empty, t1, lam, [t1])
    assert "one target per local factor" in err.value.clause
    with pytest.raises(PreconditionFailed) as err:
        extend(empty, t1, lam, [t1 + 1, t1])
    assert err.value.clause == "the target of factor 0 is the element itself"
    with pytest.raises(PreconditionFailed) as err:
        extend(empty, t1 ** 2, lam, [t1 ** 2, t1 ** 2])
    assert err.value.clause.startswith("a is a root of")
    with pytest.raises(PreconditionFailed) as err:
        extend(empty, t1, lam, [t1, t1 ** 2])
    assert err.value.factor == 1

    two = check_autoreduced([dx - DiffPoly.variable(F1, 2)])
    with pytest.raises(PreconditionFailed) as err:
        extend(DStructure(D, F1, {}), t1, two, [t1])
    assert "only involves x1" in err.value.clause


def test_extended_structure_needs_a_generator():
    lam = check_autoreduced([dx - 2 * t1])
    result = extend(DStructure.trivial(D, F1), t1 ** 2, lam, [t1 ** 2])
    with pytest.raises(PreconditionFailed):
        result.extended_structure(1)
