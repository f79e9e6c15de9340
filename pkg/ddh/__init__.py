"""
Exact differential algebra: differential polynomials, characteristic sets,
finite-algebra structures, prolongations and differential Hensel lifting.
"""

from .coeffield import CoefficientField
from .diffpoly import AlgIndet, DiffPoly, Var
from .dstructure import DStructure, check_structure
from .extend import ExtensionRequest, extend, extend_to_element
from .finitealg import DElement, FiniteAlgebra, LocalAlgebra
from .hensel import lift, lift_any, lift_nonlocal
from .parser import parse_point, parse_poly
from .prolongation import nabla, pihat, tau_generators
from .reduction import AutoreducedSet, check_autoreduced, check_coherent, ritt_remainder
from .session import Session
from .solvers import ExactAnsatz, JetSolver, parse_solver

__all__ = [
    'AlgIndet',
    'AutoreducedSet',
    'CoefficientField',
    'DElement',
    'DStructure',
    'DiffPoly',
    'ExactAnsatz',
    'ExtensionRequest',
    'FiniteAlgebra',
    'JetSolver',
    'LocalAlgebra',
    'Session',
    'Var',
    'check_autoreduced',
    'check_coherent',
    'check_structure',
    'extend',
    'extend_to_element',
    'lift',
    'lift_any',
    'lift_nonlocal',
    'nabla',
    'parse_point',
    'parse_poly',
    'parse_solver',
    'pihat',
    'ritt_remainder',
    'tau_generators',
]
