"""
Exception hierarchy for the differential-algebra toolkit.

Every error raised by the library derives from DDHError, so callers (and the
command line) can catch one type and still inspect the structured attributes.
"""

from typing import Any, Optional


class DDHError(Exception):
    """Base class for all library errors."""


# ---------------------------
# Coefficient fields
# ---------------------------
class DerivationIndexError(DDHError):
    def __init__(self, j: int, m: int):
        super().__init__(f"derivation index {j} out of range 1..{m}")
        self.j = j
        self.m = m


class PoleAtPoint(DDHError):
    def __init__(self, element: str, point: Any):
        super().__init__(f"denominator of {element} vanishes at {point}")
        self.element = element
        self.point = point


class NotInDomain(DDHError):
    """An element uses a generator that has no declared image."""


# ---------------------------
# Differential polynomials
# ---------------------------
class ConstantPolynomial(DDHError):
    def __init__(self, what: str = "polynomial"):
        super().__init__(f"{what} has no indeterminates")


class MissingIndeterminate(DDHError):
    def __init__(self, indet: str):
        super().__init__(f"no value assigned to {indet}")
        self.indet = indet


# ---------------------------
# Reduction
# ---------------------------
class NotAutoreduced(DDHError):
    def __init__(self, f: str, g: str, indet: str, reason: str):
        super().__init__(f"not autoreduced: {indet} ({reason}) in {g} against {f}")
        self.f = f
        self.g = g
        self.indet = indet
        self.reason = reason


class HVanishesUnderMap(DDHError):
    def __init__(self, element: str):
        super().__init__(f"initial or separant of {element} vanishes under the coefficient map")
        self.element = element


class ResourceLimit(DDHError):
    def __init__(self, budget: int, what: str = "Groebner basis"):
        super().__init__(f"{what} exceeded step budget {budget}")
        self.budget = budget


# ---------------------------
# Finite algebras
# ---------------------------
class AlgebraMismatch(DDHError):
    pass


class InvalidAlgebra(DDHError):
    pass


class NotAUnit(DDHError):
    def __init__(self, index: int):
        super().__init__(f"residue {index} vanishes; element is not a unit")
        self.index = index


class NoDecomposition(DDHError):
    pass


class IdempotentsRequired(DDHError):
    pass


class InvalidIdempotents(DDHError):
    pass


# ---------------------------
# D-structures
# ---------------------------
class DenominatorNotUnit(DDHError):
    def __init__(self, index: int, denominator: str):
        super().__init__(f"image of denominator {denominator} is not a unit (local factor {index})")
        self.index = index
        self.denominator = denominator


# ---------------------------
# Lifting and solving
# ---------------------------
class PreconditionFailed(DDHError):
    def __init__(self, clause: str, factor: Optional[int] = None):
        where = f" (factor {factor})" if factor is not None else ""
        super().__init__(f"precondition failed: {clause}{where}")
        self.clause = clause
        self.factor = factor


class NotInFiltration(DDHError):
    def __init__(self, level: int, element: str):
        super().__init__(f"{element} is not in m^{level}")
        self.level = level
        self.element = element


class SolverFailed(DDHError):
    def __init__(self, message: str, level: Optional[int] = None,
                 system: Optional[list] = None, factor: Optional[int] = None):
        super().__init__(message)
        self.level = level
        self.system = system or []
        self.factor = factor

    def tagged(self, level: Optional[int] = None, factor: Optional[int] = None) -> "SolverFailed":
        if level is not None and self.level is None:
            self.level = level
        if factor is not None and self.factor is None:
            self.factor = factor
        return self


class NoSolutionFoundAtBound(SolverFailed):
    pass


class ProvenInconsistent(SolverFailed):
    pass


class SingularPoint(SolverFailed):
    pass


# ---------------------------
# Input
# ---------------------------
class PolySyntaxError(DDHError):
    def __init__(self, text: str, line: int, column: int, expected: list):
        super().__init__(f"syntax error at {line}:{column} in {text!r}; expected one of {', '.join(expected)}")
        self.text = text
        self.line = line
        self.column = column
        self.expected = expected


class UnknownSymbol(DDHError):
    def __init__(self, symbol: str):
        super().__init__(f"unknown symbol {symbol!r}")
        self.symbol = symbol


class SessionError(DDHError):
    pass


class PointError(DDHError):
    """A point whose variables do not fit the operation (plain x<i> where x<i>_<j> is needed)."""

    def __init__(self, message: str, var: str):
        super().__init__(message)
        self.var = var
