"""
Exact linear algebra helpers on top of sympy's DomainMatrix.
"""

from typing import List, Optional, Sequence

from sympy.polys.matrices import DomainMatrix


def _matrix(rows: Sequence[Sequence], ncols: int, domain) -> DomainMatrix:
    return DomainMatrix([[domain.convert(v) for v in row] for row in rows], (len(rows), ncols), domain)


def rref(rows: Sequence[Sequence], ncols: int, domain):
    """Reduced row echelon form as (list of rows, pivot columns)."""
    if not rows:
        return [], ()
    reduced, pivots = _matrix(rows, ncols, domain).rref()
    return reduced.to_list(), tuple(pivots)


def rank(rows: Sequence[Sequence], ncols: int, domain) -> int:
    return len(rref(rows, ncols, domain)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, domain) -> List[List]:
    """Basis of {x : A x = 0}."""
    if ncols == 0:
        return []
    if not rows:
        return [[domain.one if k == j else domain.zero for k in range(ncols)] for j in range(ncols)]
    reduced, pivots = rref(rows, ncols, domain)
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = [domain.zero] * ncols
        vec[free] = domain.one
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][free]
        basis.append(vec)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int, domain) -> Optional[List]:
    """
    One solution of A x = b with every free unknown set to zero.

    Returns None when the system is inconsistent.
    """
    if not rows:
        return [domain.zero] * ncols
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1, domain)
    if ncols in pivots:
        return None
    x = [domain.zero] * ncols
    for r, p in enumerate(pivots):
        x[p] = reduced[r][ncols]
    return x


def in_span(vec: Sequence, basis: Sequence[Sequence], domain) -> bool:
    ncols = len(vec)
    if not any(vec):
        return True
    return rank(list(basis) + [list(vec)], ncols, domain) == rank(list(basis), ncols, domain)


def inverse(rows: Sequence[Sequence], domain) -> List[List]:
    n = len(rows)
    return _matrix(rows, n, domain).inv().to_list()
