"""
Checks for the axiom scheme of D-differentially closed fields.

Condition (i) is certified by reduction: every component of every f in lam
reduces to zero modulo gamma. Density is never decided; witness points are
only reported.
"""

import logging
from dataclasses import dataclass
from typing import List, Mapping, Optional

from joblib import Parallel, delayed

from .coeffield import FieldElem
from .config import N_JOBS
from .diffpoly import DiffPoly, Var
from .dstructure import MODE_SIGMA, DStructure
from .prolongation import components, nabla, pihat, point_text
from .reduction import AutoreducedSet, ritt_remainder
from .reports import CheckReport

logger = logging.getLogger(__name__)

Point = Mapping[Var, FieldElem]

MEMBERSHIP_NOTE = ("a passing condition (i) is a certificate; a failing component refutes it "
                   "only together with a witness point")


@dataclass
class VStar:
    """V*(lam): the zeros of lam where H does not vanish."""
    lam: AutoreducedSet
    name: str = "lam"

    @property
    def H(self) -> DiffPoly:
        return self.lam.H

    def h_outside_ideal(self) -> bool:
        """H reduces to a nonzero remainder, as it must for a characteristic set."""
        return bool(ritt_remainder(self.H, self.lam).remainder)

    def contains(self, a: Point) -> bool:
        return point_in_vstar(a, self)


def point_in_vstar(a: Point, v: VStar) -> bool:
    """Every f vanishes at a and H(a) != 0."""
    if any(f.evaluate(a) for f in v.lam):
        return False
    return bool(v.H.evaluate(a))


def _component_remainders(f: DiffPoly, gamma: AutoreducedSet, s: DStructure) -> List[DiffPoly]:
    return [ritt_remainder(c, gamma).remainder for c in components(f, s)]


def check_condition_i(lam: VStar, gamma: VStar, s: DStructure, n_jobs: int = N_JOBS) -> CheckReport:
    """Reduce every component f^(j) modulo gamma."""
    report = CheckReport(title=f"condition (i) for {lam.name} and {gamma.name}")
    remainders = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_component_remainders)(f, gamma.lam, s) for f in lam.lam)
    for f, rems in zip(lam.lam, remainders):
        for j, r in enumerate(rems):
            report.add(f"({f.to_text()})^({j}) in ideal of {gamma.name}", not r,
                       "" if not r else f"remainder {r.to_text()}")
    report.add(f"H of {gamma.name} is outside its ideal", gamma.h_outside_ideal())
    report.notes.append(MEMBERSHIP_NOTE)
    report.notes.append(f"{gamma.name} is assumed to be a characteristic set of a prime differential ideal")
    logger.info("condition (i): %s", "pass" if report.passed else "fail")
    return report


def check_witness(a: Point, lam: VStar, gamma: VStar, s: DStructure) -> CheckReport:
    """
    a in V*(lam) and nabla(a) in V*(gamma); the pi-hat images of nabla(a)
    and their membership in V*(lam^sigma_i) are reported as evidence.
    """
    fld = s.field
    report = CheckReport(title=f"witness {', '.join(point_text(a, fld))}")
    in_lam = point_in_vstar(a, lam)
    report.add(f"a in V*({lam.name})", in_lam)
    abar = nabla(a, s)
    report.add(f"nabla(a) in V*({gamma.name})", point_in_vstar(abar, gamma),
               "; ".join(point_text(abar, fld)))
    if in_lam:
        bad: Optional[str] = None
        for f in lam.lam:
            for j, c in enumerate(components(f, s)):
                if c.evaluate(abar):
                    bad = f"({f.to_text()})^({j})"
                    break
            if bad:
                break
        report.add("components vanish at nabla(a)", bad is None, bad or "")
    if s.algebra.has_decomposition():
        for i in range(s.algebra.factor_count):
            image = pihat(i, abar, s)
            twisted = VStar(AutoreducedSet([s.map_poly(f, MODE_SIGMA, i) for f in lam.lam]), f"{lam.name}^sigma{i}")
            inside = point_in_vstar(image, twisted)
            report.notes.append(f"pihat{i}(nabla(a)) = {', '.join(point_text(image, fld))}; "
                                f"in V*({twisted.name}): {'yes' if inside else 'no'}")
    report.notes.append("density of the projections is not decided")
    return report
