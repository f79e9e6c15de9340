"""
Report models printed by the command line.

Every report is a pydantic model holding already-rendered text, so that
``render()`` is a pure function of the model and output is byte-stable.
"""

from typing import List, Optional

from pydantic import BaseModel, Field


def _verdict(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


class CheckItem(BaseModel):
    """One named check inside a report"""
    name: str
    passed: bool
    detail: str = ""

    def render(self) -> str:
        line = f"  [{_verdict(self.passed)}] {self.name}"
        return f"{line}: {self.detail}" if self.detail else line


class CheckReport(BaseModel):
    """Pass/fail report made of individual checks"""
    title: str
    items: List[CheckItem] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def add(self, name: str, passed: bool, detail: str = "") -> "CheckReport":
        self.items.append(CheckItem(name=name, passed=passed, detail=detail))
        return self

    def failures(self) -> List[CheckItem]:
        return [item for item in self.items if not item.passed]

    def render(self) -> str:
        lines = [f"{self.title}: {_verdict(self.passed)}"]
        lines.extend(item.render() for item in self.items)
        lines.extend(f"  note: {note}" for note in self.notes)
        return "\n".join(lines)


class RankEntry(BaseModel):
    poly: str
    leader: Optional[str] = None
    degree: Optional[int] = None
    separant: Optional[str] = None
    initial: Optional[str] = None

    def render(self) -> str:
        if self.leader is None:
            return f"{self.poly}: constant"
        return (f"{self.poly}: leader {self.leader}, degree {self.degree}, "
                f"separant {self.separant}, initial {self.initial}")


class RankReport(BaseModel):
    entries: List[RankEntry]
    ordering: List[str] = Field(default_factory=list)

    def render(self) -> str:
        lines = [entry.render() for entry in self.entries]
        if self.ordering:
            lines.append("increasing rank: " + " < ".join(self.ordering))
        return "\n".join(lines)


class CertificateStep(BaseModel):
    """One subtraction c * theta(g) recorded by the reduction"""
    element: str
    theta: str
    coefficient: str


class ReductionReport(BaseModel):
    poly: str
    remainder: str
    multiplier: str
    exponents: List[str]
    steps: List[CertificateStep]
    verified: bool

    def render(self) -> str:
        lines = [f"remainder = {self.remainder}", f"multiplier = {self.multiplier}"]
        lines.extend(f"  {text}" for text in self.exponents)
        lines.append("certificate: multiplier*f = sum(coefficient*theta(g)) + remainder")
        for step in self.steps:
            lines.append(f"  {step.coefficient} * [{step.theta}] ({step.element})")
        lines.append(f"certificate verified: {'yes' if self.verified else 'no'}")
        return "\n".join(lines)


class CoherencePair(BaseModel):
    f: str
    g: str
    common_derivative: str
    delta: str
    verdict: str
    method: str

    def render(self) -> str:
        return (f"  pair ({self.f}) , ({self.g}) at {self.common_derivative}: "
                f"delta = {self.delta}; {self.verdict} ({self.method})")


class CoherenceReport(BaseModel):
    coherent: bool
    pairs: List[CoherencePair] = Field(default_factory=list)
    witness: Optional[str] = None

    def render(self) -> str:
        lines = [f"coherent: {'yes' if self.coherent else 'no'}"]
        lines.extend(pair.render() for pair in self.pairs)
        if self.witness is not None:
            lines.append(f"witness delta-polynomial: {self.witness}")
        return "\n".join(lines)


class MembershipReport(BaseModel):
    poly: str
    member: bool
    remainder: str
    assertion: str = "the set is assumed to be a characteristic set of a prime differential ideal"

    def render(self) -> str:
        return "\n".join([
            f"member: {'yes' if self.member else 'no'}",
            f"remainder = {self.remainder}",
            f"assumption: {self.assertion}",
        ])


class ValuesReport(BaseModel):
    """A list of named values, e.g. a prolonged system or a point"""
    title: str
    values: List[str]

    def render(self) -> str:
        return "\n".join([self.title] + [f"  {v}" for v in self.values])


class LiftLevelReport(BaseModel):
    level: int
    basis: List[str]
    equations: List[str]
    autoreduced: List[str]
    solutions: List[str]

    def render(self) -> str:
        lines = [f"level {self.level}: basis {', '.join(self.basis)}"]
        lines.extend(f"  l = {eq}" for eq in self.equations)
        lines.extend(f"  reduced: {eq}" for eq in self.autoreduced)
        lines.extend(f"  {sol}" for sol in self.solutions)
        return "\n".join(lines)


class LiftReport(BaseModel):
    result: str
    solver: str
    levels: List[LiftLevelReport] = Field(default_factory=list)
    verified: bool = True
    notes: List[str] = Field(default_factory=list)

    def render(self) -> str:
        lines = [f"b = {self.result}", f"solver: {self.solver}"]
        for level in self.levels:
            lines.append(level.render())
        lines.append(f"verified f(b) = 0: {'yes' if self.verified else 'no'}")
        lines.extend(f"note: {note}" for note in self.notes)
        return "\n".join(lines)


class ExtendReport(BaseModel):
    element: str
    result: str
    residues: List[str]
    factors: List[LiftReport] = Field(default_factory=list)
    checks: Optional[CheckReport] = None
    notes: List[str] = Field(default_factory=list)

    def render(self) -> str:
        lines = [f"extension at {self.element}", f"b = {self.result}"]
        lines.extend(f"  residue {i}: {r}" for i, r in enumerate(self.residues))
        for i, factor in enumerate(self.factors):
            lines.append(f"factor {i}:")
            lines.extend(f"  {line}" for line in factor.render().splitlines())
        if self.checks is not None:
            lines.append(self.checks.render())
        lines.extend(f"note: {note}" for note in self.notes)
        return "\n".join(lines)
