"""
Session files: one JSON document declaring a field, algebras, structures,
polynomial sets and a command list.

    {
      "field": {"m": 1, "s": 1},
      "algebras": {"B": {"pieces": ["local(d=2)"]}},
      "structures": {"E": {"algebra": "B", "images": {"t1": "t1 + e"}}},
      "sets": {"L": ["d1 x1 - 1"]},
      "systems": {"S": {"algebra": "B", "polys": ["x1*d1 x1 - t1 - e"]}},
      "commands": [{"op": "lift", "args": {"system": "S", "point": "t1"}}]
    }
"""

import json
import logging
import threading
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from .coeffield import RATIONAL_FUNCTIONS, RATIONALS, CoefficientField
from .dstructure import DStructure
from .errors import DDHError, SessionError
from .finitealg import DElement, FiniteAlgebra
from .parser import parse_poly, parse_set
from .reduction import AutoreducedSet, check_autoreduced

logger = logging.getLogger(__name__)

COMMANDS = ["rank", "reduce", "coherent", "member", "prolong", "nabla", "pihat", "lift", "extend",
            "check-structure", "check-axiom3"]


class FieldDecl(BaseModel):
    """QQ when s = 0, otherwise QQ(t1..ts); m derivations"""
    m: int = 1
    s: int = 1
    kind: Optional[str] = None

    @field_validator("m", "s")
    @classmethod
    def non_negative(cls, v):
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    def build(self) -> CoefficientField:
        kind = self.kind or (RATIONALS if self.s == 0 else RATIONAL_FUNCTIONS)
        return CoefficientField(self.m, kind, self.s)


class AlgebraDecl(BaseModel):
    """Either product pieces or a full structure-constant table"""
    pieces: Optional[List[str]] = None
    table: Optional[List[List[List[Union[int, str]]]]] = None
    idempotents: Optional[List[List[Union[int, str]]]] = None

    def build(self, name: str) -> FiniteAlgebra:
        if self.pieces:
            return FiniteAlgebra.product(self.pieces, name=name)
        if self.table:
            return FiniteAlgebra(self.table, idempotents=self.idempotents, name=name)
        raise SessionError(f"algebra {name} needs pieces or a table")


class StructureDecl(BaseModel):
    algebra: str
    images: Dict[str, str] = Field(default_factory=dict)
    trivial: bool = False


class SystemDecl(BaseModel):
    """Polynomials whose coefficients carry basis symbols of an algebra"""
    algebra: str
    polys: List[str]


class CommandDecl(BaseModel):
    op: str
    args: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("op")
    @classmethod
    def known_op(cls, v):
        if v not in COMMANDS:
            raise ValueError(f"unknown command {v!r}; expected one of {', '.join(COMMANDS)}")
        return v


class SessionFile(BaseModel):
    field: FieldDecl = Field(default_factory=FieldDecl)
    algebras: Dict[str, AlgebraDecl] = Field(default_factory=dict)
    structures: Dict[str, StructureDecl] = Field(default_factory=dict)
    sets: Dict[str, List[str]] = Field(default_factory=dict)
    systems: Dict[str, SystemDecl] = Field(default_factory=dict)
    commands: List[CommandDecl] = Field(default_factory=list)


class Session:
    """Resolved declarations; objects are built on first use and cached."""

    def __init__(self, data: SessionFile):
        self.data = data
        self.field = data.field.build()
        self._algebras: Dict[str, FiniteAlgebra] = {}
        self._structures: Dict[str, DStructure] = {}
        self._lock = threading.RLock()

    @classmethod
    def load(cls, path: str) -> "Session":
        try:
            with open(path, "r") as fh:
                raw = fh.read()
        except OSError as exc:
            raise SessionError(f"cannot read session {path}: {exc}") from exc
        return cls.from_json(raw)

    @classmethod
    def from_json(cls, raw: str) -> "Session":
        try:
            data = SessionFile.model_validate_json(raw)
        except ValidationError as exc:
            raise SessionError(f"invalid session: {exc}") from exc
        session = cls(data)
        session.check_references()
        return session

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "Session":
        return cls.from_json(json.dumps(payload))

    def check_references(self) -> None:
        """Every name used by a structure, system or command is declared."""
        for name, decl in self.data.structures.items():
            self._require(decl.algebra, self.data.algebras, f"structure {name}")
        for name, decl in self.data.systems.items():
            self._require(decl.algebra, self.data.algebras, f"system {name}")
        tables = {"set": self.data.sets, "gamma": self.data.sets, "system": self.data.systems,
                  "algebra": self.data.algebras, "structure": self.data.structures}
        for k, command in enumerate(self.data.commands):
            for key, table in tables.items():
                ref = command.args.get(key)
                if ref is None or (key == "structure" and ref == "trivial"):
                    continue
                self._require(str(ref), table, f"command {k} ({command.op})")

    @staticmethod
    def _require(name: str, table: Dict, where: str) -> None:
        if name not in table:
            raise SessionError(f"{where} refers to undeclared {name!r}")

    # ---------------------------
    # Resolution
    # ---------------------------
    def algebra(self, name: str) -> FiniteAlgebra:
        with self._lock:
            if name not in self._algebras:
                self._require(name, self.data.algebras, "lookup")
                self._algebras[name] = self.data.algebras[name].build(name)
            return self._algebras[name]

    def structure(self, name: str) -> DStructure:
        with self._lock:
            if name not in self._structures:
                self._require(name, self.data.structures, "lookup")
                decl = self.data.structures[name]
                self._structures[name] = build_structure(self.field, self.algebra(decl.algebra), decl.images,
                                                         decl.trivial, name)
            return self._structures[name]

    def polys(self, name: str) -> List:
        self._require(name, self.data.sets, "lookup")
        return parse_set(self.data.sets[name], self.field)

    def autoreduced(self, name: str) -> AutoreducedSet:
        return check_autoreduced(self.polys(name))

    def system(self, name: str) -> List[DElement]:
        self._require(name, self.data.systems, "lookup")
        decl = self.data.systems[name]
        return parse_set(decl.polys, self.field, self.algebra(decl.algebra))


def build_structure(field: CoefficientField, algebra: FiniteAlgebra, images: Dict[str, str],
                    trivial: bool = False, name: str = "e") -> DStructure:
    """Images keyed ``t<j>``; values are expressions in t and the basis symbols."""
    if trivial:
        base = DStructure.trivial(algebra, field)
        declared = dict(base.images)
    else:
        declared = {}
    for key, text in images.items():
        if not key.startswith("t") or not key[1:].isdigit():
            raise SessionError(f"structure {name}: image keys are t<j>, got {key!r}")
        value = parse_poly(text, field, algebra)
        coords = []
        for c in value.coords:
            if not c.is_constant():
                raise SessionError(f"structure {name}: image of {key} contains indeterminates")
            coords.append(c.constant_value())
        declared[int(key[1:])] = DElement(algebra, coords, field)
    try:
        return DStructure(algebra, field, declared, name)
    except DDHError as exc:
        raise SessionError(f"structure {name}: {exc}") from exc
