"""
Tests for session files.
"""

import json

import pytest

from ddh.coeffield import RATIONALS
from ddh.diffpoly import DiffPoly
from ddh.errors import SessionError
from ddh.finitealg import DElement
from ddh.session import Session

EXAMPLE = {
    "field": {"m": 1, "s": 1},
    "algebras": {"B": {"pieces": ["local(d=2)"]}, "P": {"pieces": ["point", "point"]}},
    "structures": {"E": {"algebra": "B", "images": {"t1": "t1 + e"}},
                   "T": {"algebra": "P", "trivial": True}},
    "sets": {"L": ["d1 x1 - 1"]},
    "systems": {"S": {"algebra": "B", "polys": ["x1*d1 x1 - t1 - e"]}},
    "commands": [{"op": "lift", "args": {"system": "S", "point": "t1"}},
                 {"op": "prolong", "args": {"set": "L", "structure": "E"}}],
}


def test_session_resolves_declarations():
    session = Session.from_dict(EXAMPLE)
    fld = session.field
    t1 = fld.gen(1)
    B = session.algebra("B")
    assert B.dim == 2
    assert session.algebra("B") is B
    E = session.structure("E")
    assert E.e_of(t1) == DElement(B, [t1, fld.one], fld)
    assert session.structure("T").algebra.factor_count == 2
    x = DiffPoly.variable(fld, 1)
    assert session.polys("L") == [x.derive(1) - 1]
    assert session.autoreduced("L").texts() == ["d1 x1 - 1"]
    system = session.system("S")
    assert len(system) == 1 and system[0].algebra is B
    assert [c.op for c in session.data.commands] == ["lift", "prolong"]


def test_session_load(tmp_path):
    path = tmp_path / "session.json"
    path.write_text(json.dumps(EXAMPLE))
    assert Session.load(str(path)).algebra("P").dim == 2
    with pytest.raises(SessionError):
        Session.load(str(tmp_path / "missing.json"))


def test_rational_field():
    session = Session.from_dict({"field": {"m": 1, "s": 0}})
    assert session.field.kind == RATIONALS


def _with(**changes):
    payload = json.loads(json.dumps(EXAMPLE))
    payload.update(changes)
    return payload


def test_invalid_sessions():
    with pytest.raises(SessionError):
        Session.from_json("{not json")
    with pytest.raises(SessionError):
        Session.from_dict(_with(field={"m": -1, "s": 1}))
    with pytest.raises(SessionError):
        Session.from_dict(_with(commands=[{"op": "integrate"}]))
    with pytest.raises(SessionError):
        Session.from_dict(_with(structures={"E": {"algebra": "missing"}}))
    with pytest.raises(SessionError):
        Session.from_dict(_with(commands=[{"op": "rank", "args": {"set": "nope"}}]))


def test_invalid_declarations_fail_on_use():
    session = Session.from_dict(_with(algebras={"B": {}},
                                      structures={}, systems={}, commands=[]))
    with pytest.raises(SessionError):
        session.algebra("B")

    bad_key = Session.from_dict(_with(structures={"E": {"algebra": "B", "images": {"x1": "t1"}}}))
    with pytest.raises(SessionError):
        bad_key.structure("E")
    bad_value = Session.from_dict(_with(structures={"E": {"algebra": "B", "images": {"t1": "x1"}}}))
    with pytest.raises(SessionError):
        bad_value.structure("E")
    with pytest.raises(SessionError):
        Session.from_dict(EXAMPLE).polys("undeclared")
