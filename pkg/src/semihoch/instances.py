"""JSON instance files: schema, parsing into domain objects, serialization.

Four kinds are understood:

* ``semigroup`` and ``band``: ``{"elements": [...], "table": [[...]]}``
* ``clifford``: ``{"semilattice": S, "groups": {label: table or {"elements", "table"}},
  "homs": {"f<e": [indices]}}``
* ``semilattice-diagram``: ``{"semilattice": S, "algebras": {label: {"dim", "basis",
  "structure_constants": [[i, j, k, "num/den"]], "unit"}}, "transitions": {"f<e": matrix}}``

where ``S`` is a semigroup payload that must be a semilattice.  Strict pairs
``f < e`` must all be listed; identities on the diagonal are implied.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import jsonschema

from .algebras import AlgebraPresentation
from .diagrams import SemilatticeDiagram, clifford_algebra_diagram, semigroup_diagram
from .errors import SchemaError, SemihochError, ValidationError
from .exactlinalg import SparseMatrix, rational_str, to_rational
from .semigroups import (BandClass, DecompositionData, FiniteSemigroup, FiniteSemilattice, as_semilattice,
                         assemble_strong_semilattice, band_class, decompose_strong_semilattice,
                         validate_semigroup)

KINDS = ("semigroup", "band", "clifford", "semilattice-diagram")

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
_TABLE = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}
_SEMIGROUP = {
    "type": "object",
    "required": ["elements", "table"],
    "properties": {
        "elements": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "table": _TABLE,
    },
}
_PAIR_KEY = r"^[^<]+<[^<]+$"

SCHEMAS: Dict[str, dict] = {
    "semigroup": _SEMIGROUP,
    "band": _SEMIGROUP,
    "clifford": {
        "type": "object",
        "required": ["semilattice", "groups"],
        "properties": {
            "semilattice": _SEMIGROUP,
            "groups": {"type": "object", "additionalProperties": {"oneOf": [_TABLE, _SEMIGROUP]}},
            "homs": {
                "type": "object",
                "patternProperties": {_PAIR_KEY: {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                "additionalProperties": False,
            },
        },
    },
    "semilattice-diagram": {
        "type": "object",
        "required": ["semilattice", "algebras"],
        "properties": {
            "semilattice": _SEMIGROUP,
            "algebras": {
                "type": "object",
                "additionalProperties": {
                    "type": "object",
                    "required": ["dim", "structure_constants"],
                    "properties": {
                        "dim": {"type": "integer", "minimum": 1},
                        "basis": {"type": "array", "items": {"type": "string"}},
                        "structure_constants": {
                            "type": "array",
                            "items": {"type": "array", "minItems": 4, "maxItems": 4,
                                      "prefixItems": [{"type": "integer"}] * 3 + [_RATIONAL]},
                        },
                        "unit": {"type": "array", "items": _RATIONAL},
                    },
                },
            },
            "transitions": {
                "type": "object",
                "patternProperties": {_PAIR_KEY: {"type": "array", "items": {"type": "array", "items": _RATIONAL}}},
                "additionalProperties": False,
            },
        },
    },
}


@dataclass
class InstanceFile:
    kind: str
    name: str
    payload: dict
    source: str = ""
    semigroup: Optional[FiniteSemigroup] = field(default=None, repr=False)
    decomposition: Optional[DecompositionData] = field(default=None, repr=False)
    diagram: Optional[SemilatticeDiagram] = field(default=None, repr=False)

    def content_hash(self) -> str:
        canon = json.dumps({"kind": self.kind, "payload": self.payload}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def to_json(self) -> str:
        doc = {"kind": self.kind, "name": self.name, "source": self.source}
        doc.update(self.payload)
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_instance(text: str, source: str = "") -> InstanceFile:
    """Parse and validate an instance document; builds the domain objects."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(doc, dict):
        raise SchemaError("$", "instance must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError("$.kind", f"kind must be one of {', '.join(KINDS)}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("$.name", "name must be a string")
    payload = {k: v for k, v in doc.items() if k not in ("kind", "name", "source")}
    try:
        jsonschema.validate(payload, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        raise SchemaError(_path(exc.absolute_path), exc.message) from None
    inst = InstanceFile(kind, name, payload, str(doc.get("source", source)))
    try:
        _build(inst)
    except (SchemaError, ValidationError):
        raise
    except SemihochError as exc:
        raise ValidationError(str(exc)) from exc
    return inst


def _semigroup(p: dict, path: str) -> FiniteSemigroup:
    labels, table = p["elements"], p["table"]
    n = len(labels)
    if len(table) != n:
        raise SchemaError(f"{path}.table", f"expected {n} rows")
    for i, row in enumerate(table):
        if len(row) != n:
            raise SchemaError(f"{path}.table[{i}]", f"expected {n} entries")
    return validate_semigroup(labels, table)


def _semilattice(p: dict, path: str) -> FiniteSemilattice:
    S = _semigroup(p, path)
    L = as_semilattice(S)
    if L is None:
        raise ValidationError(f"{path}: not a semilattice (needs a commutative band)")
    return L


def _pair(L: FiniteSemilattice, key: str, path: str):
    f_lab, e_lab = key.split("<")
    try:
        f, e = L.labels.index(f_lab), L.labels.index(e_lab)
    except ValueError:
        raise SchemaError(f"{path}.{key}", "unknown semilattice label") from None
    if f == e or not L.leq(f, e):
        raise ValidationError(f"{path}.{key}: {f_lab} is not strictly below {e_lab}")
    return f, e


def _build(inst: InstanceFile) -> None:
    p = inst.payload
    if inst.kind in ("semigroup", "band"):
        S = _semigroup(p, "$")
        if inst.kind == "band" and band_class(S) is BandClass.NOT_BAND:
            raise ValidationError("$: band instance has a non-idempotent element")
        inst.semigroup = S
        dec = decompose_strong_semilattice(S)
        if dec is not None:
            inst.decomposition = dec
            inst.diagram = semigroup_diagram(dec)
        return
    L = _semilattice(p["semilattice"], "$.semilattice")
    if inst.kind == "clifford":
        groups = []
        for lab in L.labels:
            g = p["groups"].get(lab)
            if g is None:
                raise SchemaError(f"$.groups.{lab}", "missing group for semilattice element")
            if isinstance(g, list):
                g = {"elements": [f"{lab}:{i}" for i in range(len(g))], "table": g}
            groups.append(_semigroup(g, f"$.groups.{lab}"))
        trans = {(e, e): tuple(range(len(groups[e]))) for e in L.elements}
        for key, m in p.get("homs", {}).items():
            trans[_pair(L, key, "$.homs")] = tuple(m)
        dec = DecompositionData(L, tuple(groups), trans)
        dec.validate()
        inst.decomposition = dec
        inst.semigroup = assemble_strong_semilattice(dec)
        inst.diagram = clifford_algebra_diagram(dec)
        return
    algebras = []
    for lab in L.labels:
        a = p["algebras"].get(lab)
        if a is None:
            raise SchemaError(f"$.algebras.{lab}", "missing algebra for semilattice element")
        algebras.append(_algebra(a, f"$.algebras.{lab}"))
    trans = {(e, e): SparseMatrix.identity(algebras[e].dim) for e in L.elements}
    for key, rows in p.get("transitions", {}).items():
        f, e = _pair(L, key, "$.transitions")
        if len(rows) != algebras[f].dim or any(len(r) != algebras[e].dim for r in rows):
            raise SchemaError(f"$.transitions.{key}", f"expected a {algebras[f].dim}x{algebras[e].dim} matrix")
        trans[(f, e)] = SparseMatrix.from_dense([[to_rational(x) for x in r] for r in rows])
    inst.diagram = SemilatticeDiagram(L, algebras, trans)


def _algebra(a: dict, path: str) -> AlgebraPresentation:
    n = a["dim"]
    labels = a.get("basis") or [f"b{i}" for i in range(n)]
    if len(labels) != n:
        raise SchemaError(f"{path}.basis", f"expected {n} labels")
    products: List[List[Dict[int, Any]]] = [[{} for _ in range(n)] for _ in range(n)]
    for idx, (i, j, k, c) in enumerate(a["structure_constants"]):
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise SchemaError(f"{path}.structure_constants[{idx}]", "index out of range")
        products[i][j][k] = products[i][j].get(k, 0) + to_rational(c)
    unit = None
    if "unit" in a:
        if len(a["unit"]) != n:
            raise SchemaError(f"{path}.unit", f"expected {n} entries")
        unit = {i: to_rational(x) for i, x in enumerate(a["unit"]) if to_rational(x)}
    return AlgebraPresentation(labels, products, unit=unit)


# ---------------------------------------------------------------------------
# serialization


def semigroup_payload(S: FiniteSemigroup) -> dict:
    return {"elements": list(S.labels), "table": [list(r) for r in S.table]}


def clifford_payload(D: DecompositionData) -> dict:
    L = D.shape
    return {
        "semilattice": semigroup_payload(L.underlying),
        "groups": {L.labels[e]: semigroup_payload(G) for e, G in enumerate(D.components)},
        "homs": {f"{L.labels[f]}<{L.labels[e]}": list(phi)
                 for (f, e), phi in sorted(D.transitions.items()) if f != e},
    }


def algebra_payload(A: AlgebraPresentation) -> dict:
    consts = []
    for i in range(A.dim):
        for j in range(A.dim):
            for k, c in sorted(A.products[i][j].items()):
                consts.append([i, j, k, rational_str(c)])
    out = {"dim": A.dim, "basis": list(A.basis_labels), "structure_constants": consts}
    if A.unit is not None:
        out["unit"] = [rational_str(A.unit.get(i, 0)) for i in range(A.dim)]
    return out


def diagram_payload(D: SemilatticeDiagram) -> dict:
    L = D.shape
    return {
        "semilattice": semigroup_payload(L.underlying),
        "algebras": {L.labels[e]: algebra_payload(A) for e, A in enumerate(D.algebras)},
        "transitions": {
            f"{L.labels[f]}<{L.labels[e]}": [[rational_str(x) for x in row] for row in m.to_dense()]
            for (f, e), m in sorted(D.transitions.items()) if f != e
        },
    }


def make_instance(kind: str, name: str, obj, source: str = "") -> InstanceFile:
    """Serialize a domain object and parse it back, so the result is validated."""
    if kind in ("semigroup", "band"):
        payload = semigroup_payload(obj)
    elif kind == "clifford":
        payload = clifford_payload(obj)
    elif kind == "semilattice-diagram":
        payload = diagram_payload(obj)
    else:
        raise SchemaError("$.kind", f"unknown kind {kind!r}")
    doc = {"kind": kind, "name": name, "source": source}
    doc.update(payload)
    return parse_instance(json.dumps(doc))
