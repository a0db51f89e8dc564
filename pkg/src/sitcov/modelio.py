"""Read and write factor-model and requirements documents (UTF-8 JSON)."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Any, Union

import jsonschema

from .model import (CHANNELS, CONSTRAINT_KINDS, Constraint, Factor, FactorType,
                    NoiseFactorModel, SitcovError, StateDef, ValidationIssue,
                    validate)

REFERENCE_MODEL_RESOURCE = "reference_model.json"


class DocumentError(SitcovError):
    """Anything wrong with an input document."""


class DocumentSyntaxError(DocumentError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"line {line} column {col}: {message}")


class SchemaError(DocumentError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class ValidationFailed(DocumentError):
    def __init__(self, issues: list[ValidationIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class DuplicateRequirementId(DocumentError):
    def __init__(self, req_id: str):
        self.req_id = req_id
        super().__init__(f"requirement id {req_id!r} used more than once")


_STATE = {
    "type": "object",
    "required": ["label", "baseline"],
    "additionalProperties": False,
    "properties": {"label": {"type": "string"}, "baseline": {"type": "boolean"}},
}

_FACTOR = {
    "type": "object",
    "required": ["id", "name", "states"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "name": {"type": "string"},
        "states": {"type": "array", "items": _STATE},
        "channels": {"type": "array", "items": {"enum": list(CHANNELS)}},
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["model_name", "version", "types"],
    "additionalProperties": False,
    "properties": {
        "model_name": {"type": "string"},
        "version": {"type": "string"},
        "types": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "factors"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "factors": {"type": "array", "items": _FACTOR},
                },
            },
        },
        "constraints": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "source", "target"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": list(CONSTRAINT_KINDS)},
                    "source": {"type": "string"},
                    "target": {"type": "string"},
                    "description": {"type": "string"},
                },
            },
        },
    },
}

_POSITIVE = {"type": "integer", "minimum": 1}

REQUIREMENTS_SCHEMA = {
    "type": "object",
    "required": ["requirements"],
    "additionalProperties": False,
    "properties": {
        "requirements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "trigger", "component", "behaviour", "pods"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "trigger": {"type": "string"},
                    "component": {"type": "string"},
                    "behaviour": {"type": "string"},
                    "pods": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["type", "rows"],
                            "additionalProperties": False,
                            "properties": {
                                "type": {"type": "string"},
                                "label": {"type": "string", "minLength": 1},
                                "rows": {
                                    "oneOf": [
                                        {"const": "all"},
                                        {"type": "array", "items": _POSITIVE, "minItems": 1},
                                        {
                                            "type": "object",
                                            "required": ["range"],
                                            "additionalProperties": False,
                                            "properties": {
                                                "range": {
                                                    "type": "array",
                                                    "items": _POSITIVE,
                                                    "minItems": 2,
                                                    "maxItems": 2,
                                                },
                                            },
                                        },
                                    ],
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True)
class RowRange:
    lo: int
    hi: int


RowSpec = Union[str, tuple, RowRange]  # "all" | tuple of ints | RowRange


@dataclass(frozen=True)
class PodSelector:
    type_name: str
    rows: RowSpec
    label: str | None = None


@dataclass(frozen=True)
class RequirementSpec:
    id: str
    trigger: str
    component: str
    behaviour: str
    pods: tuple[PodSelector, ...]


def _load_json(data: bytes) -> Any:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentSyntaxError(f"invalid UTF-8 ({exc.reason})", 1, exc.start + 1) from exc
    if text.startswith("\ufeff"):
        text = text[1:]
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from exc


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _check_schema(doc: Any, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SchemaError(_json_path(err.absolute_path), err.message)


def model_from_dict(doc: dict) -> NoiseFactorModel:
    types = tuple(
        FactorType(
            name=t["name"],
            factors=tuple(
                Factor(
                    id=f["id"],
                    name=f["name"],
                    states=tuple(StateDef(s["label"], s["baseline"]) for s in f["states"]),
                    channels=frozenset(f["channels"]) if "channels" in f else None,
                )
                for f in t["factors"]
            ),
        )
        for t in doc["types"]
    )
    constraints = tuple(
        Constraint(c["kind"], c["source"], c["target"], c.get("description", ""))
        for c in doc.get("constraints", ())
    )
    return NoiseFactorModel(doc["model_name"], doc["version"], types, constraints)


def model_to_dict(model: NoiseFactorModel) -> dict:
    types = []
    for ftype in model.types:
        factors = []
        for f in ftype.factors:
            entry: dict[str, Any] = {
                "id": f.id,
                "name": f.name,
                "states": [{"label": s.label, "baseline": s.baseline} for s in f.states],
            }
            if f.channels is not None:
                entry["channels"] = [ch for ch in CHANNELS if ch in f.channels]
            factors.append(entry)
        types.append({"name": ftype.name, "factors": factors})
    return {
        "model_name": model.name,
        "version": model.version,
        "types": types,
        "constraints": [
            {"kind": c.kind, "source": c.source, "target": c.target, "description": c.description}
            for c in model.constraints
        ],
    }


def parse_model(data: bytes) -> NoiseFactorModel:
    """Parse a model document; raises on syntax, schema or validation problems."""
    doc = _load_json(data)
    _check_schema(doc, MODEL_SCHEMA)
    model = model_from_dict(doc)
    issues = validate(model)
    if issues:
        raise ValidationFailed(issues)
    return model


def dump_json(obj: Any) -> bytes:
    """Canonical JSON bytes: 2-space indent, UTF-8, LF, trailing newline."""
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def serialize_model(model: NoiseFactorModel) -> bytes:
    return dump_json(model_to_dict(model))


def _rows_from_json(rows) -> RowSpec:
    if rows == "all":
        return "all"
    if isinstance(rows, dict):
        return RowRange(*rows["range"])
    return tuple(rows)


def _rows_to_json(rows: RowSpec):
    if rows == "all":
        return "all"
    if isinstance(rows, RowRange):
        return {"range": [rows.lo, rows.hi]}
    return list(rows)


def parse_requirements(data: bytes) -> list[RequirementSpec]:
    doc = _load_json(data)
    _check_schema(doc, REQUIREMENTS_SCHEMA)
    specs = []
    seen = set()
    for ri, r in enumerate(doc["requirements"]):
        if r["id"] in seen:
            raise DuplicateRequirementId(r["id"])
        seen.add(r["id"])
        selectors = []
        for pi, p in enumerate(r["pods"]):
            rows = _rows_from_json(p["rows"])
            if isinstance(rows, RowRange) and rows.lo > rows.hi:
                raise SchemaError(_json_path(["requirements", ri, "pods", pi, "rows", "range"]),
                                  f"empty range {rows.lo}..{rows.hi}")
            selectors.append(PodSelector(p["type"], rows, p.get("label")))
        specs.append(RequirementSpec(r["id"], r["trigger"], r["component"],
                                     r["behaviour"], tuple(selectors)))
    return specs


def serialize_requirements(specs: list[RequirementSpec]) -> bytes:
    reqs = []
    for s in specs:
        pods = []
        for p in s.pods:
            entry: dict[str, Any] = {"type": p.type_name}
            if p.label is not None:
                entry["label"] = p.label
            entry["rows"] = _rows_to_json(p.rows)
            pods.append(entry)
        reqs.append({"id": s.id, "trigger": s.trigger, "component": s.component,
                     "behaviour": s.behaviour, "pods": pods})
    return dump_json({"requirements": reqs})


def reference_model_bytes() -> bytes:
    return resources.files("sitcov.data").joinpath(REFERENCE_MODEL_RESOURCE).read_bytes()


@lru_cache(maxsize=1)
def reference_model() -> NoiseFactorModel:
    """The bundled 22-factor automotive camera model (five P-Diagram types)."""
    return parse_model(reference_model_bytes())
