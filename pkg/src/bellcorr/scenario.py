"""Scenario files: JSON documents describing one batch computation.

Validation is two-stage.  A JSON schema checks structure, types and simple
ranges (and rejects unknown keys); building the algebras and states then
catches the remaining domain errors.  Both stages report through
:class:`~bellcorr.errors.ScenarioError`, one message per offending field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

from .errors import BellcorrError, ScenarioError

TASKS = ("beta", "invariant", "cluster", "chain_curve", "verify_suite")

_num = {"type": "number"}
_int = {"type": "integer"}
_nonneg_int = {"type": "integer", "minimum": 0}
_pos_int = {"type": "integer", "minimum": 1}

_matrix = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}},
}


def _kind(name, props=None, required=()):
    props = dict(props or {})
    props["kind"] = {"const": name}
    return {
        "if": {"properties": {"kind": {"const": name}}, "required": ["kind"]},
        "then": {"properties": props, "required": ["kind", *required], "additionalProperties": False},
    }


_region = {
    "type": "object",
    "properties": {"start": _nonneg_int, "width": _pos_int},
    "required": ["start", "width"],
    "additionalProperties": False,
}

SCHEMA = {
    "$defs": {
        "matrix": _matrix,
        "state": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["singlet", "werner", "mixed", "product", "mixture",
                                             "random", "matrix", "tfim_ground"]}},
            "allOf": [
                _kind("singlet"),
                _kind("werner", {"w": {"type": "number", "minimum": 0, "maximum": 1}}, ["w"]),
                _kind("mixed", {"dim": _pos_int}, ["dim"]),
                _kind("product", {"factors": {"type": "array", "minItems": 1, "items": {
                    "anyOf": [{"$ref": "#/$defs/state"}, {"$ref": "#/$defs/matrix"}]}}}, ["factors"]),
                _kind("mixture", {
                    "weights": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
                    "states": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/state"}},
                }, ["weights", "states"]),
                _kind("random", {"dim": _pos_int, "seed": _nonneg_int, "rank": _pos_int}, ["dim", "seed"]),
                _kind("matrix", {"rho": {"$ref": "#/$defs/matrix"}}, ["rho"]),
                _kind("tfim_ground", {"N": _pos_int, "J": _num, "g": _num}, ["N", "J", "g"]),
            ],
        },
        "algebras": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "preset": {"enum": ["qubit_pair", "qutrit_pair", "diagonal_pair", "tfim"]},
                        "N": _pos_int, "J": _num, "g": _num,
                        "left": _region, "right": _region,
                    },
                    "required": ["preset"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "dim": _pos_int,
                        "A": {"type": "array", "items": {"$ref": "#/$defs/matrix"}},
                        "B": {"type": "array", "items": {"$ref": "#/$defs/matrix"}},
                    },
                    "required": ["dim", "A", "B"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"direct_sum": {"type": "array", "minItems": 1,
                                                  "items": {"$ref": "#/$defs/algebras"}}},
                    "required": ["direct_sum"],
                    "additionalProperties": False,
                },
            ]
        },
    },
    "type": "object",
    "properties": {
        "task": {"enum": list(TASKS)},
        "seed": _nonneg_int,
        "output": {"type": "string"},
        "optimizer": {
            "type": "object",
            "properties": {"restarts": _pos_int, "max_sweeps": _pos_int,
                           "tol": {"type": "number", "exclusiveMinimum": 0}, "seed": _nonneg_int},
            "additionalProperties": False,
        },
        "algebras": {"$ref": "#/$defs/algebras"},
        "pairs": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"id": {"type": "string"}, "algebras": {"$ref": "#/$defs/algebras"}},
                "required": ["id", "algebras"],
                "additionalProperties": False,
            },
        },
        "state": {"$ref": "#/$defs/state"},
        "invariant": {
            "type": "object",
            "properties": {
                "temperature": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": _pos_int, "gap_tol": {"type": "number", "exclusiveMinimum": 0},
                "step": {"type": "number", "exclusiveMinimum": 0}, "inf_max_iter": _pos_int,
            },
            "additionalProperties": False,
        },
        "sampler": {
            "type": "object",
            "properties": {"samples": _pos_int, "refinement_passes": _nonneg_int,
                           "floor": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
        "gamma": {"type": "number", "minimum": 0, "maximum": 1},
        "bounds": {
            "type": "object",
            "properties": {"m": {"type": "number", "exclusiveMinimum": 0},
                           "distances": {"type": "array", "minItems": 1,
                                         "items": {"type": "number", "minimum": 0}}},
            "required": ["m", "distances"],
            "additionalProperties": False,
        },
        "chain": {
            "type": "object",
            "properties": {"N": _pos_int, "J": _num, "g": _num},
            "required": ["N", "J", "g"],
            "additionalProperties": False,
        },
        "width": _pos_int,
        "separations": {"type": "array", "minItems": 1, "items": _nonneg_int},
    },
    "required": ["task", "seed"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"task": {"const": "beta"}}},
         "then": {"required": ["algebras", "state"]}},
        {"if": {"properties": {"task": {"const": "invariant"}}},
         "then": {"oneOf": [{"required": ["algebras"]}, {"required": ["pairs"]}]}},
        {"if": {"properties": {"task": {"const": "cluster"}}},
         "then": {"anyOf": [{"required": ["algebras", "state"]}, {"required": ["bounds"]}]}},
        {"if": {"properties": {"task": {"const": "chain_curve"}}},
         "then": {"required": ["chain", "width", "separations"]}},
    ],
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@dataclass
class Scenario:
    task: str
    seed: int
    data: dict = field(default_factory=dict)

    @property
    def output(self) -> str | None:
        return self.data.get("output")


def parse_scenario(text) -> Scenario:
    """Parse and validate a scenario document (bytes or str, UTF-8 JSON)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError([f"$: not UTF-8 ({exc.reason})"]) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"$: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise ScenarioError([f"{e.json_path}: {e.message}" for e in errors])
    scenario = Scenario(task=data["task"], seed=data["seed"], data=data)
    _check_domain(scenario)
    return scenario


def _check_domain(s: Scenario):
    """Build every algebra and state once so domain errors surface at parse time."""
    from .runner import build_algebras, build_state

    errors = []
    d = s.data

    def attempt(path, fn, *args):
        try:
            return fn(*args)
        except ScenarioError as exc:
            errors.extend(exc.errors)
        except BellcorrError as exc:
            errors.append(f"{path}: {exc}")
        except (KeyError, TypeError) as exc:
            errors.append(f"{path}: missing or malformed field {exc}")
        return None

    pair = attempt("$.algebras", build_algebras, d["algebras"]) if "algebras" in d else None
    for i, p in enumerate(d.get("pairs", [])):
        attempt(f"$.pairs[{i}].algebras", build_algebras, p["algebras"])
    state = None
    if "state" in d and d["state"]["kind"] != "tfim_ground":
        state = attempt("$.state", build_state, d["state"])
    if pair is not None and state is not None and state.dim != pair[0].dim:
        errors.append(f"$.state: dimension {state.dim} does not match the algebras' {pair[0].dim}")
    if s.task == "chain_curve":
        from .lattice import build_chain

        c = d["chain"]
        attempt("$.chain", build_chain, c["N"], c["J"], c["g"])
        if 2 * d["width"] + max(d["separations"]) > c["N"]:
            errors.append("$.separations: regions overflow the chain")
    if errors:
        raise ScenarioError(errors)
