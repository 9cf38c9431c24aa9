"""JSON schemas for command-line inputs (draft 2020-12)."""

from __future__ import annotations

SCHEMA_VERSION = "katofan/1"

_int_vec = {"type": "array", "items": {"type": "integer"}}
_rational = {"anyOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
_ext = {"anyOf": [_rational, {"const": "inf"}]}

MONOID = {
    "type": "object",
    "required": ["rank"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "rank": {"type": "integer", "minimum": 0},
        "generators": {"type": "array", "items": _int_vec},
        "torsion": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        "unit_rank": {"type": "integer", "minimum": 0},
    },
}

CONE = {
    "type": "object",
    "required": ["lattice_rank", "rays"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "lattice_rank": {"type": "integer", "minimum": 0},
        "rays": {"type": "array", "items": _int_vec},
        "lineality": {"type": "array", "items": _int_vec},
    },
}

TORIC_FAN = {
    "type": "object",
    "required": ["lattice_rank", "cones"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"const": "toric_fan"},
        "name": {"type": "string"},
        "lattice_rank": {"type": "integer", "minimum": 0},
        "cones": {"type": "array", "items": {"type": "array", "items": _int_vec}},
    },
}

KATO_FAN = {
    "type": "object",
    "required": ["kind", "points", "charts"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"const": "fan"},
        "name": {"type": "string"},
        "points": {
            "type": "array",
            "items": {"type": "object", "required": ["id", "stalk"], "properties": {"id": {"type": "string"}, "stalk": MONOID}},
        },
        "charts": {"type": "array", "items": {"type": "object", "required": ["id", "monoid", "closed_point"]}},
        "aliases": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

ATLAS = {
    "type": "object",
    "required": ["kind", "charts"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"const": "atlas"},
        "name": {"type": "string"},
        "charts": {
            "type": "array",
            "items": {"type": "object", "required": ["id", "monoid"], "properties": {"id": {"type": "string"}, "monoid": MONOID}},
        },
        "overlaps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "iso"],
                "properties": {
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "iso": {"type": "array", "items": _int_vec},
                },
            },
        },
    },
}

FAN_REF = {
    "anyOf": [
        {"type": "object", "required": ["builtin"], "properties": {"builtin": {"type": "string"}}},
        {"type": "object", "required": ["toric"], "properties": {"toric": {"type": "string"}}},
        TORIC_FAN,
        KATO_FAN,
        ATLAS,
    ]
}

POINT = {
    "type": "object",
    "required": ["fan", "open", "values"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "fan": {"anyOf": [{"type": "string"}, FAN_REF]},
        "open": {"type": "string"},
        "values": {"anyOf": [{"type": "array", "items": _ext}, {"type": "object", "additionalProperties": _ext}]},
    },
}

POLYNOMIAL = {
    "type": "object",
    "required": ["terms"],
    "properties": {"terms": {"type": "array", "items": {"type": "array", "prefixItems": [_int_vec, _rational], "minItems": 2, "maxItems": 2}}},
}

SERIES = {
    "type": "object",
    "properties": {
        "terms": {"type": "array", "items": {"type": "array", "prefixItems": [{"type": "integer", "minimum": 0}, _rational], "minItems": 2, "maxItems": 2}},
        "precision": {"type": ["integer", "null"], "minimum": 0},
    },
}

HYPERSURFACE_INPUT = {
    "type": "object",
    "required": ["fan", "polynomial"],
    "properties": {"schema": {"const": SCHEMA_VERSION}, "fan": FAN_REF, "polynomial": POLYNOMIAL},
}

TROP_POINT_INPUT = {
    "type": "object",
    "required": ["fan", "chart"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "fan": FAN_REF,
        "chart": {"type": "string"},
        "values": {"type": "array", "items": _ext},
        "series": {"type": "array", "items": SERIES},
        "polynomial": POLYNOMIAL,
    },
    "oneOf": [{"required": ["values"]}, {"required": ["series"]}],
}

DUALCX_INPUT = {
    "type": "object",
    "required": ["components"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "components": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "strata": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "divisors"],
                "properties": {
                    "label": {"type": "string"},
                    "divisors": {"type": "array", "items": {"type": "string"}},
                    "contained_in": {"type": "object", "additionalProperties": {"type": "string"}},
                },
            },
        },
    },
}
