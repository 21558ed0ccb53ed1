"""Lab config documents: defaults, schema validation and measure building.

A config is one JSON object::

    {"grid": {"n": 256, "product_n": 32}, "thresholds": {"k": 512},
     "seed": 7, "measures": {"x": {"variant": "three-point", "params": {}}},
     "trials": 100}

``measures`` maps role names to measure specs.  Product scenarios read
``x`` (the measure on X, integrated by ``rho``) and ``y`` (on Y, ``eta``);
panel scenarios run over every entry.
"""

from __future__ import annotations

import copy
import json

import jsonschema

from ..errors import ConfigInvalid
from ..measures import (DEFAULT_POINTS, MeasureSum, PointMass, Scaled, ThreePoint, TopMeasure,
                        corrupted, lebesgue)
from ..quasi import QuasiFunctional
from ..space import Grid, unit_square

DEFAULTS = {
    "grid": {"n": 256, "product_n": 32},
    "thresholds": {"k": 512},
    "seed": 7,
}

VARIANTS = ("lebesgue", "point-mass", "three-point", "scaled", "sum", "corrupted")

_point = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 8},
                "product_n": {"type": "integer", "minimum": 8},
            },
        },
        "thresholds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"k": {"type": "integer", "minimum": 8}},
        },
        "seed": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "scales": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                   "minItems": 1},
        "coefficients": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "measures": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {"$ref": "#/$defs/measure"},
        },
    },
    "$defs": {
        "measure": {
            "type": "object",
            "additionalProperties": False,
            "required": ["variant"],
            "properties": {
                "variant": {"enum": list(VARIANTS)},
                "params": {"type": "object"},
            },
            "allOf": [
                {"if": {"properties": {"variant": {"const": "point-mass"}}},
                 "then": {"properties": {"params": {
                     "additionalProperties": False,
                     "properties": {"location": _point,
                                    "weight": {"type": "number", "exclusiveMinimum": 0}}}}}},
                {"if": {"properties": {"variant": {"const": "three-point"}}},
                 "then": {"properties": {"params": {
                     "additionalProperties": False,
                     "properties": {"points": {"type": "array", "items": _point,
                                               "minItems": 3, "maxItems": 3}}}}}},
                {"if": {"properties": {"variant": {"const": "scaled"}}},
                 "then": {"required": ["params"], "properties": {"params": {
                     "additionalProperties": False, "required": ["c", "inner"],
                     "properties": {"c": {"type": "number", "exclusiveMinimum": 0},
                                    "inner": {"$ref": "#/$defs/measure"}}}}}},
                {"if": {"properties": {"variant": {"const": "sum"}}},
                 "then": {"required": ["params"], "properties": {"params": {
                     "additionalProperties": False, "required": ["terms"],
                     "properties": {"terms": {"type": "array", "minItems": 1,
                                              "items": {"$ref": "#/$defs/measure"}}}}}}},
                {"if": {"properties": {"variant": {"const": "corrupted"}}},
                 "then": {"properties": {"params": {
                     "additionalProperties": False,
                     "properties": {"cell": {"type": "array", "items": {"type": "integer"},
                                             "minItems": 2, "maxItems": 2},
                                    "value": {"type": "number"}}}}}},
                {"if": {"properties": {"variant": {"const": "lebesgue"}}},
                 "then": {"properties": {"params": {"additionalProperties": False}}}},
            ],
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _path(error) -> str:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts)


def validate(cfg: dict) -> dict:
    """Raise :class:`ConfigInvalid` at the deepest offending key."""
    errors = sorted(_VALIDATOR.iter_errors(cfg), key=lambda e: (-len(e.absolute_path), e.message))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise ConfigInvalid(best.message, _path(best))
    return cfg


def merge(base: dict, over: dict) -> dict:
    """Recursive dict merge; ``measures`` is replaced as a whole."""
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and key != "measures":
            out[key] = merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigInvalid(f"not valid JSON: {err}") from err
    except OSError as err:
        raise ConfigInvalid(f"cannot read config: {err}") from err
    if not isinstance(doc, dict):
        raise ConfigInvalid("config must be a JSON object")
    return validate(doc)


def build_measure(spec: dict, grid: Grid, path: str = "measures") -> TopMeasure:
    """A :class:`TopMeasure` on ``grid`` from a validated spec."""
    variant, params = spec["variant"], spec.get("params", {})
    if variant == "lebesgue":
        return lebesgue(grid)
    if variant == "point-mass":
        return PointMass(grid, tuple(params.get("location", (0.3, 0.6))), params.get("weight", 1.0))
    if variant == "three-point":
        pts = tuple(tuple(p) for p in params.get("points", DEFAULT_POINTS))
        return ThreePoint(grid, pts)
    if variant == "scaled":
        return Scaled(float(params["c"]), build_measure(params["inner"], grid, f"{path}.params.inner"))
    if variant == "sum":
        return MeasureSum(tuple(build_measure(t, grid, f"{path}.params.terms.{i}")
                                for i, t in enumerate(params["terms"])))
    if variant == "corrupted":
        cell = tuple(params.get("cell", (grid.n // 2, grid.n // 2)))
        if not all(0 <= c < grid.n for c in cell):
            raise ConfigInvalid(f"cell {cell} outside the {grid.n}x{grid.n} grid", f"{path}.params.cell")
        return corrupted(lebesgue(grid), cell, params.get("value", -0.05))
    raise ConfigInvalid(f"unknown variant {variant!r}", f"{path}.variant")


def functional(cfg: dict, role: str, grid: Grid) -> QuasiFunctional:
    try:
        spec = cfg["measures"][role]
    except KeyError:
        raise ConfigInvalid(f"scenario needs a measure named {role!r}", f"measures.{role}") from None
    return QuasiFunctional(build_measure(spec, grid, f"measures.{role}"), cfg["thresholds"]["k"])


def grids(cfg: dict) -> tuple[Grid, Grid]:
    """The ambient grid and the coarser grid used for X and Y in products."""
    return unit_square(cfg["grid"]["n"]), unit_square(cfg["grid"]["product_n"])
