"""JSON file formats for parameters, canonicalisation records and paths.

Parameter::

    {"n": 1, "m": 1, "h": 2,
     "units": [{"a": [1.0], "b": [2.0], "c": 0.5}, ...],
     "d": [0.0]}

Floats are written with Python's shortest round-trip repr, so a parameter
survives a write/read cycle bit-exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .canonical import CanonicalisationRecord
from .core import Parameter, Shape
from .errors import FormatError, ShapeError
from .paths import PiecewiseLinearPath

__all__ = [
    "parameter_to_dict",
    "parameter_from_dict",
    "record_to_dict",
    "path_to_dict",
    "path_from_dict",
    "dumps",
    "write_json",
    "read_json",
    "load_parameter",
    "load_path",
]


def _floats(v: np.ndarray) -> list[float]:
    return [float(x) for x in v]


def parameter_to_dict(w: Parameter) -> dict[str, Any]:
    n, m, h = w.shape.n, w.shape.m, w.shape.h
    return {
        "n": n,
        "m": m,
        "h": h,
        "units": [{"a": _floats(u.a), "b": _floats(u.b), "c": float(u.c)} for u in w.units],
        "d": _floats(w.d),
    }


def _int_field(data: dict, name: str) -> int:
    if name not in data:
        raise FormatError(f"missing field {name!r}")
    value = data[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"field {name!r} must be an integer")
    return value


def _vector(value: Any, length: int, name: str) -> list[float]:
    if not isinstance(value, list) or len(value) != length:
        raise FormatError(f"field {name!r} must be a list of {length} numbers")
    return [_number(x, name) for x in value]


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"field {name!r} must contain numbers")
    value = float(value)
    if not math.isfinite(value):
        raise FormatError(f"field {name!r} must be finite")
    return value


def parameter_from_dict(data: Any) -> Parameter:
    if not isinstance(data, dict):
        raise FormatError("parameter must be a JSON object")
    n, m, h = (_int_field(data, k) for k in ("n", "m", "h"))
    try:
        shape = Shape(n, m, h)
    except ShapeError as exc:
        raise FormatError(str(exc)) from exc
    for name in ("units", "d"):
        if name not in data:
            raise FormatError(f"missing field {name!r}")
    units = data["units"]
    if not isinstance(units, list) or len(units) != h:
        raise FormatError(f"field 'units' must be a list of {h} units")
    a = np.zeros((h, m))
    b = np.zeros((h, n))
    c = np.zeros(h)
    for i, unit in enumerate(units):
        if not isinstance(unit, dict):
            raise FormatError(f"units[{i}] must be an object")
        for key in ("a", "b", "c"):
            if key not in unit:
                raise FormatError(f"missing field 'units[{i}].{key}'")
        a[i] = _vector(unit["a"], m, f"units[{i}].a")
        b[i] = _vector(unit["b"], n, f"units[{i}].b")
        c[i] = _number(unit["c"], f"units[{i}].c")
    d = _vector(data["d"], m, "d")
    return Parameter(a, b, c, d)


def record_to_dict(record: CanonicalisationRecord) -> dict[str, Any]:
    return {
        "canonical": parameter_to_dict(record.canonical),
        "zeroed": sorted(record.zeroed),
        "signs": list(record.signs),
        "permutation": list(record.permutation),
    }


def path_to_dict(path: PiecewiseLinearPath, reference: Parameter) -> dict[str, Any]:
    return {
        "reference": parameter_to_dict(reference),
        "waypoints": [parameter_to_dict(wp) for wp in path.waypoints],
    }


def path_from_dict(data: Any) -> tuple[PiecewiseLinearPath, Parameter]:
    if not isinstance(data, dict):
        raise FormatError("path file must be a JSON object")
    for name in ("reference", "waypoints"):
        if name not in data:
            raise FormatError(f"missing field {name!r}")
    reference = parameter_from_dict(data["reference"])
    if not isinstance(data["waypoints"], list) or not data["waypoints"]:
        raise FormatError("field 'waypoints' must be a non-empty list")
    waypoints = tuple(parameter_from_dict(wp) for wp in data["waypoints"])
    try:
        path = PiecewiseLinearPath(waypoints)
    except ShapeError as exc:
        raise FormatError(f"field 'waypoints': {exc}") from exc
    return path, reference


def dumps(data: Any) -> str:
    return json.dumps(data, allow_nan=False) + "\n"


def write_json(data: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(data))


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def load_parameter(path: str | Path) -> Parameter:
    return parameter_from_dict(read_json(path))


def load_path(path: str | Path) -> tuple[PiecewiseLinearPath, Parameter]:
    return path_from_dict(read_json(path))
