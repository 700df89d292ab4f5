"""JSON input schemas and exact-number (de)serialisation.

Fan file::

    {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [0, 2]],
     "divisors": {"line": ["1", "0", "0"]}}

Real numbers are exact strings ``"p/q"``, ``{"rat": "p/q"}`` or
``{"quad": {"a": "p/q", "b": "p/q", "disc": D}}`` for a + b sqrt(D).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import InputError
from .fan import Fan, TorusDivisor
from .kernel import QuadReal, as_rat
from .pairs import ToricPair


class SchemaError(InputError):
    """An input error located at a JSON path."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message

    def to_json(self) -> dict:
        return {"error": "schema", "path": self.path, "message": self.detail}


class ParseError(InputError):
    def __init__(self, exc: json.JSONDecodeError, source: str):
        super().__init__(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}")
        self.line, self.column, self.offset, self.msg, self.source = exc.lineno, exc.colno, exc.pos, exc.msg, source

    def to_json(self) -> dict:
        return {
            "error": "json",
            "source": self.source,
            "line": self.line,
            "column": self.column,
            "offset": self.offset,
            "message": self.msg,
        }


def load_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc, str(path)) from None


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    if key not in obj:
        raise SchemaError(f"missing key {key!r}", path)
    return obj[key]


def parse_rat(x, path: str = "$"):
    if isinstance(x, dict) and "rat" in x:
        x = x["rat"]
    try:
        return as_rat(x)
    except InputError as exc:
        raise SchemaError(str(exc), path) from None


def parse_real(x, path: str = "$"):
    if isinstance(x, dict) and "quad" in x:
        q = x["quad"]
        try:
            return QuadReal(parse_rat(_require(q, "a", path + ".quad"), path + ".quad.a"),
                            parse_rat(_require(q, "b", path + ".quad"), path + ".quad.b"),
                            int(_require(q, "disc", path + ".quad")))
        except SchemaError:
            raise
        except (InputError, TypeError, ValueError) as exc:
            raise SchemaError(str(exc), path + ".quad") from None
    return parse_rat(x, path)


def parse_int_matrix(rows, path: str) -> list[list[int]]:
    if not isinstance(rows, list):
        raise SchemaError("expected a list", path)
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in row):
            raise SchemaError("expected a list of integers", f"{path}[{i}]")
        out.append(row)
    return out


def parse_fan(obj: dict, path: str = "$") -> Fan:
    rank = _require(obj, "rank", path)
    if not isinstance(rank, int) or rank < 1:
        raise SchemaError("rank must be a positive integer", path + ".rank")
    rays = parse_int_matrix(_require(obj, "rays", path), path + ".rays")
    cones = parse_int_matrix(_require(obj, "cones", path), path + ".cones")
    try:
        return Fan(rays, cones, rank)
    except InputError as exc:
        raise SchemaError(str(exc), path) from None


def parse_divisor(values, nrays: int, path: str) -> TorusDivisor:
    if not isinstance(values, list) or len(values) != nrays:
        raise SchemaError(f"expected {nrays} coefficients", path)
    return TorusDivisor(tuple(parse_rat(v, f"{path}[{i}]") for i, v in enumerate(values)))


def parse_divisors(obj: dict, fan: Fan, path: str = "$") -> dict[str, TorusDivisor]:
    raw = obj.get("divisors", {})
    if not isinstance(raw, dict):
        raise SchemaError("expected an object", path + ".divisors")
    return {name: parse_divisor(v, fan.nrays, f"{path}.divisors.{name}") for name, v in raw.items()}


def lookup_divisor(divisors: dict[str, TorusDivisor], name: str, fan: Fan) -> TorusDivisor:
    if name in divisors:
        return divisors[name]
    raise SchemaError(f"unknown divisor {name!r}", "$.divisors")


def make_pair(fan: Fan, divisors: dict[str, TorusDivisor], boundary: str, strict: bool = True) -> ToricPair:
    if boundary == "trivial":
        return ToricPair.trivial(fan)
    D = lookup_divisor(divisors, boundary, fan)
    try:
        return ToricPair(fan, D, strict=strict)
    except InputError as exc:
        raise SchemaError(str(exc), f"$.divisors.{boundary}") from None


def dumps(report: Any) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
