"""JSON run reports.

Rationals are written as ``"p/q"`` strings so verdicts can be recomputed
exactly; high-precision reals (mpmath) are written with 30 significant digits.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

import mpmath
import numpy as np

from .graph import Graph
from .walks import Capped

SCHEMA_VERSION = "1.0.0"


def to_jsonable(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, 30)
    if isinstance(obj, Capped):
        return repr(obj)
    if isinstance(obj, Graph):
        return {"n": obj.n, "num_edges": obj.num_edges,
                "degree_min": obj.degree_min, "degree_max": obj.degree_max}
    if isinstance(obj, (set, frozenset)):
        return sorted(int(v) for v in obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        # expose commonly used derived flags
        for prop in ("certified", "holds", "length", "size", "capped"):
            attr = getattr(type(obj), prop, None)
            if isinstance(attr, property):
                out[prop] = to_jsonable(getattr(obj, prop))
        return out
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def verdict(claim_id: str, holds: bool, lhs=None, rhs=None) -> dict:
    return {"claim_id": claim_id, "holds": bool(holds), "lhs": to_jsonable(lhs),
            "rhs": to_jsonable(rhs)}


@dataclasses.dataclass
class RunReport:
    tool_version: str
    input: str
    command: str
    parameters: dict
    backend: str | None
    threads: int
    wall_time_ms: int | None
    result: object
    verdicts: list

    @property
    def ok(self) -> bool:
        return all(v["holds"] for v in self.verdicts)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "input": self.input,
            "command": self.command,
            "parameters": to_jsonable(self.parameters),
            "backend": self.backend,
            "threads": self.threads,
            "wall_time_ms": self.wall_time_ms,
            "result": to_jsonable(self.result),
            "verdicts": self.verdicts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
