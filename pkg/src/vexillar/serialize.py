"""Deterministic JSON output with exactness tags."""
from __future__ import annotations

import json
from fractions import Fraction

__all__ = ["SCHEMA", "exact", "float_diagnostic", "dumps"]

SCHEMA = "vexillar-report/1"


def exact(x) -> dict:
    return {"value": str(Fraction(x)), "exactness": "exact"}


def float_diagnostic(x: float) -> dict:
    return {"value": float(x), "exactness": "float-diagnostic"}


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, default=_default, sort_keys=True, indent=2) + "\n"
