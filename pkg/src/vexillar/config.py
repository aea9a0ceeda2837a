"""Run-time budgets and knobs shared by the library entry points and the CLI."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

__all__ = ["Config"]


@dataclass(frozen=True)
class Config:
    max_group_order: int = 10 ** 6
    node_budget: int = 50_000_000
    c_matrix_cap: int = 50_000
    lp_cap: int = 2_000
    threads: int = 1
    seed: int = 0
    float_tolerance: float = 1e-12

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name != "seed" and not v > 0:
                raise ValueError(f"{f.name} must be positive, got {v}")

    def with_overrides(self, **kw) -> "Config":
        vals = asdict(self)
        vals.update({k: v for k, v in kw.items() if v is not None})
        return Config(**vals)

    @classmethod
    def from_file(cls, path) -> "Config":
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        return asdict(self)
