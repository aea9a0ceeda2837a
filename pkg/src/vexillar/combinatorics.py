"""Partitions, tableaux and bitableaux.

Tableaux are stored row by row, longest row first.  Columns are read
bottom-up from those rows, so column ``c`` of ``rows`` is
``[row[c] for row in rows if len(row) > c]``.  "Standard" follows the
convention used throughout the package: strictly increasing along columns,
non-decreasing along rows.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "Partition",
    "Tableau",
    "Bitableau",
    "transpose",
    "kappa_t",
    "standard_tableaux",
    "has_violation",
    "partitions_of",
]


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @property
    def degree(self) -> int:
        return sum(self.parts)

    @property
    def depth(self) -> int:
        return len(self.parts)

    def transpose(self) -> "Partition":
        return transpose(self)

    def kappa(self, t: int) -> int:
        return kappa_t(self, t)

    def to_json(self) -> list[int]:
        return list(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def _as_partition(mu) -> Partition:
    return mu if isinstance(mu, Partition) else Partition(tuple(mu))


def transpose(mu) -> Partition:
    """Column lengths of the Ferrers diagram."""
    mu = _as_partition(mu)
    if not mu.parts:
        return Partition()
    return Partition(tuple(sum(1 for p in mu.parts if p > c) for c in range(mu.parts[0])))


def kappa_t(mu, t: int) -> int:
    """Number of boxes in rows ``t, t+1, ...`` (1-based)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return sum(_as_partition(mu).parts[t - 1:])


def partitions_of(k: int, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of ``k`` with parts at most ``max_part``, largest first."""
    max_part = k if max_part is None else max_part

    def rec(rest: int, cap: int):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, cap), 0, -1):
            for tail in rec(rest - p, p):
                yield (p,) + tail

    for parts in rec(k, max_part):
        yield Partition(parts)


@dataclass(frozen=True)
class Tableau:
    shape: Partition
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        shape = _as_partition(self.shape)
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if tuple(len(r) for r in rows) != shape.parts:
            raise ValueError(f"rows {rows} do not fill shape {shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Tableau":
        return cls(Partition(tuple(len(r) for r in rows)), tuple(tuple(r) for r in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "Tableau":
        """Build from columns listed left to right, each read bottom-up."""
        height = max((len(c) for c in columns), default=0)
        rows = [[c[r] for c in columns if len(c) > r] for r in range(height)]
        return cls.from_rows(rows)

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        if not self.rows:
            return ()
        return tuple(tuple(r[c] for r in self.rows if len(r) > c) for c in range(len(self.rows[0])))

    def entry(self, i: int, j: int) -> int:
        """Entry at abscissa ``i`` (column) and ordinate ``j`` (row), 1-based."""
        return self.rows[j - 1][i - 1]

    def is_standard(self) -> bool:
        rows_ok = all(a <= b for r in self.rows for a, b in zip(r, r[1:]))
        cols_ok = all(a < b for c in self.columns for a, b in zip(c, c[1:]))
        return rows_ok and cols_ok

    def content(self) -> Counter:
        return Counter(x for r in self.rows for x in r)

    def max_entry(self) -> int:
        return max((x for r in self.rows for x in r), default=0)

    def to_json(self) -> dict:
        return {"shape": self.shape.to_json(), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, obj: dict) -> "Tableau":
        t = cls.from_rows(obj["rows"])
        if list(t.shape.parts) != list(obj["shape"]):
            raise ValueError("tableau rows disagree with declared shape")
        return t


@dataclass(frozen=True)
class Bitableau:
    left: Tableau
    right: Tableau

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ValueError("bitableau sides must share one shape")

    @property
    def shape(self) -> Partition:
        return self.left.shape

    def is_standard(self) -> bool:
        return self.left.is_standard() and self.right.is_standard()

    def content(self) -> tuple[Counter, Counter]:
        return self.left.content(), self.right.content()


def standard_tableaux(shape, max_entry: int) -> list[Tableau]:
    """All standard tableaux of ``shape`` with entries in ``1..max_entry``.

    Ordered lexicographically by the row-major entry sequence.
    """
    shape = _as_partition(shape)
    boxes = [(r, c) for r, length in enumerate(shape.parts) for c in range(length)]
    fill: dict[tuple[int, int], int] = {}
    out: list[Tableau] = []

    def rec(k: int) -> None:
        if k == len(boxes):
            out.append(Tableau(shape, tuple(tuple(fill[(r, c)] for c in range(n)) for r, n in enumerate(shape.parts))))
            return
        r, c = boxes[k]
        lo = 1
        if c > 0:
            lo = max(lo, fill[(r, c - 1)])
        if r > 0:
            lo = max(lo, fill[(r - 1, c)] + 1)
        for v in range(lo, max_entry + 1):
            fill[(r, c)] = v
            rec(k + 1)
        fill.pop((r, c), None)

    rec(0)
    return out


def has_violation(T: Tableau) -> bool:
    """Violation predicate for the orthogonal-group basis of Schur modules.

    A value ``v`` shared by two distinct columns triggers a violation when the
    number of smaller indices present in both columns is at least the number
    of smaller indices absent from both.
    """
    cols = [set(c) for c in T.columns]
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            for v in cols[a] & cols[b]:
                repeated = sum(1 for u in range(1, v) if u in cols[a] and u in cols[b])
                absent = sum(1 for u in range(1, v) if u not in cols[a] and u not in cols[b])
                if repeated >= absent:
                    return True
    return False
