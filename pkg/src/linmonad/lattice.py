"""Dimension intervals [lo, hi] with hi possibly infinite."""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf


class Contradiction(Exception):
    """A cell was narrowed to an empty interval."""


@dataclass(frozen=True)
class DimRange:
    lo: int = 0
    hi: int | float = INF

    def __post_init__(self):
        if self.lo < 0:
            object.__setattr__(self, "lo", 0)
        if self.lo > self.hi:
            raise Contradiction(f"empty dimension range [{self.lo}, {self.hi}]")

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def is_zero(self) -> bool:
        return self.hi == 0

    @property
    def is_unknown(self) -> bool:
        return self.lo == 0 and self.hi == INF

    @property
    def value(self) -> int:
        if not self.is_exact:
            raise ValueError(f"{self} is not exact")
        return int(self.lo)

    def contains(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def meet(self, other: "DimRange") -> "DimRange":
        return DimRange(max(self.lo, other.lo), min(self.hi, other.hi))

    def __add__(self, other: "DimRange") -> "DimRange":
        return DimRange(self.lo + other.lo, self.hi + other.hi)

    def scale(self, m: int) -> "DimRange":
        if m == 0:
            return ZERO
        return DimRange(self.lo * m, self.hi * m)

    def __str__(self) -> str:
        if self.is_exact:
            return str(self.lo)
        hi = "inf" if self.hi == INF else str(self.hi)
        return f"[{self.lo},{hi}]"

    def to_json(self):
        return [self.lo, None if self.hi == INF else int(self.hi)]

    @classmethod
    def from_json(cls, obj) -> "DimRange":
        lo, hi = obj
        return cls(int(lo), INF if hi is None else int(hi))


def exact(x: int) -> DimRange:
    return DimRange(x, x)


ZERO = DimRange(0, 0)
UNKNOWN = DimRange(0, INF)


def floor_div(x, m: int):
    """floor(x / m) for m > 0, passing infinity through."""
    if x == INF:
        return INF
    return x // m


def ceil_div(x, m: int):
    if x == -INF:
        return -INF
    return -((-x) // m)
