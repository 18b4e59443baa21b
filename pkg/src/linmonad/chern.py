"""Truncated Chern series in the class of the ample generator, Grothendieck
group classes of sums of line bundles, Euler characteristics and slopes.

Everything here is exact: coefficients are Fractions, multiplicities ints.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .varieties import VarietyDescriptor, chi_line_bundle

__all__ = [
    "ChernSeries",
    "KClass",
    "NoOracle",
    "chern_of_monad",
    "rank_and_c1",
    "kclass_of_monad",
    "kclass_tensor",
    "chi_of_kclass",
    "chi_tensor_display_chain",
    "slope",
    "exterior_c1",
]


class NoOracle(ValueError):
    """Euler characteristic requested for a class with opaque summands."""


@dataclass(frozen=True)
class ChernSeries:
    """Polynomial c_0 + c_1 x + ... + c_n x^n modulo x^(n+1)."""

    n: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)[: self.n + 1]
        cs = cs + (Fraction(0),) * (self.n + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def one(cls, n: int) -> "ChernSeries":
        return cls(n, (1,))

    @classmethod
    def linear(cls, n: int, a: int) -> "ChernSeries":
        """Total Chern class 1 + a x of a line bundle."""
        return cls(n, (1, a))

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __mul__(self, other: "ChernSeries") -> "ChernSeries":
        if other.n != self.n:
            raise ValueError("truncation degrees differ")
        out = [Fraction(0)] * (self.n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(self.n + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return ChernSeries(self.n, tuple(out))

    def inverse(self) -> "ChernSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv = [Fraction(0)] * (self.n + 1)
        inv[0] = 1 / c0
        for k in range(1, self.n + 1):
            s = sum(self.coeffs[i] * inv[k - i] for i in range(1, k + 1))
            inv[k] = -s / c0
        return ChernSeries(self.n, tuple(inv))

    def __pow__(self, e: int) -> "ChernSeries":
        if e < 0:
            return self.inverse() ** (-e)
        result, base = ChernSeries.one(self.n), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    @property
    def c1(self) -> Fraction:
        return self.coeffs[1] if self.n >= 1 else Fraction(0)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, obj: list[str]) -> "ChernSeries":
        return cls(len(obj) - 1, tuple(Fraction(c) for c in obj))

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("l" if i == 1 else f"l^{i}")
            if i and c == 1:
                parts.append(mono)
            elif i and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{mono}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def rank_and_c1(a: int, b: int, c: int, l: int = 1) -> tuple[int, int]:
    """Rank and first Chern class (in units of O_X(1)) of the cohomology of
    O(-l)^a -> O^b -> O(l)^c."""
    return b - a - c, (a - c) * l


def chern_of_monad(a: int, b: int, c: int, v: VarietyDescriptor) -> ChernSeries:
    """Total Chern class of the monad cohomology, in powers of h = c1(O_X(1))."""
    r, _ = rank_and_c1(a, b, c, v.l)
    if r <= 0:
        raise ValueError(f"monad ({a},{b},{c}) has non-positive rank {r}")
    n = v.n
    down = ChernSeries.linear(n, -v.l) ** a
    up = ChernSeries.linear(n, v.l) ** c
    return (down * up).inverse()


@dataclass(frozen=True)
class KClass:
    """Formal Z-combination of twists O(k), plus opaque named summands."""

    terms: tuple[tuple[int, int], ...] = ()
    opaque: tuple[tuple[str, int], ...] = ()

    @classmethod
    def from_counter(cls, terms, opaque=None) -> "KClass":
        t = tuple(sorted((k, m) for k, m in Counter(terms).items() if m))
        o = tuple(sorted((s, m) for s, m in Counter(opaque or {}).items() if m))
        return cls(t, o)

    @classmethod
    def line(cls, k: int, mult: int = 1) -> "KClass":
        return cls.from_counter({k: mult})

    def as_counter(self) -> Counter:
        return Counter(dict(self.terms))

    def __add__(self, other: "KClass") -> "KClass":
        t = self.as_counter()
        t.update(dict(other.terms))
        o = Counter(dict(self.opaque))
        o.update(dict(other.opaque))
        return KClass.from_counter(t, o)

    def __neg__(self) -> "KClass":
        return KClass.from_counter({k: -m for k, m in self.terms}, {s: -m for s, m in self.opaque})

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def scale(self, m: int) -> "KClass":
        return KClass.from_counter({k: m * x for k, x in self.terms}, {s: m * x for s, x in self.opaque})

    def twist(self, k: int) -> "KClass":
        if self.opaque:
            raise NoOracle("cannot twist opaque summands")
        return KClass.from_counter({j + k: m for j, m in self.terms})

    @property
    def rank(self) -> int:
        if self.opaque:
            raise NoOracle("rank of opaque summands is not tracked")
        return sum(m for _, m in self.terms)

    @property
    def c1(self) -> int:
        if self.opaque:
            raise NoOracle("c1 of opaque summands is not tracked")
        return sum(k * m for k, m in self.terms)


def kclass_of_monad(a: int, b: int, c: int, l: int = 1) -> KClass:
    return KClass.from_counter({0: b, -l: -a, l: -c})


def kclass_tensor(x: KClass, y: KClass) -> KClass:
    if x.opaque or y.opaque:
        raise NoOracle("tensor products with opaque summands are not supported")
    out: Counter = Counter()
    for j, m in x.terms:
        for k, n in y.terms:
            out[j + k] += m * n
    return KClass.from_counter(out)


def chi_of_kclass(x: KClass, v: VarietyDescriptor) -> int:
    if x.opaque:
        raise NoOracle("no oracle for opaque summands " + ", ".join(s for s, _ in x.opaque))
    return sum(m * chi_line_bundle(v, k) for k, m in x.terms)


def chi_tensor_display_chain(a: int, b: int, c: int, v: VarietyDescriptor) -> int:
    """chi(F (x) F) for the monad cohomology F, through the display sequences:
    chi(F(x)F) = chi(K(x)F) - a chi(F(-l)) and chi(K(x)F) = b chi(F) - c chi(F(l))."""
    l = v.l

    def chi_f(k: int) -> int:
        return b * chi_line_bundle(v, k) - a * chi_line_bundle(v, k - l) - c * chi_line_bundle(v, k + l)

    chi_kf = b * chi_f(0) - c * chi_f(l)
    return chi_kf - a * chi_f(-l)


def slope(c1_units: int, rank: int, v: VarietyDescriptor) -> Fraction:
    """mu = c1 . h^(n-1) / rank with c1 in units of h = c1(O_X(1)) and
    degree = h^n."""
    if rank < 1:
        raise ValueError("slope needs positive rank")
    return Fraction(c1_units * v.degree, rank)


def exterior_c1(rank: int, c1: int, q: int) -> tuple[int, int]:
    """Rank and c1 of the q-th exterior power."""
    return comb(rank, q), comb(rank - 1, q - 1) * c1
