"""Symbolic monad shapes, their validation, duals and display sequences."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .chern import KClass, kclass_of_monad, rank_and_c1
from .varieties import (
    KnownSheafId,
    VarietyDescriptor,
    spinor_rank,
    variety_from_json,
    variety_to_json,
)

__all__ = [
    "MonadError",
    "NonPositiveRank",
    "IllegalTermKind",
    "Unsupported",
    "MonadSpec",
    "MonadExtension",
    "Twisted",
    "linear",
    "validate",
    "dualize",
    "direct_sum",
    "Term",
    "SES",
    "DisplayDiagram",
    "display_sequences",
    "ExistenceVerdict",
    "existence_check",
    "charge_and_kind",
]

SHAPES = ("M1", "M2.1", "M2.2")


class MonadError(ValueError):
    pass


class NonPositiveRank(MonadError):
    pass


class IllegalTermKind(MonadError):
    pass


class Unsupported(MonadError):
    pass


@dataclass(frozen=True)
class MonadSpec:
    """left -> O^b -> O(l)^c with left = O(-l)^a (M1), S(-1)^a (M2.1) or
    S1(-1)^a + S2(-1)^a2 (M2.2)."""

    a: int
    b: int
    c: int
    variety: VarietyDescriptor
    shape: str = "M1"
    a2: int = 0

    @property
    def n(self) -> int:
        return self.variety.n

    @property
    def is_linear(self) -> bool:
        return self.shape == "M1"

    @property
    def left(self) -> list[tuple[KnownSheafId, int]]:
        if self.shape == "M1":
            return [(KnownSheafId("line", -self.variety.l), self.a)]
        if self.shape == "M2.1":
            return [(KnownSheafId("spinor", -1, variant="odd"), self.a)]
        return [(KnownSheafId("spinor", -1, variant="S1"), self.a),
                (KnownSheafId("spinor", -1, variant="S2"), self.a2)]

    @property
    def right(self) -> list[tuple[KnownSheafId, int]]:
        return [(KnownSheafId("line", self.variety.l), self.c)]

    @property
    def left_rank(self) -> int:
        if self.shape == "M1":
            return self.a
        return (self.a + self.a2) * spinor_rank(self.n)

    @property
    def rank(self) -> int:
        return self.b - self.left_rank - self.c

    @property
    def c1(self) -> int:
        if not self.is_linear:
            raise Unsupported("c1 of spinor summands is not computed")
        return rank_and_c1(self.a, self.b, self.c, self.variety.l)[1]

    def kclass(self) -> KClass:
        if self.is_linear:
            return kclass_of_monad(self.a, self.b, self.c, self.variety.l)
        opaque = {"S(-1)" if self.shape == "M2.1" else "S1(-1)": -self.a}
        if self.shape == "M2.2":
            opaque["S2(-1)"] = -self.a2
        return KClass.from_counter({0: self.b, self.variety.l: -self.c}, opaque)

    def label(self) -> str:
        if self.shape == "M2.2":
            return f"M2.2({self.a},{self.a2};{self.b},{self.c}) on {self.variety.name}"
        return f"{self.shape}({self.a},{self.b},{self.c}) on {self.variety.name}"

    def to_json(self, locally_free: bool | None = None) -> dict:
        out = {"shape": self.shape, "a": self.a, "b": self.b, "c": self.c,
               "variety": variety_to_json(self.variety)}
        if self.shape == "M2.2":
            out["a2"] = self.a2
        if locally_free is not None:
            out["locally_free"] = locally_free
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MonadSpec":
        shape = obj.get("shape", "M1")
        if shape not in SHAPES:
            raise MonadError(f"unknown monad shape {shape!r}")
        try:
            return cls(int(obj["a"]), int(obj["b"]), int(obj["c"]),
                       variety_from_json(obj["variety"]), shape, int(obj.get("a2", 0)))
        except KeyError as exc:
            raise MonadError(f"monad JSON is missing {exc}") from None


def linear(a: int, b: int, c: int, variety: VarietyDescriptor) -> MonadSpec:
    return MonadSpec(a, b, c, variety)


@dataclass(frozen=True)
class MonadExtension:
    """A sheaf E with 0 -> sub -> E -> quot -> 0, both ends given by monads.

    The total monad is the direct sum; the extension class is not recorded, so
    only invariants that are independent of it are derived from this object.
    """

    sub: MonadSpec
    quot: MonadSpec

    def __post_init__(self):
        if self.sub.variety != self.quot.variety:
            raise MonadError("extension of sheaves on different varieties")

    @property
    def total(self) -> MonadSpec:
        return direct_sum(self.sub, self.quot)

    @property
    def variety(self) -> VarietyDescriptor:
        return self.sub.variety

    @property
    def rank(self) -> int:
        return self.sub.rank + self.quot.rank

    @property
    def c1(self) -> int:
        return self.sub.c1 + self.quot.c1


@dataclass(frozen=True)
class Twisted:
    """A formal twist E(k) of a monad cohomology."""

    inner: object
    k: int


def validate(m: MonadSpec) -> MonadSpec:
    if m.shape not in SHAPES:
        raise IllegalTermKind(f"unknown shape {m.shape!r}")
    if min(m.a, m.b, m.c, m.a2) < 0:
        raise MonadError("multiplicities must be non-negative")
    v = m.variety
    if m.shape == "M1":
        if m.a2:
            raise IllegalTermKind("linear monads have a single left summand")
    else:
        if not v.is_quadric:
            raise IllegalTermKind(f"spinor terms need a quadric, got {v.name}")
        if m.shape == "M2.1" and v.n % 2 == 0:
            raise IllegalTermKind("M2.1 uses the spinor bundle of an odd-dimensional quadric")
        if m.shape == "M2.2" and v.n % 2 == 1:
            raise IllegalTermKind("M2.2 uses the spinor bundles of an even-dimensional quadric")
        if m.shape == "M2.1" and m.a2:
            raise IllegalTermKind("M2.1 has a single spinor summand")
    if m.rank < 1:
        raise NonPositiveRank(f"{m.label()} has rank {m.rank}")
    return m


def dualize(m: MonadSpec) -> MonadSpec:
    if not m.is_linear:
        raise Unsupported("duals of spinor monads are not covered")
    return replace(m, a=m.c, c=m.a)


def direct_sum(m1: MonadSpec, m2: MonadSpec) -> MonadSpec:
    if m1.variety != m2.variety:
        raise MonadError("direct sum of monads on different varieties")
    if m1.shape != m2.shape:
        raise Unsupported("direct sums of different shapes")
    return replace(m1, a=m1.a + m2.a, b=m1.b + m2.b, c=m1.c + m2.c, a2=m1.a2 + m2.a2)


# -- display sequences -------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """``mult`` copies of ``node`` twisted by ``shift`` relative to the sequence twist."""

    node: str
    mult: int = 1
    shift: int = 0


@dataclass(frozen=True)
class SES:
    """0 -> sub -> mid -> quot -> 0, holding for every twist k."""

    name: str
    sub: tuple[Term, ...]
    mid: tuple[Term, ...]
    quot: tuple[Term, ...]
    label: str = ""

    def nodes(self) -> set[str]:
        return {t.node for t in self.sub + self.mid + self.quot}


@dataclass
class DisplayDiagram:
    """Nodes are either known sheaves (``known``) or sheaves to be derived."""

    monad: MonadSpec
    known: dict[str, KnownSheafId]
    derived: dict[str, int | None]
    sequences: list[SES]
    locally_free: bool
    notes: dict[str, str] = field(default_factory=dict)

    def sequence(self, name: str) -> SES:
        for s in self.sequences:
            if s.name == name:
                return s
        raise KeyError(name)


def _terms(parts) -> tuple[Term, ...]:
    return tuple(Term(node, mult, shift) for node, mult, shift in parts if mult)


def display_sequences(m: MonadSpec, locally_free: bool = False) -> DisplayDiagram:
    """The two display sequences through K = ker(beta) and their duals.

    The dual of the second sequence is 0 -> E* -> K* -> left* -> Ext^1(E,O) -> 0;
    it is cut at I = im(left* map).  When ``locally_free`` the Ext node is zero.
    """
    validate(m)
    l = m.variety.l
    known = {"O": KnownSheafId("line")}
    left = []
    left_dual = []
    if m.shape == "M1":
        left.append(("O", m.a, -l))
        left_dual.append(("O", m.a, l))
    else:
        variants = [("odd", m.a)] if m.shape == "M2.1" else [("S1", m.a), ("S2", m.a2)]
        for variant, mult in variants:
            name = {"odd": "S", "S1": "S1", "S2": "S2"}[variant]
            known[name] = KnownSheafId("spinor", variant=variant)
            known[name + "*"] = KnownSheafId("spinor", variant=variant, dual=True)
            # S(-1) on the left; its dual is S*(1)
            left.append((name, mult, -1))
            left_dual.append((name + "*", mult, 1))
    rank_k = m.b - m.c
    derived = {"K": rank_k, "E": m.rank, "K*": rank_k, "E*": m.rank, "I": None, "Ext": None}
    seqs = [
        SES("ker1", _terms([("K", 1, 0)]), _terms([("O", m.b, 0)]), _terms([("O", m.c, l)]),
            "0 -> K(k) -> O(k)^b -> O(k+l)^c -> 0"),
        SES("ker2", _terms(left), _terms([("K", 1, 0)]), _terms([("E", 1, 0)]),
            "0 -> left(k) -> K(k) -> E(k) -> 0"),
        SES("ker1d", _terms([("O", m.c, -l)]), _terms([("O", m.b, 0)]), _terms([("K*", 1, 0)]),
            "0 -> O(k-l)^c -> O(k)^b -> K*(k) -> 0"),
        SES("ker2d", _terms([("E*", 1, 0)]), _terms([("K*", 1, 0)]), _terms([("I", 1, 0)]),
            "0 -> E*(k) -> K*(k) -> I(k) -> 0"),
        SES("ker2d-ext", _terms([("I", 1, 0)]), _terms(left_dual), _terms([("Ext", 1, 0)]),
            "0 -> I(k) -> left*(k) -> Ext^1(E,O)(k) -> 0"),
    ]
    notes = {"Ext": "support of Ext^1(E,O) equals the degeneration locus of alpha"}
    if locally_free:
        notes["Ext"] = "zero: E assumed locally free"
    if m.a == 0 and m.a2 == 0:
        notes["E"] = "left term vanishes: E = K"
    return DisplayDiagram(m, known, derived, seqs, locally_free, notes)


# -- existence and classification -------------------------------------------

@dataclass(frozen=True)
class ExistenceVerdict:
    status: str
    justification: str


def existence_check(m: MonadSpec, v: VarietyDescriptor | None = None) -> ExistenceVerdict:
    v = v or m.variety
    if not m.is_linear:
        raise Unsupported("existence is only tracked for linear monads")
    r, d = m.rank, m.c1
    if r < 1:
        return ExistenceVerdict("NotExists", "non-positive rank")
    if m.a == 0 and m.c == 0:
        return ExistenceVerdict("Exists", "trivial bundle O^r")
    if m.a == m.c and v.kind in ("Pn", "Qn") and r >= v.n - 1:
        src = "projective space" if v.kind == "Pn" else "smooth quadric"
        return ExistenceVerdict("Exists", f"instantons on {src} exist for r >= n-1 and every charge")
    if v.kind == "Qn":
        if d < 0 and r <= v.n - 1:
            return ExistenceVerdict("NotExists", "no linear sheaves on Q_n with r <= n-1 and c1 < 0")
        if d == 0 and r <= v.n - 2:
            return ExistenceVerdict("NotExists", "no linear sheaves on Q_n with r <= n-2 and c1 = 0")
    return ExistenceVerdict("Unknown", "no general existence criterion available")


def charge_and_kind(m: MonadSpec) -> dict:
    validate(m)
    if not m.is_linear:
        return {"rank": m.rank, "c1": None, "charge": None, "is_instanton": None,
                "is_linear_sheaf_candidate": False}
    inst = m.a == m.c
    return {
        "rank": m.rank,
        "c1": m.c1,
        "charge": m.c if inst else None,
        "is_instanton": inst,
        "is_linear_sheaf_candidate": True,
    }
