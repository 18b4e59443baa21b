"""Slope (semi)stability verdicts with certificates.

Every verdict is either Undetermined or backed by at least one certificate:
exterior-power vanishing fed to Hoppe's criterion, a cited theorem with its
hypothesis checklist, a section lower bound, or a destabilizing subsheaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .chern import slope
from .cohomology.derive import ExteriorEvidence, MissingAssumption, derive_special_table, exterior_replay
from .monads import MonadExtension, MonadSpec, Twisted, dualize, validate
from .varieties import VarietyDescriptor

__all__ = [
    "STATUSES",
    "NormalizedTwist",
    "HoppeEvidence",
    "TheoremCitation",
    "SectionWitness",
    "SubobjectWitness",
    "StabilityVerdict",
    "WrongRoute",
    "normalize_twist",
    "hoppe_verdict",
    "instanton_verdict",
    "linear_verdict",
    "sections_obstruction",
    "special_verdict",
    "verdict",
    "replay_certificate",
]

STATUSES = ("Stable", "Semistable", "ProperlySemistable", "NotStable", "NotSemistable", "Undetermined")

RANK2 = "rank-2 torsion-free instanton sheaves are semistable"
RANK2_QUADRIC = "rank-2 torsion-free special sheaves with c1 = 0 on Q_n are semistable"
INSTANTON_BOUND = "locally-free instanton sheaves of rank r <= 2n-1 are semistable"
LINEAR_BOUND = "locally-free linear sheaves of rank r <= n with c1 != 0 are stable"
SPECIAL_BOUND = "locally-free special sheaves on Q_n: semistable if r <= 2n-1, c1 = 0; stable if r <= n, c1 != 0"
HOPPE = "Hoppe: H^0 of normalized exterior powers vanishes"
SECTIONS = "no stable instantons with r > (H-2)c"
CONJ_TF = "conjectured: torsion-free instanton sheaves of rank r <= n are semistable"
CONJ_REFLEXIVE = "expected: reflexive instanton sheaves of rank r <= n+1 are semistable"


class WrongRoute(ValueError):
    pass


@dataclass(frozen=True)
class NormalizedTwist:
    k_E: int
    normalized_c1: int


def normalize_twist(r: int, d: int) -> NormalizedTwist:
    """The unique k with -r+1 <= d + r k <= 0."""
    if r < 1:
        raise ValueError("rank must be positive")
    k = (-d) // r
    return NormalizedTwist(k, d + r * k)


@dataclass(frozen=True)
class HoppeEvidence:
    """H^0((wedge^q E)(t)) = 0 at the listed twist t for each q (None: gap)."""

    vanishing: tuple[tuple[int, int | None], ...]
    source: str = "exterior-power replay"

    @classmethod
    def from_mapping(cls, m: dict, source: str = "exterior-power replay") -> "HoppeEvidence":
        return cls(tuple(sorted(m.items())), source)

    def as_dict(self) -> dict[int, int | None]:
        return dict(self.vanishing)

    def to_json(self) -> dict:
        return {"kind": "HoppeEvidence", "source": self.source,
                "vanishing": {str(q): t for q, t in self.vanishing}}


@dataclass(frozen=True)
class TheoremCitation:
    theorem: str
    hypotheses: tuple[tuple[str, bool], ...]

    @property
    def satisfied(self) -> bool:
        return all(ok for _, ok in self.hypotheses)

    def to_json(self) -> dict:
        return {"kind": "TheoremCitation", "theorem": self.theorem,
                "hypotheses": {h: ok for h, ok in self.hypotheses}}


@dataclass(frozen=True)
class SectionWitness:
    """h^0(E) >= h0_lower > 0 while c1(E) <= 0."""

    h0_lower: int
    c1: int
    reason: str

    def to_json(self) -> dict:
        return {"kind": "SectionWitness", "h0_lower": self.h0_lower, "c1": self.c1, "reason": self.reason}


@dataclass(frozen=True)
class SubobjectWitness:
    sub: str
    mu_sub: Fraction
    mu_total: Fraction

    @property
    def strict(self) -> bool:
        return self.mu_sub > self.mu_total

    def to_json(self) -> dict:
        return {"kind": "SubobjectWitness", "sub": self.sub, "mu_sub": str(self.mu_sub),
                "mu_total": str(self.mu_total)}


@dataclass
class StabilityVerdict:
    status: str
    certificates: list = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)
    conjectures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status != "Undetermined" and not self.certificates:
            raise ValueError(f"{self.status} verdict without certificate")

    @property
    def is_stable(self) -> bool | None:
        if self.status == "Stable":
            return True
        if self.status in ("NotStable", "NotSemistable", "ProperlySemistable"):
            return False
        return None

    @property
    def is_semistable(self) -> bool | None:
        if self.status in ("Stable", "Semistable", "ProperlySemistable"):
            return True
        if self.status == "NotSemistable":
            return False
        return None

    @property
    def certificate(self):
        return self.certificates[0] if self.certificates else None

    @property
    def citations(self) -> list[str]:
        return [c.theorem for c in self.certificates if isinstance(c, TheoremCitation)]

    def find(self, kind: type):
        return next((c for c in self.certificates if isinstance(c, kind)), None)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "certificate": [c.to_json() for c in self.certificates],
            "assumptions": list(self.assumptions),
            "citations": self.citations,
            "conjectures": list(self.conjectures),
            "notes": list(self.notes),
        }


def _undetermined(note: str, assumptions=(), conjectures=()) -> StabilityVerdict:
    return StabilityVerdict("Undetermined", [], list(assumptions), list(conjectures), [note])


def normalized_exterior_twist(r: int, d: int, q: int) -> int:
    rank_q, c1_q = comb(r, q), comb(r - 1, q - 1) * d
    return normalize_twist(rank_q, c1_q).k_E


def hoppe_verdict(evidence, r: int, d: int) -> StabilityVerdict:
    """Hoppe's criterion on established vanishings H^0((wedge^q E)(t)) = 0.

    A vanishing at twist t also holds at every twist below t, so q passes the
    stable test when t >= the normalized twist of wedge^q E and the
    semistable test when t >= that twist minus one.
    """
    if isinstance(evidence, ExteriorEvidence):
        evidence = evidence.vanishing
    if isinstance(evidence, HoppeEvidence):
        evidence = evidence.as_dict()
    for q in evidence:
        if not 1 <= q <= r - 1:
            raise ValueError(f"evidence for q={q} outside 1..{r - 1}")
    stable = semistable = True
    for q in range(1, r):
        t = evidence.get(q)
        if t is None:
            return _undetermined(f"no vanishing established for q={q}")
        tq = normalized_exterior_twist(r, d, q)
        stable &= t >= tq
        semistable &= t >= tq - 1
    cert = [HoppeEvidence.from_mapping({q: evidence[q] for q in range(1, r)})]
    if stable:
        return StabilityVerdict("Stable", cert, ["locally free"])
    if semistable:
        return StabilityVerdict("Semistable", cert, ["locally free"])
    return _undetermined("vanishing twists too low for the normalized exterior powers")


def sections_obstruction(r: int, c: int, v: VarietyDescriptor) -> SectionWitness | None:
    """h^0(E) >= (r + 2c) - H c for a charge-c rank-r instanton, when positive."""
    if r < 2:
        return None
    bound = (r + 2 * c) - v.H * c
    if r > (v.H - 2) * c and bound > 0:
        return SectionWitness(bound, 0, f"H^0 beta: k^{r + 2 * c} -> k^{v.H * c} has a kernel")
    return None


def _combine_with_sections(base: StabilityVerdict, m: MonadSpec) -> StabilityVerdict:
    w = sections_obstruction(m.rank, m.c, m.variety)
    if w is None:
        return base
    certs = base.certificates + [w]
    if base.is_semistable:
        return StabilityVerdict("ProperlySemistable", certs, base.assumptions, base.conjectures, base.notes)
    if base.status == "NotSemistable":
        return base
    return StabilityVerdict("NotStable", certs, base.assumptions, base.conjectures, base.notes)


def instanton_verdict(m: MonadSpec, v: VarietyDescriptor | None = None, locally_free: bool = False,
                      torsion_free: bool = False, reflexive: bool = False) -> StabilityVerdict:
    v = v or m.variety
    validate(m)
    if not m.is_linear:
        raise WrongRoute("spinor monads go through special_verdict")
    if m.a != m.c:
        raise WrongRoute("c1 != 0: use linear_verdict")
    n, r = v.n, m.rank
    torsion_free = torsion_free or locally_free or reflexive
    assumptions = [s for s, on in (("locally free", locally_free), ("torsion free", torsion_free),
                                   ("reflexive", reflexive)) if on]
    conj = []
    if torsion_free and r <= n:
        conj.append(CONJ_TF)
    if reflexive and r <= n + 1:
        conj.append(CONJ_REFLEXIVE)
    if not v.vanishing_hypothesis:
        return _combine_with_sections(
            _undetermined("missing assumption: H^p(O(k)) = 0 for 1 <= p <= n-1", assumptions, conj), m)
    certs = []
    if locally_free and r <= 2 * n - 1:
        hv = hoppe_verdict(exterior_replay(m, v, locally_free=True), r, 0)
        if hv.is_semistable:
            certs += hv.certificates
            certs.append(TheoremCitation(INSTANTON_BOUND, (("locally free", True),
                                                           (f"r={r} <= 2n-1={2 * n - 1}", True))))
    if r == 2 and torsion_free:
        certs.append(TheoremCitation(RANK2, (("rank 2", True), ("torsion free", True))))
    base = StabilityVerdict("Semistable", certs, assumptions) if certs else None
    if base is None:
        reason = []
        if not locally_free:
            reason.append("locally-free not asserted")
        if r > 2 * n - 1:
            reason.append(f"r={r} > 2n-1")
        base = _undetermined("outside the proven range: " + (", ".join(reason) or "no certificate"),
                             assumptions, conj)
    return _combine_with_sections(base, m)


def linear_verdict(m: MonadSpec, v: VarietyDescriptor | None = None, locally_free: bool = False) -> StabilityVerdict:
    v = v or m.variety
    validate(m)
    if not m.is_linear:
        raise WrongRoute("spinor monads go through special_verdict")
    if m.c1 == 0:
        raise WrongRoute("c1 = 0: use instanton_verdict")
    n, r = v.n, m.rank
    assumptions = ["locally free"] if locally_free else []
    if not locally_free:
        return _undetermined("locally-free not asserted", assumptions)
    if r > n:
        return _undetermined(f"r={r} > n={n}", assumptions)
    if not v.vanishing_hypothesis:
        return _undetermined("missing assumption: H^p(O(k)) = 0 for 1 <= p <= n-1", assumptions)
    target = m if m.c1 > 0 else dualize(m)
    ev = exterior_replay(target, v, locally_free=True)
    hv = hoppe_verdict(ev, r, target.c1)
    if hv.status != "Stable":
        return _undetermined("exterior-power vanishing does not reach the normalized twists", assumptions)
    cite = TheoremCitation(LINEAR_BOUND, (("locally free", True), (f"r={r} <= n={n}", True),
                                          (f"c1={m.c1} != 0", True)))
    notes = [] if target is m else ["certified on the dual; (semi)stability is preserved by duality"]
    return StabilityVerdict("Stable", [cite] + hv.certificates, assumptions, [], notes)


def special_verdict(m: MonadSpec, v: VarietyDescriptor | None = None, locally_free: bool = False,
                    torsion_free: bool = False, c1: int | None = None) -> StabilityVerdict:
    """Verdicts for special sheaves on smooth quadrics.

    Linear (M1) monads are routed to the instanton / linear verdicts; spinor
    monads need ``c1`` from the caller.
    """
    v = v or m.variety
    if not v.is_quadric:
        raise ValueError("special sheaves live on smooth quadrics")
    validate(m)
    if m.is_linear:
        if m.c1 == 0:
            return instanton_verdict(m, v, locally_free, torsion_free)
        return linear_verdict(m, v, locally_free)
    n, r = v.n, m.rank
    torsion_free = torsion_free or locally_free
    assumptions = [s for s, on in (("locally free", locally_free), ("torsion free", torsion_free)) if on]
    if c1 is None:
        return _undetermined("c1 of a spinor monad must be supplied", assumptions)
    if r == 2 and c1 == 0 and torsion_free:
        table = derive_special_table(m, locally_free=locally_free).table("E")
        certs = [TheoremCitation(RANK2_QUADRIC, (("rank 2", True), ("torsion free", True), ("c1 = 0", True)))]
        if table.get(0, -1).is_zero:
            certs.append(HoppeEvidence.from_mapping({1: -1}, "special-monad vanishing table"))
        return StabilityVerdict("Semistable", certs, assumptions)
    if not locally_free:
        return _undetermined("locally-free not asserted", assumptions)
    if c1 == 0 and r <= 2 * n - 1:
        cite = TheoremCitation(SPECIAL_BOUND, (("locally free", True), (f"r={r} <= 2n-1", True), ("c1 = 0", True)))
        return StabilityVerdict("Semistable", [cite], assumptions)
    if c1 != 0 and r <= n:
        cite = TheoremCitation(SPECIAL_BOUND, (("locally free", True), (f"r={r} <= n", True), ("c1 != 0", True)))
        return StabilityVerdict("Stable", [cite], assumptions)
    return _undetermined("outside the proven range for special sheaves", assumptions)


def _is_trivial_line(m: MonadSpec) -> bool:
    return m.is_linear and (m.a, m.b, m.c) == (0, 1, 0)


def extension_verdict(e: MonadExtension, locally_free: bool = False) -> StabilityVerdict:
    """0 -> sub -> E -> quot -> 0: sub is a subsheaf of E whatever the extension class."""
    v = e.variety
    mu_sub = slope(e.sub.c1, e.sub.rank, v)
    mu = slope(e.c1, e.rank, v)
    assumptions = ["locally free"] if locally_free else []
    if _is_trivial_line(e.sub) and e.c1 <= 0:
        w = SectionWitness(1, e.c1, "O -> E from the extension")
        notes = []
        if e.c1 < 0:
            notes.append("c1 < 0, so the section also violates semistability")
        return StabilityVerdict("NotStable", [w, SubobjectWitness("O", mu_sub, mu)], assumptions, [], notes)
    w = SubobjectWitness(e.sub.label(), mu_sub, mu)
    if w.strict:
        return StabilityVerdict("NotSemistable", [w], assumptions)
    if mu_sub == mu:
        base = verdict(e.total, locally_free=locally_free)
        if base.is_semistable:
            return StabilityVerdict("ProperlySemistable", base.certificates + [w], assumptions)
        return StabilityVerdict("NotStable", [w], assumptions)
    return _undetermined("the subsheaf does not destabilize; the extension class is not recorded", assumptions)


def verdict(obj, locally_free: bool = False, torsion_free: bool = False, c1: int | None = None,
            reflexive: bool = False) -> StabilityVerdict:
    """Dispatch on monad specs, formal twists and extensions."""
    if isinstance(obj, Twisted):
        return verdict(obj.inner, locally_free, torsion_free, c1, reflexive)
    if isinstance(obj, MonadExtension):
        return extension_verdict(obj, locally_free)
    if not isinstance(obj, MonadSpec):
        raise TypeError(f"cannot decide stability of {type(obj).__name__}")
    if not obj.is_linear:
        return special_verdict(obj, locally_free=locally_free, torsion_free=torsion_free, c1=c1)
    if obj.c1 == 0:
        return instanton_verdict(obj, locally_free=locally_free, torsion_free=torsion_free, reflexive=reflexive)
    return linear_verdict(obj, locally_free=locally_free)


def replay_certificate(v: StabilityVerdict, m: MonadSpec) -> bool:
    """Re-derive every HoppeEvidence certificate from a fresh exterior-power replay."""
    for cert in v.certificates:
        if not isinstance(cert, HoppeEvidence) or cert.source != "exterior-power replay":
            continue
        target = m if m.c1 >= 0 else dualize(m)
        try:
            fresh = exterior_replay(target, locally_free=True)
        except MissingAssumption:
            return False
        for q, t in cert.vanishing:
            if fresh.vanishing.get(q) != t:
                return False
    return True
