"""Cyclic varieties and exact cohomology oracles for the sheaves the engine
treats as known: line bundles, twisted differential forms on P^n and spinor
bundles on smooth quadrics.

Twists are always measured in the generator O_X(1) of Pic(X) = Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import DimRange, UNKNOWN, ZERO, exact

__all__ = [
    "VarietyDescriptor",
    "KnownSheafId",
    "projective_space",
    "quadric",
    "custom_variety",
    "parse_variety_token",
    "variety_from_json",
    "variety_to_json",
    "h_line_bundle",
    "chi_line_bundle",
    "bott_forms",
    "spinor_cohomology",
    "spinor_dual_cohomology",
    "spinor_rank",
    "known_cohomology",
    "SPINOR_TOP_NOTE",
    "default_window",
]

# The top-degree spinor vanishing is taken literally: H^n(S(k)) = 0 for k >= n.
# Serre duality together with H^0(S(j)) = 0 for j <= -1 points to k >= -n
# instead, so the literal range is likely a sign slip; callers may override
# it via ``top_from``.
SPINOR_TOP_NOTE = "spinor H^n vanishing taken literally (k >= n); Serre duality suggests k >= -n"


@dataclass(frozen=True)
class VarietyDescriptor:
    name: str
    n: int
    l: int = 1
    lam: int = -1
    degree: int = 1
    h0L: int = 2
    vanishing_hypothesis: bool = True
    kind: str = "custom"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be positive, got {self.n}")
        if self.degree < 1:
            raise ValueError(f"degree must be positive, got {self.degree}")
        if self.l < 1:
            raise ValueError(f"ample generator twist must be positive, got {self.l}")
        if self.h0L < 1:
            raise ValueError(f"h0(L) must be positive, got {self.h0L}")

    @property
    def H(self) -> int:
        return self.h0L

    @property
    def is_projective_space(self) -> bool:
        return self.kind == "Pn"

    @property
    def is_quadric(self) -> bool:
        return self.kind == "Qn"

    def token(self) -> str:
        if self.kind in ("Pn", "Qn"):
            return f"{self.kind}:{self.n}"
        return self.name


def projective_space(n: int) -> VarietyDescriptor:
    return VarietyDescriptor(f"P{n}", n, l=1, lam=-n - 1, degree=1, h0L=n + 1, kind="Pn")


def quadric(n: int) -> VarietyDescriptor:
    if n < 3:
        raise ValueError("smooth quadrics are cyclic only for n >= 3")
    return VarietyDescriptor(f"Q{n}", n, l=1, lam=-n, degree=2, h0L=n + 2, kind="Qn")


def custom_variety(n, l, lam, degree, h0L, vanishing_hypothesis=True, name="X") -> VarietyDescriptor:
    return VarietyDescriptor(name, n, l=l, lam=lam, degree=degree, h0L=h0L,
                             vanishing_hypothesis=vanishing_hypothesis, kind="custom")


def parse_variety_token(token: str) -> VarietyDescriptor:
    """Parse ``Pn:4`` or ``Qn:3``."""
    try:
        kind, n = token.split(":")
        n = int(n)
    except ValueError:
        raise ValueError(f"bad variety token {token!r}; expected Pn:<n> or Qn:<n>") from None
    if kind == "Pn":
        return projective_space(n)
    if kind == "Qn":
        return quadric(n)
    raise ValueError(f"unknown variety kind {kind!r}")


def variety_from_json(obj: dict) -> VarietyDescriptor:
    kind = obj.get("type")
    if kind == "Pn":
        return projective_space(int(obj["n"]))
    if kind == "Qn":
        return quadric(int(obj["n"]))
    if kind == "custom":
        return custom_variety(
            int(obj["n"]), int(obj.get("l", 1)), int(obj["lambda"]), int(obj["degree"]),
            int(obj["H"]), bool(obj.get("vanishing_hypothesis", True)), obj.get("name", "X"),
        )
    raise ValueError(f"unknown variety type {kind!r}")


def variety_to_json(v: VarietyDescriptor) -> dict:
    if v.kind in ("Pn", "Qn"):
        return {"type": v.kind, "n": v.n}
    return {"type": "custom", "name": v.name, "n": v.n, "l": v.l, "lambda": v.lam,
            "degree": v.degree, "H": v.h0L, "vanishing_hypothesis": v.vanishing_hypothesis}


@dataclass(frozen=True)
class KnownSheafId:
    """A sheaf with a cohomology oracle, twisted by O_X(twist).

    kind is ``line``, ``form`` (Omega^p on P^n) or ``spinor``; spinor variants are
    ``odd`` (n odd) and ``S1``/``S2`` (n even).  ``dual`` selects the dual spinor.
    """

    kind: str
    twist: int = 0
    p: int | None = None
    variant: str | None = None
    dual: bool = False

    def twisted(self, k: int) -> "KnownSheafId":
        return KnownSheafId(self.kind, self.twist + k, self.p, self.variant, self.dual)

    def check(self, v: VarietyDescriptor) -> None:
        if self.kind == "line":
            return
        if self.kind == "form":
            if not v.is_projective_space:
                raise ValueError("form twists are only available on P^n")
            if self.p is None or not 0 <= self.p <= v.n:
                raise ValueError(f"form degree must lie in [0, {v.n}]")
            return
        if self.kind == "spinor":
            if not v.is_quadric:
                raise ValueError("spinor bundles live on quadrics")
            _check_parity(v.n, self.variant)
            return
        raise ValueError(f"unknown sheaf kind {self.kind!r}")

    def rank(self, v: VarietyDescriptor) -> int:
        self.check(v)
        if self.kind == "line":
            return 1
        if self.kind == "form":
            return math.comb(v.n, self.p)
        return spinor_rank(v.n)

    def label(self) -> str:
        tw = f"({self.twist})" if self.twist else ""
        if self.kind == "line":
            return f"O{tw or '(0)'}"
        if self.kind == "form":
            return f"Omega^{self.p}{tw}"
        name = {"odd": "S", "S1": "S1", "S2": "S2"}[self.variant]
        return f"{name}{'*' if self.dual else ''}{tw}"


def _check_parity(n: int, variant: str | None) -> None:
    if variant == "odd":
        if n % 2 == 0:
            raise ValueError(f"the single spinor bundle exists for odd n, got n={n}")
    elif variant in ("S1", "S2"):
        if n % 2 == 1:
            raise ValueError(f"spinor bundles S1, S2 exist for even n, got n={n}")
    else:
        raise ValueError(f"unknown spinor variant {variant!r}")


def _check_degree(n: int, q: int) -> None:
    if not 0 <= q <= n:
        raise ValueError(f"cohomological degree {q} outside [0, {n}]")


def _binom_poly(n: int, k: int) -> int:
    """binomial(n + k, n) as a polynomial in k, i.e. chi(O_{P^n}(k))."""
    num = 1
    for i in range(1, n + 1):
        num *= k + i
    return num // math.factorial(n)


def _h0_pn(n: int, k: int) -> int:
    return math.comb(n + k, n) if k >= 0 else 0


def _h0_qn(n: int, k: int) -> int:
    # 0 -> O_{P^{n+1}}(k-2) -> O_{P^{n+1}}(k) -> O_Q(k) -> 0 on global sections
    return _h0_pn(n + 1, k) - _h0_pn(n + 1, k - 2)


def h_line_bundle(v: VarietyDescriptor, q: int, k: int) -> DimRange:
    n = v.n
    _check_degree(n, q)
    if v.kind == "Pn":
        if q == 0:
            return exact(_h0_pn(n, k))
        if q == n:
            return exact(_h0_pn(n, -k - n - 1))
        return ZERO
    if v.kind == "Qn":
        if q == 0:
            return exact(_h0_qn(n, k))
        if q == n:
            return exact(_h0_qn(n, -k - n))
        return ZERO
    # User-defined: only the vanishing that follows from the hypothesis and
    # Kodaira/Serre.
    if q == 0 and k <= -1:
        return ZERO
    if q == n and q > 0 and k >= v.lam + 1:
        return ZERO
    if 1 <= q <= n - 1:
        if v.vanishing_hypothesis or k <= -1 or k >= v.lam + 1:
            return ZERO
    return UNKNOWN


def chi_line_bundle(v: VarietyDescriptor, k: int) -> int:
    if v.kind == "Pn":
        return _binom_poly(v.n, k)
    if v.kind == "Qn":
        return _binom_poly(v.n + 1, k) - _binom_poly(v.n + 1, k - 2)
    total = 0
    for q in range(v.n + 1):
        h = h_line_bundle(v, q, k)
        if not h.is_exact:
            raise ValueError(f"no oracle for h^{q}(O({k})) on {v.name}")
        total += (-1) ** q * h.lo
    return total


def bott_forms(n: int, q: int, p: int, k: int) -> int:
    """h^q(P^n, Omega^p(k))."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= p <= n:
        raise ValueError(f"form degree {p} outside [0, {n}]")
    _check_degree(n, q)
    if q == 0:
        if p == 0:
            return _h0_pn(n, k)
        if k > p:
            return math.comb(k + n - p, k) * math.comb(k - 1, p)
        return 0
    if q == n:
        return bott_forms(n, 0, n - p, -k)
    return 1 if (q == p and k == 0) else 0


def spinor_rank(n: int) -> int:
    return 2 ** ((n - 1) // 2)


def spinor_cohomology(n: int, variant: str, q: int, k: int, *, top_from: int | None = None) -> DimRange:
    """Zero exactly on the three vanishing ranges known for spinor bundles.

    ``top_from`` is the first twist of the top-degree range (default n).
    """
    if n < 3:
        raise ValueError("spinor bundles are considered on Q_n with n >= 3")
    _check_parity(n, variant)
    _check_degree(n, q)
    start = n if top_from is None else top_from
    if q == 0 and k <= -1:
        return ZERO
    if 1 <= q <= n - 1:
        return ZERO
    if q == n and k >= start:
        return ZERO
    return UNKNOWN


def spinor_dual_cohomology(n: int, variant: str, q: int, k: int, *, top_from: int | None = None) -> DimRange:
    """Serre duality on Q_n (omega = O(-n)): h^q(S^*(k)) = h^{n-q}(S(-k-n))."""
    _check_degree(n, q)
    return spinor_cohomology(n, variant, n - q, -k - n, top_from=top_from)


def known_cohomology(v: VarietyDescriptor, sheaf: KnownSheafId, q: int, *, spinor_top_from=None) -> DimRange:
    sheaf.check(v)
    k = sheaf.twist
    if sheaf.kind == "line":
        return h_line_bundle(v, q, k)
    if sheaf.kind == "form":
        _check_degree(v.n, q)
        return exact(bott_forms(v.n, q, sheaf.p, k))
    fn = spinor_dual_cohomology if sheaf.dual else spinor_cohomology
    return fn(v.n, sheaf.variant, q, k, top_from=spinor_top_from)


def default_window(n: int) -> tuple[int, int]:
    return (-2 * n - 4, 2 * n + 4)
