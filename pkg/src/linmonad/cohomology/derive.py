"""Derivations built on the propagation engine: vanishing tables of monad
cohomology, vanishing of twisted exterior powers, the linear-sheaf criterion
on P^n and the Beilinson reconstruction of monad dimensions."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

from ..lattice import ZERO, DimRange
from ..monads import SES, MonadSpec, Term, display_sequences, dualize, validate
from ..varieties import (
    SPINOR_TOP_NOTE,
    VarietyDescriptor,
    bott_forms,
    default_window,
    h_line_bundle,
    known_cohomology,
)
from .engine import CohomologyEngine, CohTable

__all__ = [
    "Derivation",
    "MissingAssumption",
    "Indeterminate",
    "build_display_engine",
    "derive_instanton_table",
    "derive_special_table",
    "closed_form_vanishing",
    "coverage_report",
    "ExteriorEvidence",
    "exterior_replay",
    "CriterionResult",
    "criterio_check",
    "beilinson_dims",
    "bott_form_oracle",
]


class MissingAssumption(ValueError):
    pass


class Indeterminate(ValueError):
    pass


@dataclass
class Derivation:
    monad: MonadSpec
    engine: CohomologyEngine
    locally_free: bool

    @property
    def tables(self) -> dict[str, CohTable]:
        return self.engine.tables

    def table(self, node: str = "E") -> CohTable:
        return self.engine.tables[node]

    def explain(self, node: str, q: int, k: int) -> list[str]:
        return [s.describe() for s in self.engine.explain(node, q, k)]


def build_display_engine(m: MonadSpec, locally_free: bool = False, window=None,
                         spinor_top_from: int | None = None) -> CohomologyEngine:
    diagram = display_sequences(m, locally_free)
    v = m.variety
    eng = CohomologyEngine(v.n, window or default_window(v.n))
    for name, sheaf in diagram.known.items():
        note = SPINOR_TOP_NOTE if sheaf.kind == "spinor" and spinor_top_from is None else ""
        eng.add_oracle(name, _oracle(v, sheaf, spinor_top_from), note)
    for name in diagram.derived:
        eng.add_node(name, zero=(name == "Ext" and locally_free))
    for ses in diagram.sequences:
        eng.add_sequence(ses)
    return eng


def _oracle(v: VarietyDescriptor, sheaf, spinor_top_from=None) -> Callable[[int, int], DimRange]:
    def fn(q: int, k: int) -> DimRange:
        return known_cohomology(v, sheaf.twisted(k), q, spinor_top_from=spinor_top_from)
    return fn


def derive_instanton_table(m: MonadSpec, v: VarietyDescriptor | None = None, locally_free: bool = False,
                           window=None) -> Derivation:
    """Propagate the display sequences of a linear monad to a fixpoint."""
    if v is not None and v != m.variety:
        raise ValueError("variety does not match the monad")
    validate(m)
    if not m.is_linear:
        return derive_special_table(m, locally_free=locally_free, window=window)
    if not m.variety.vanishing_hypothesis:
        raise MissingAssumption("the variety must satisfy H^p(O(k)) = 0 for 1 <= p <= n-1")
    eng = build_display_engine(m, locally_free, window).propagate()
    return Derivation(m, eng, locally_free)


def derive_special_table(m: MonadSpec, locally_free: bool = False, window=None,
                         spinor_top_from: int | None = None) -> Derivation:
    """Vanishing table for a monad on a quadric, spinor terms included.

    Linear shapes are routed to :func:`derive_instanton_table`.
    """
    validate(m)
    if not m.variety.is_quadric:
        raise ValueError("special monads live on smooth quadrics")
    if m.is_linear:
        return derive_instanton_table(m, locally_free=locally_free, window=window)
    eng = build_display_engine(m, locally_free, window, spinor_top_from).propagate()
    return Derivation(m, eng, locally_free)


def closed_form_vanishing(m: MonadSpec, window=None, locally_free: bool = False) -> dict[str, set[tuple[int, int]]]:
    """The vanishing cells asserted for the monad cohomology E and its dual,
    encoded directly from the closed-form ranges (no propagation)."""
    v = m.variety
    n, lo_hi = v.n, window or default_window(v.n)
    ks = range(lo_hi[0], lo_hi[1] + 1)
    E, Ed = set(), set()
    if m.is_linear:
        l, lam = v.l, v.lam
        h1_to, top1_from, top_from = -l - 1, lam + l + 1, lam + 1
        dual_top_from = lam + 1 if v.is_quadric else None
    else:
        h1_to, top1_from, top_from, dual_top_from = -2, -n + 1, -n + 1, -n + 1
    for k in ks:
        if n >= 2 and k <= -1:
            E.add((0, k))
            Ed.add((0, k))
        if n >= 3 and k <= h1_to:
            E.add((1, k))
        if n >= 4:
            for i in range(2, n - 1):
                E.add((i, k))
        if n >= 3 and k >= top1_from:
            E.add((n - 1, k))
        if n >= 2 and k >= top_from:
            E.add((n, k))
        if locally_free and dual_top_from is not None and k >= dual_top_from:
            Ed.add((n, k))
    return {"E": E, "E*": Ed}


def coverage_report(d: Derivation, expected=None) -> dict[str, set[tuple[int, int]]]:
    """Closed-form vanishing cells that the derivation did not reach."""
    expected = expected or closed_form_vanishing(d.monad, d.engine.window, d.locally_free)
    return {node: {cell for cell in cells if not d.table(node).get(*cell).is_zero}
            for node, cells in expected.items()}


# -- exterior powers ----------------------------------------------------------

@dataclass
class ExteriorEvidence:
    """H^0(wedge^q E (twist)) = 0 for each q with ``vanishing[q] == twist``;
    ``None`` marks a gap."""

    monad: MonadSpec
    rank: int
    c1: int
    vanishing: dict[int, int | None]
    source: dict[int, str] = field(default_factory=dict)
    assumptions: tuple[str, ...] = ("locally free",)

    @property
    def gaps(self) -> list[int]:
        return [q for q, t in sorted(self.vanishing.items()) if t is None]

    @property
    def complete(self) -> bool:
        return not self.gaps

    def cells(self) -> set[tuple[int, int]]:
        return {(q, t) for q, t in self.vanishing.items() if t is not None}

    def to_json(self) -> dict:
        return {"rank": self.rank, "c1": self.c1,
                "vanishing": {str(q): t for q, t in sorted(self.vanishing.items())},
                "source": {str(q): s for q, s in sorted(self.source.items())},
                "assumptions": list(self.assumptions)}


def _exterior_engine(a: int, b: int, c: int, v: VarietyDescriptor, qmax: int) -> CohomologyEngine:
    """Engine holding wedge^m K and wedge^q E for the monad O(-l)^a -> O^b -> O(l)^c.

    wedge^m K is resolved by the complex
      0 -> wedge^m K -> wedge^m O^b -> wedge^(m-1) O^b (x) O(l)^c -> ... -> S^m(O(l)^c) -> 0,
    and wedge^q E by
      0 -> S^q A -> S^(q-1) A (x) K -> ... -> A (x) wedge^(q-1) K -> wedge^q K -> wedge^q E -> 0
    with A = O(-l)^a.  Both are cut into short exact sequences.
    """
    n, l = v.n, v.l
    rk_k = b - c
    eng = CohomologyEngine(n, (-(qmax + 2) * l - 2, 1))
    eng.add_oracle("O", lambda q, k: h_line_bundle(v, q, k))

    def wk(m: int) -> str:
        return "O" if m == 0 else f"wedge{m}K"

    mmax = min(qmax, rk_k)
    for m in range(1, mmax + 1):
        eng.add_node(wk(m))
    for m in range(1, mmax + 1):
        t = [Term("O", comb(b, m - j) * comb(c + j - 1, j), j * l) for j in range(m + 1)]
        z = [None] + [f"Z{m}.{j}" for j in range(1, m)]
        for j in range(1, m):
            eng.add_node(z[j])
        subs = [(Term(wk(m)),)] + [(Term(z[j]),) for j in range(1, m)]
        quots = [(Term(z[j]),) for j in range(1, m)] + [(t[m],)]
        for j in range(m):
            eng.add_sequence(SES(f"wedge{m}K.{j}", subs[j], _nz(t[j]), _nz(*quots[j]),
                                 f"symmetric-power complex of ker beta, step {j}"))

    def chain_term(q: int, j: int) -> Term | None:
        mult = comb(a + j - 1, j)
        m = q - j
        if mult == 0 or m > rk_k:
            return None
        return Term(wk(m), mult, -j * l)

    for q in range(1, qmax + 1):
        top = f"wedge{q}E"
        eng.add_node(top)
        y = [None] + [f"Y{q}.{j}" for j in range(1, q)]
        for j in range(1, q):
            eng.add_node(y[j])
        cterms = [chain_term(q, j) for j in range(q + 1)]
        # 0 -> Y1 -> C0 -> wedge^q E -> 0, 0 -> Y_{j+1} -> C_j -> Y_j -> 0, Y_q = C_q
        for j in range(q):
            sub = (Term(y[j + 1]),) if j + 1 < q else _nz(cterms[q])
            quot = (Term(top),) if j == 0 else (Term(y[j]),)
            eng.add_sequence(SES(f"wedge{q}E.{j}", sub, _nz(cterms[j]), quot,
                                 f"exterior-power complex of 0 -> A -> K -> E -> 0, step {j}"))
    return eng


def _nz(*terms) -> tuple[Term, ...]:
    return tuple(t for t in terms if t is not None and t.mult)


def _direct_wedge_vanishing(a: int, b: int, c: int, v: VarietyDescriptor, qmax: int) -> dict[int, bool]:
    if qmax < 1:
        return {}
    eng = _exterior_engine(a, b, c, v, qmax).propagate()
    return {q: eng.table(f"wedge{q}E").get(0, -1).is_zero for q in range(1, qmax + 1)}


def exterior_replay(m: MonadSpec, v: VarietyDescriptor | None = None, locally_free: bool = False) -> ExteriorEvidence:
    """Vanishing of H^0(wedge^q E(-1)) for 1 <= q <= rank - 1.

    The range q <= n-1 comes from the exterior-power complex directly; when
    c1 = 0 the range q >= r-n+1 is obtained from the dual monad through
    wedge^q E = wedge^(r-q) E^*.
    """
    v = v or m.variety
    validate(m)
    if not m.is_linear:
        raise ValueError("exterior replay needs a linear monad")
    if not locally_free:
        raise MissingAssumption("exterior-power complexes and duality need E locally free")
    if not v.vanishing_hypothesis:
        raise MissingAssumption("the variety must satisfy H^p(O(k)) = 0 for 1 <= p <= n-1")
    n, r, d = v.n, m.rank, m.c1
    evidence: dict[int, int | None] = {q: None for q in range(1, r)}
    source: dict[int, str] = {}
    direct = _direct_wedge_vanishing(m.a, m.b, m.c, v, min(n - 1, r - 1))
    for q, ok in direct.items():
        if ok:
            evidence[q] = -1
            source[q] = "exterior-power complex"
    if d == 0 and r > n:
        md = dualize(m)
        dual = _direct_wedge_vanishing(md.a, md.b, md.c, v, min(n - 1, r - 1))
        for qd, ok in dual.items():
            q = r - qd
            if ok and 1 <= q <= r - 1 and evidence[q] is None:
                evidence[q] = -1
                source[q] = f"dual: wedge^{q} E = wedge^{qd} E*"
    return ExteriorEvidence(m, r, d, evidence, source)


# -- linear-sheaf criterion on P^n ------------------------------------------------

@dataclass
class CriterionResult:
    holds: bool
    failing: tuple[int, int] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


def _criterion_cells(n: int, window: tuple[int, int]) -> list[tuple[int, int, str]]:
    cells = []
    ks = range(window[0], window[1] + 1)
    if n >= 2:
        cells += [(0, -1, "H^0(F(-1)) = 0"), (n, -n, "H^n(F(-n)) = 0")]
    if n >= 3:
        cells += [(1, k, "H^1(F(k)) = 0 for k <= -2") for k in ks if k <= -2]
        cells += [(n - 1, k, "H^(n-1)(F(k)) = 0 for k >= -n+1") for k in ks if k >= -n + 1]
    if n >= 4:
        cells += [(p, k, "H^p(F(k)) = 0 for 2 <= p <= n-2") for p in range(2, n - 1) for k in ks]
    return cells


def criterio_check(t: CohTable, n: int | None = None) -> CriterionResult:
    """Cohomological characterization of linear monad cohomology on P^n.

    Returns a falsy result naming the first violated cell; raises
    Indeterminate when some required cell is neither zero nor provably
    non-zero.
    """
    n = t.n if n is None else n
    undecided = None
    for q, k, rule in _criterion_cells(n, t.window):
        r = t.get(q, k) if t.in_window(k) else None
        if r is None:
            undecided = undecided or (q, k, f"twist {k} outside the table window")
            continue
        if r.lo > 0:
            return CriterionResult(False, (q, k), f"h^{q}(F({k})) = {r} violates {rule}")
        if not r.is_zero and undecided is None:
            undecided = (q, k, f"h^{q}(F({k})) = {r} undecided for {rule}")
    if undecided:
        raise Indeterminate(undecided[2])
    return CriterionResult(True)


# -- Beilinson ------------------------------------------------------------------

def beilinson_dims(f, n: int, window=None, form_twists: dict[int, Callable] | None = None):
    """Dimensions (h^1(F(-1) (x) Omega^2(2)), h^1(F(-1) (x) Omega^1(1)), h^1(F(-1)))
    of the linear monad reconstructed from F on P^n.

    ``f`` is a CohTable for F or an oracle ``(q, k) -> DimRange``.  The twisted
    forms W_p(k) = F(k) (x) Omega^p(p) are tied to F by the Euler sequences
    0 -> W_p(k) -> F(k)^C(n+1,p) -> W_{p-1}(k+1) -> 0 and W_n(k) = F(k-1);
    ``form_twists`` may supply exact oracles for some W_p directly.
    """
    window = window or default_window(n)
    eng = CohomologyEngine(n, window)
    eng.add_oracle("0", lambda q, k: ZERO)
    if isinstance(f, CohTable):
        eng.add_node("F")
        for (q, k), r in f.entries.items():
            eng.seed("F", q, k, r, "input table")
    else:
        eng.add_oracle("F", f)
    form_twists = form_twists or {}
    names = {0: "F"}
    for p in range(1, n + 1):
        names[p] = f"W{p}"
        if p in form_twists:
            eng.add_oracle(names[p], form_twists[p])
        else:
            eng.add_node(names[p])
    for p in range(1, n + 1):
        eng.add_sequence(SES(f"euler{p}", (Term(names[p]),), (Term("F", comb(n + 1, p)),),
                             (Term(names[p - 1], 1, 1),), f"Euler sequence for {p}-forms twisted by F"))
    eng.add_sequence(SES("top-forms", (Term(names[n]),), (Term("F", 1, -1),), (Term("0"),),
                         "F(k) (x) Omega^n(n) = F(k-1)"))
    eng.propagate()
    missing = []
    for p in range(0, n + 1):
        for q in range(0, n + 1):
            if q == 1 and p <= 2:
                continue
            if not eng.cell(names[p], q, -1).is_zero:
                missing.append((p, q))
    dims = []
    for p in (2, 1, 0):
        r = eng.cell(names[p], 1, -1) if p <= n else ZERO
        if not r.is_exact:
            raise Indeterminate(f"h^1(F(-1) (x) Omega^{p}({p})) = {r} is not pinned by the Euler chain")
        dims.append(r.value)
    if missing:
        raise Indeterminate("vanishing of H^q(F(-1) (x) Omega^p(p)) not derivable for (p,q) in "
                            + ", ".join(map(str, missing)))
    return tuple(dims)


def bott_form_oracle(p: int, n: int) -> Callable[[int, int], DimRange]:
    """W_p(k) = Omega^p(p + k) on P^n, exact by Bott's formula (F = O)."""
    from ..lattice import exact

    return lambda q, k: exact(bott_forms(n, q, p, p + k))
