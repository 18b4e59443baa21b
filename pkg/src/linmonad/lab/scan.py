"""Monte-Carlo estimation of the degeneration locus of alpha by enumerating
points of random linear subspaces over a small prime field."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .explicit import ExplicitMonad, _sample_points, fiber_rank_drops
from .forms import count_projective_points, projective_points
from .linalg import rank_mod_p

__all__ = ["DegenerationReport", "EnumerationBudgetExceeded", "degeneration_scan",
           "validate_explicit", "classify_codim", "thread_count"]

THREADS_ENV = "LINMONAD_THREADS"
POINT_BUDGET = 5_000_000
MAX_LISTED = 16


class EnumerationBudgetExceeded(ValueError):
    pass


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class DegenerationReport:
    sampled_points: int
    alpha_rank_drops: list[list[int]]
    beta_rank_drops: list[list[int]]
    codim_estimate: int | str | None
    classification: str | None
    confidence: str
    q: int
    seed: int
    is_complex: bool = True
    alpha_drop_count: int = 0
    beta_drop_count: int = 0
    hits: dict[int, tuple[int, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "sampled_points": self.sampled_points,
            "alpha_rank_drops": self.alpha_rank_drops,
            "beta_rank_drops": self.beta_rank_drops,
            "alpha_drop_count": self.alpha_drop_count,
            "beta_drop_count": self.beta_drop_count,
            "codim_estimate": self.codim_estimate,
            "classification": self.classification,
            "confidence": self.confidence,
            "q": self.q,
            "seed": self.seed,
            "is_complex": self.is_complex,
            "hits": {str(d): list(h) for d, h in sorted(self.hits.items())},
        }


def classify_codim(codim) -> str:
    if codim == "empty":
        return "locally-free"
    if codim >= 3:
        return "reflexive"
    if codim == 2:
        return "torsion-free"
    return "torsion-possible"


def _listed(points: np.ndarray, mask: np.ndarray) -> list[list[int]]:
    return [[int(x) for x in pt] for pt in points[mask][:MAX_LISTED]]


def validate_explicit(m: ExplicitMonad, samples: int = 10_000, seed: int = 0, q: int | None = None
                      ) -> DegenerationReport:
    """Fiber ranks of alpha and beta at seeded random points.

    A beta rank drop (or a failed complex identity) makes the monad invalid;
    alpha drops alone are left unclassified (see :func:`degeneration_scan`).
    """
    q = q or m.field.p or 10007
    rng = np.random.default_rng(seed)
    pts = _sample_points(rng, m.n, q, samples)
    a_drop, b_drop = fiber_rank_drops(m, pts, q)
    complex_ok = m.is_complex()
    invalid = bool(b_drop.any()) or not complex_ok
    if invalid:
        cls = "invalid-monad"
    elif not a_drop.any():
        cls = "locally-free"
    else:
        cls = None
    note = (f"Monte-Carlo: {samples} random points over F_{q}; "
            + ("no rank drop found" if not (a_drop.any() or b_drop.any()) else "rank drops found"))
    return DegenerationReport(samples, _listed(pts, a_drop), _listed(pts, b_drop), None, cls, note, q, seed,
                              complex_ok, int(a_drop.sum()), int(b_drop.sum()))


def _random_subspace(rng, d: int, n: int, q: int) -> np.ndarray:
    while True:
        L = rng.integers(0, q, size=(d + 1, n + 1))
        if rank_mod_p(L.tolist(), q) == d + 1:
            return L


def degeneration_scan(m: ExplicitMonad, subspace_dims=(0, 1, 2, 3), q: int = 101, subspaces: int = 64,
                      seed: int = 0, budget: int = POINT_BUDGET) -> DegenerationReport:
    """Estimate codim of the locus where alpha is not injective.

    For each d, ``subspaces`` random P^d in P^n are enumerated point by point
    over F_q (d >= n enumerates P^n itself, once).  A P^d meets a codimension-s
    locus exactly when d >= s, so the estimate is the least d at which more
    than half of the subspaces hit.  No hit anywhere reads as an empty locus.
    """
    n = m.n
    rng = np.random.default_rng(seed)
    plans = []
    total = 0
    for d in sorted(set(subspace_dims)):
        if d >= n:
            plans.append((d, [None]))
            total += count_projective_points(n, q)
            break
        plans.append((d, [_random_subspace(rng, d, n, q) for _ in range(subspaces)]))
        total += subspaces * count_projective_points(d, q)
    if total > budget:
        raise EnumerationBudgetExceeded(f"{total} points exceed the enumeration budget {budget}")

    cache: dict[int, np.ndarray] = {}

    def run(job):
        d, L = job
        if L is None:
            pts = projective_points(n, q)
        else:
            base = cache.setdefault(d, projective_points(d, q))
            pts = base.dot(L) % q
        a_drop, b_drop = fiber_rank_drops(m, pts, q)
        return pts, a_drop, b_drop

    for d, _ in plans:
        cache[d] = projective_points(min(d, n), q)
    jobs = [(d, L) for d, Ls in plans for L in Ls]
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    hits: dict[int, list[int]] = {}
    a_list, b_list = [], []
    a_count = b_count = sampled = 0
    for (d, _), (pts, a_drop, b_drop) in zip(jobs, results):
        h = hits.setdefault(d, [0, 0])
        h[0] += int(a_drop.any())
        h[1] += 1
        sampled += len(pts)
        a_count += int(a_drop.sum())
        b_count += int(b_drop.sum())
        if len(a_list) < MAX_LISTED:
            a_list += _listed(pts, a_drop)[: MAX_LISTED - len(a_list)]
        if len(b_list) < MAX_LISTED:
            b_list += _listed(pts, b_drop)[: MAX_LISTED - len(b_list)]

    complex_ok = m.is_complex()
    codim = None
    for d in sorted(hits):
        hit, tot = hits[d]
        if 2 * hit > tot:
            codim = d
            break
    full = any(d >= n for d in hits)
    if codim is None:
        if a_count == 0 and full:
            codim = "empty"
        elif a_count == 0:
            codim = f">{max(hits)}"
        else:
            codim = max(hits) + 1
    if b_count or not complex_ok:
        cls = "invalid-monad"
    elif isinstance(codim, str) and codim.startswith(">"):
        cls = "reflexive" if max(hits) >= 2 else None
    else:
        cls = classify_codim(codim)
    dims = ", ".join(f"d={d}: {h[0]}/{h[1]}" for d, h in sorted(hits.items()))
    note = (f"Monte-Carlo over F_{q}: subspaces hit per dimension {dims}; "
            + ("P^n enumerated exhaustively" if full else "P^n not enumerated"))
    return DegenerationReport(sampled, a_list, b_list, codim, cls, note, q, seed, complex_ok, a_count, b_count,
                              {d: (h[0], h[1]) for d, h in hits.items()})
