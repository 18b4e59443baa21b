"""Fixpoint propagation of cohomology dimension intervals along long exact
sequences.

Each short exact sequence 0 -> A -> B -> C -> 0, twisted by k, gives the long
exact sequence x_0 -> x_1 -> ... -> x_{3n+2} with x_{3q} = h^q(A(k)),
x_{3q+1} = h^q(B(k)), x_{3q+2} = h^q(C(k)).  Exactness is modelled by rank
variables: x_i = r_{i-1} + r_i with r_{-1} = r_{3n+2} = 0 and r_i >= 0, and the
engine narrows the intervals of x and r against each other until nothing
moves.  Only the upper bounds of unknown cells ever shrink and lower bounds
ever grow, so the procedure terminates on any finite window.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from ..lattice import INF, UNKNOWN, ZERO, Contradiction, DimRange, ceil_div, floor_div
from ..monads import SES, Term

__all__ = ["CohTable", "TraceStep", "CohomologyEngine", "Contradiction"]


@dataclass(frozen=True)
class TraceStep:
    sequence: str
    twist: int
    rule: str
    node: str
    q: int
    k: int
    before: DimRange
    after: DimRange
    label: str = ""

    def describe(self) -> str:
        return (f"h^{self.q}({self.node}({self.k})): {self.before} -> {self.after} "
                f"via {self.sequence} at twist {self.twist} [{self.rule}]")


@dataclass
class CohTable:
    """Dimension intervals h^q(node(k)) for 0 <= q <= n and k in the window."""

    node: str
    n: int
    window: tuple[int, int]
    entries: dict[tuple[int, int], DimRange] = field(default_factory=dict)
    trace_ids: dict[tuple[int, int], int] = field(default_factory=dict)
    origin: dict[tuple[int, int], str] = field(default_factory=dict)

    @classmethod
    def unknown(cls, node: str, n: int, window: tuple[int, int]) -> "CohTable":
        t = cls(node, n, window)
        for k in range(window[0], window[1] + 1):
            for q in range(n + 1):
                t.entries[(q, k)] = UNKNOWN
        return t

    def in_window(self, k: int) -> bool:
        return self.window[0] <= k <= self.window[1]

    def get(self, q: int, k: int) -> DimRange:
        if not 0 <= q <= self.n:
            return ZERO
        return self.entries.get((q, k), UNKNOWN)

    def is_zero(self, q: int, k: int) -> bool:
        return self.in_window(k) and self.get(q, k).is_zero

    def zero_set(self) -> set[tuple[int, int]]:
        return {cell for cell, r in self.entries.items() if r.is_zero}

    def twists(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def row(self, k: int) -> list[DimRange]:
        return [self.get(q, k) for q in range(self.n + 1)]

    def euler_characteristic(self, k: int) -> int | None:
        row = self.row(k)
        if not all(r.is_exact for r in row):
            return None
        return sum((-1) ** q * r.lo for q, r in enumerate(row))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "k", "lo", "hi", "trace_id"])
        for (q, k) in sorted(self.entries, key=lambda c: (c[1], c[0])):
            r = self.entries[(q, k)]
            hi = "inf" if r.hi == INF else int(r.hi)
            tid = self.trace_ids.get((q, k), "")
            w.writerow([q, k, r.lo, hi, tid])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, node: str, n: int) -> "CohTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        ks = [int(r["k"]) for r in rows]
        t = cls(node, n, (min(ks), max(ks)))
        for r in rows:
            cell = (int(r["q"]), int(r["k"]))
            hi = INF if r["hi"] == "inf" else int(r["hi"])
            t.entries[cell] = DimRange(int(r["lo"]), hi)
            if r["trace_id"] != "":
                t.trace_ids[cell] = int(r["trace_id"])
        return t

    def to_json(self) -> dict:
        return {
            "node": self.node,
            "n": self.n,
            "window": list(self.window),
            "cells": [
                {"q": q, "k": k, "range": self.entries[(q, k)].to_json(),
                 "trace_id": self.trace_ids.get((q, k))}
                for (q, k) in sorted(self.entries, key=lambda c: (c[1], c[0]))
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CohTable":
        t = cls(obj["node"], obj["n"], tuple(obj["window"]))
        for cell in obj["cells"]:
            key = (cell["q"], cell["k"])
            t.entries[key] = DimRange.from_json(cell["range"])
            if cell.get("trace_id") is not None:
                t.trace_ids[key] = cell["trace_id"]
        return t

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


Oracle = Callable[[int, int], DimRange]


class CohomologyEngine:
    """Constraint store over known sheaves (oracles) and derived sheaves (tables)."""

    def __init__(self, n: int, window: tuple[int, int]):
        if window[0] > window[1]:
            raise ValueError(f"empty window {window}")
        self.n = n
        self.window = window
        self.oracles: dict[str, Oracle] = {}
        self.oracle_notes: dict[str, str] = {}
        self._oracle_cache: dict[tuple[str, int, int], DimRange] = {}
        self.tables: dict[str, CohTable] = {}
        self.sequences: list[SES] = []
        self.labels: dict[str, str] = {}
        self.trace: list[TraceStep] = []
        self._refs: dict[str, list[tuple[int, int]]] = {}
        self._queue: list[tuple[int, int]] = []
        self._queued: set[tuple[int, int]] = set()

    # -- construction --------------------------------------------------------

    def add_oracle(self, name: str, fn: Oracle, note: str = "") -> None:
        self.oracles[name] = fn
        self.oracle_notes[name] = note

    def add_node(self, name: str, zero: bool = False) -> CohTable:
        t = CohTable.unknown(name, self.n, self.window)
        if zero:
            for cell in t.entries:
                t.entries[cell] = ZERO
                t.origin[cell] = "zero sheaf"
        self.tables[name] = t
        return t

    def seed(self, node: str, q: int, k: int, rng: DimRange, why: str) -> None:
        """Record an externally established fact about a derived cell."""
        t = self.tables[node]
        if not t.in_window(k):
            return
        before = t.get(q, k)
        after = before.meet(rng)
        if after != before:
            t.entries[(q, k)] = after
            t.origin[(q, k)] = why
            self.trace.append(TraceStep("seed", k, why, node, q, k, before, after))
            t.trace_ids[(q, k)] = len(self.trace) - 1
            self._touch(node, k)

    def add_sequence(self, ses: SES) -> None:
        for term in ses.sub + ses.mid + ses.quot:
            if term.node not in self.tables and term.node not in self.oracles:
                raise KeyError(f"sequence {ses.name} references unknown node {term.node}")
        idx = len(self.sequences)
        self.sequences.append(ses)
        self.labels[ses.name] = ses.label
        shifts = {}
        for term in ses.sub + ses.mid + ses.quot:
            if term.node in self.tables:
                shifts.setdefault(term.node, set()).add(term.shift)
        for node, ss in shifts.items():
            for s in ss:
                self._refs.setdefault(node, []).append((idx, s))
        if not shifts:
            return
        lo, hi = self.window
        all_shifts = {s for ss in shifts.values() for s in ss}
        for k in range(lo - max(all_shifts), hi - min(all_shifts) + 1):
            if any(lo <= k + s <= hi for s in all_shifts):
                self._push(idx, k)

    # -- cell access ---------------------------------------------------------

    def cell(self, node: str, q: int, k: int) -> DimRange:
        if q < 0 or q > self.n:
            return ZERO
        t = self.tables.get(node)
        if t is not None:
            return t.get(q, k) if t.in_window(k) else UNKNOWN
        key = (node, q, k)
        r = self._oracle_cache.get(key)
        if r is None:
            r = self._oracle_cache[key] = self.oracles[node](q, k)
        return r

    def table(self, node: str) -> CohTable:
        return self.tables[node]

    def _push(self, idx: int, k: int) -> None:
        key = (idx, k)
        if key not in self._queued:
            self._queued.add(key)
            heapq.heappush(self._queue, key)

    def _touch(self, node: str, k: int) -> None:
        for idx, shift in self._refs.get(node, ()):
            self._push(idx, k - shift)

    # -- propagation ---------------------------------------------------------

    def propagate(self, max_steps: int = 10_000_000) -> "CohomologyEngine":
        steps = 0
        while self._queue:
            idx, k = heapq.heappop(self._queue)
            self._queued.discard((idx, k))
            self._process(idx, k)
            steps += 1
            if steps > max_steps:
                raise RuntimeError("propagation did not reach a fixpoint")
        return self

    def _slot_cells(self, terms: tuple[Term, ...], k: int) -> list[tuple[str, int, int]]:
        merged: dict[tuple[str, int], int] = {}
        for t in terms:
            merged[(t.node, k + t.shift)] = merged.get((t.node, k + t.shift), 0) + t.mult
        return [(node, tw, m) for (node, tw), m in merged.items()]

    def _process(self, idx: int, k: int) -> None:
        ses = self.sequences[idx]
        n = self.n
        parts = [self._slot_cells(ses.sub, k), self._slot_cells(ses.mid, k), self._slot_cells(ses.quot, k)]
        slots = []  # (q, cells) in long-exact-sequence order
        for q in range(n + 1):
            for cells in parts:
                slots.append((q, cells))
        xs = []
        for q, cells in slots:
            lo = hi = 0
            for node, tw, m in cells:
                r = self.cell(node, q, tw)
                lo += m * r.lo
                hi += m * r.hi
            xs.append([lo, hi])
        new_xs = _rank_chain(xs)
        if new_xs is None:
            raise Contradiction(f"sequence {ses.name} at twist {k} is inconsistent")
        for (q, cells), old, new in zip(slots, xs, new_xs):
            if new == old:
                continue
            self._narrow_slot(ses, k, q, cells, new)

    def _narrow_slot(self, ses: SES, k: int, q: int, cells, bounds) -> None:
        s_lo, s_hi = bounds
        ranges = [self.cell(node, q, tw) for node, tw, _ in cells]
        for j, (node, tw, m) in enumerate(cells):
            others_lo = sum(cells[i][2] * ranges[i].lo for i in range(len(cells)) if i != j)
            others_hi = sum(cells[i][2] * ranges[i].hi for i in range(len(cells)) if i != j)
            hi = floor_div(s_hi - others_lo, m)
            lo = ceil_div(s_lo - others_hi, m) if others_hi != INF else 0
            cur = ranges[j]
            new_lo = max(cur.lo, lo)
            new_hi = min(cur.hi, hi)
            if new_lo == cur.lo and new_hi == cur.hi:
                continue
            if new_lo > new_hi:
                raise Contradiction(
                    f"h^{q}({node}({tw})) emptied by {ses.name} at twist {k}: [{new_lo},{new_hi}]")
            t = self.tables.get(node)
            if t is None or not t.in_window(tw):
                # oracle cells and cells outside the window are not refined
                continue
            after = DimRange(new_lo, new_hi)
            t.entries[(q, tw)] = after
            self.trace.append(TraceStep(ses.name, k, "long exact sequence", node, q, tw, cur, after,
                                        ses.label))
            t.trace_ids[(q, tw)] = len(self.trace) - 1
            ranges[j] = after
            self._touch(node, tw)

    # -- reporting -----------------------------------------------------------

    def explain(self, node: str, q: int, k: int) -> list[TraceStep]:
        """The derivation steps that touched this cell, in order."""
        return [s for s in self.trace if s.node == node and s.q == q and s.k == k]


def _rank_chain(xs: list[list]) -> list[list] | None:
    """Interval propagation for x_i = r_{i-1} + r_i, r >= 0, r_{-1} = r_L = 0.

    Returns the narrowed x intervals, or None on contradiction.
    """
    # an exact zero forces both adjacent ranks to vanish, so the chain
    # splits into independent segments
    out: list[list] = []
    start = 0
    key = tuple(tuple(x) for x in xs)
    for i, x in enumerate(key + ((0, 0),)):
        if x[1] == 0:
            if i > start:
                seg = _segment(key[start:i])
                if seg is None:
                    return None
                out.extend(list(y) for y in seg)
            if i < len(key):
                out.append([0, 0])
            start = i + 1
    return out


@lru_cache(maxsize=65536)
def _segment(key: tuple) -> tuple | None:
    L = len(key)
    xs = [list(x) for x in key]
    r = [[0, 0]] + [[0, INF] for _ in range(L - 1)] + [[0, 0]]
    # r[i] is the rank of the map into x_i; r[i+1] the rank of the map out of it
    for _ in range(4 * L + 8):
        changed = False
        for order in (range(L), range(L - 1, -1, -1)):
            for i in order:
                x, rp, rn = xs[i], r[i], r[i + 1]
                lo = max(x[0], rp[0] + rn[0])
                hi = min(x[1], rp[1] + rn[1])
                if lo > hi:
                    return None
                if lo != x[0] or hi != x[1]:
                    x[0], x[1] = lo, hi
                    changed = True
                plo = max(rp[0], x[0] - rn[1])
                phi = min(rp[1], x[1] - rn[0])
                nlo = max(rn[0], x[0] - phi)
                nhi = min(rn[1], x[1] - plo)
                if plo > phi or nlo > nhi:
                    return None
                if (plo, phi, nlo, nhi) != (rp[0], rp[1], rn[0], rn[1]):
                    rp[0], rp[1], rn[0], rn[1] = plo, phi, nlo, nhi
                    changed = True
        if not changed:
            break
    return tuple(tuple(x) for x in xs)
