"""Exact linear algebra over Q (fraction-free elimination on integers) and
over prime fields F_p (numpy int64, p < 2^31)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

__all__ = ["QQ", "GF", "Field", "field_from_token", "bareiss_rank", "rref_nullspace_qq",
           "rank_mod_p", "nullspace_mod_p", "batched_rank_mod_p"]


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by Bareiss fraction-free elimination."""
    m = [list(map(int, r)) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, len(m)):
            mi = m[i]
            f = mi[col]
            if f:
                pr = m[rank]
                for j in range(col + 1, ncols):
                    mi[j] = (p * mi[j] - f * pr[j]) // prev
            else:
                for j in range(col + 1, ncols):
                    mi[j] = (p * mi[j]) // prev
            mi[col] = 0
        prev = p
        rank += 1
        if rank == len(m):
            break
    return rank


def rref_nullspace_qq(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Integer basis of the right null space of an integer matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for fj in free:
        v = [Fraction(0)] * ncols
        v[fj] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fj]
        den = lcm(*(x.denominator for x in v))
        ints = [int(x * den) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, x)
        basis.append([x // g for x in ints])
    return basis


def _as_mod(mat, p: int) -> np.ndarray:
    return np.array(mat, dtype=np.int64).reshape(len(mat), -1) % p


def _rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = a.copy() % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, col]), -1, p) % p
        f = a[:, col].copy()
        f[r] = 0
        a = (a - np.outer(f, a[r])) % p
        pivots.append(col)
        r += 1
    return a, pivots


def rank_mod_p(mat, p: int) -> int:
    a = _as_mod(mat, p)
    if a.size == 0:
        return 0
    return len(_rref_mod_p(a, p)[1])


def nullspace_mod_p(mat, p: int, ncols: int | None = None) -> np.ndarray:
    """Basis (as rows) of the right null space over F_p."""
    if len(mat) == 0:
        return np.eye(ncols, dtype=np.int64)
    a = _as_mod(mat, p)
    ncols = a.shape[1]
    red, pivots = _rref_mod_p(a, p)
    free = [j for j in range(ncols) if j not in set(pivots)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for t, fj in enumerate(free):
        out[t, fj] = 1
        for i, pc in enumerate(pivots):
            out[t, pc] = (-red[i, fj]) % p
    return out


def batched_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of small matrices (shape (N, r, c)) over F_p."""
    a = np.array(mats, dtype=np.int64) % p
    N, rows, cols = a.shape
    rank = np.zeros(N, dtype=np.int64)
    idx = np.arange(N)
    for col in range(cols):
        # pivot row for each matrix: first row >= rank with nonzero entry in col
        cand = (a[:, :, col] != 0) & (np.arange(rows)[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = idx[has]
        pr, rk = piv[has], rank[has]
        top = a[sel, rk].copy()
        a[sel, rk] = a[sel, pr]
        a[sel, pr] = top
        pivrow = a[sel, rk]
        inv = _inv_mod(pivrow[:, col], p)
        pivrow = pivrow * inv[:, None] % p
        a[sel, rk] = pivrow
        below = np.arange(rows)[None, :] > rk[:, None]
        f = a[sel, :, col] * below
        a[sel] = (a[sel] - f[:, :, None] * pivrow[:, None, :]) % p
        rank[has] += 1
    return rank


def _inv_mod(x: np.ndarray, p: int) -> np.ndarray:
    # Fermat inverse, elementwise
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


class Field:
    """Exact coefficient field: ``p == 0`` is Q, otherwise F_p."""

    def __init__(self, p: int = 0):
        if p < 0 or (p and (p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)))):
            raise ValueError(f"{p} is not a prime")
        if p >= 2 ** 31:
            raise ValueError("prime too large for int64 arithmetic")
        self.p = p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def token(self) -> str:
        return "QQ" if self.p == 0 else f"GF({self.p})"

    def normalize(self, x: int) -> int:
        return int(x) if self.p == 0 else int(x) % self.p

    def rank(self, rows) -> int:
        rows = [list(map(int, r)) for r in rows]
        if not rows:
            return 0
        return bareiss_rank(rows) if self.p == 0 else rank_mod_p(rows, self.p)

    def nullspace(self, rows, ncols: int) -> list[list[int]]:
        rows = [list(map(int, r)) for r in rows]
        if self.p == 0:
            return rref_nullspace_qq(rows, ncols)
        return nullspace_mod_p(rows, self.p, ncols).tolist() if rows else \
            np.eye(ncols, dtype=np.int64).tolist()

    def random(self, rng: np.random.Generator, size, bound: int = 9) -> np.ndarray:
        if self.p == 0:
            return rng.integers(-bound, bound + 1, size=size)
        return rng.integers(0, self.p, size=size)

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(self.p)

    def __repr__(self) -> str:
        return self.token()


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def field_from_token(tok: str | int) -> Field:
    if isinstance(tok, int):
        return Field(tok)
    t = tok.strip().upper()
    if t in ("QQ", "Q", "0"):
        return QQ
    if t.startswith("GF(") and t.endswith(")"):
        return Field(int(t[3:-1]))
    if t.startswith("F") and t[1:].lstrip("_").isdigit():
        return Field(int(t[1:].lstrip("_")))
    if t.isdigit():
        return Field(int(t))
    raise ValueError(f"unknown field {tok!r}")
