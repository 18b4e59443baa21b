"""Homogeneous forms in n+1 variables: monomial bases and multiplication
matrices."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np

__all__ = ["monomials", "monomial_index", "dim_forms", "LinearFormMatrix", "quadratic_index",
           "projective_points", "count_projective_points"]


def dim_forms(n: int, d: int) -> int:
    """dim of degree-d forms on P^n."""
    return comb(n + d, n) if d >= 0 else 0


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree d in n+1 variables, in a fixed order."""
    if d < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(n + 1), d):
        e = [0] * (n + 1)
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def quadratic_index(n: int) -> np.ndarray:
    """idx[u, v] = position of x_u x_v among degree-2 monomials."""
    index = monomial_index(n, 2)
    idx = np.zeros((n + 1, n + 1), dtype=np.int64)
    for u in range(n + 1):
        for v in range(n + 1):
            e = [0] * (n + 1)
            e[u] += 1
            e[v] += 1
            idx[u, v] = index[tuple(e)]
    return idx


class LinearFormMatrix:
    """rows x cols matrix whose entries are linear forms sum_u coef[i, j, u] x_u."""

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=object if _big(coeffs) else np.int64)
        if arr.ndim != 3:
            raise ValueError("coefficient array must have shape (rows, cols, n+1)")
        self.coeffs = arr

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def nvars(self) -> int:
        return self.coeffs.shape[2]

    def evaluate(self, points: np.ndarray, p: int) -> np.ndarray:
        """Values at a stack of points (shape (N, n+1)) reduced mod p: (N, rows, cols)."""
        c = np.array(self.coeffs % p, dtype=np.int64)
        pts = np.asarray(points, dtype=np.int64) % p
        return np.einsum("rcu,nu->nrc", c, pts) % p

    def transpose(self) -> "LinearFormMatrix":
        return LinearFormMatrix(self.coeffs.transpose(1, 0, 2))

    def to_json(self) -> list:
        return [[[int(x) for x in entry] for entry in row] for row in self.coeffs]

    @classmethod
    def from_json(cls, obj, nvars: int | None = None, shape: tuple[int, int] | None = None) -> "LinearFormMatrix":
        if not obj and shape is not None and nvars is not None:
            return cls(np.zeros((shape[0], shape[1], nvars), dtype=np.int64))
        if obj and not obj[0] and nvars is not None:
            return cls(np.zeros((len(obj), 0, nvars), dtype=np.int64))
        return cls(obj)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearFormMatrix) and self.coeffs.shape == other.coeffs.shape \
            and bool(np.all(self.coeffs == other.coeffs))


def _big(coeffs) -> bool:
    arr = np.asarray(coeffs, dtype=object)
    return arr.size > 0 and max(abs(int(x)) for x in arr.flat) >= 2 ** 62


def projective_points(d: int, q: int) -> np.ndarray:
    """All points of P^d(F_q), normalized so the first nonzero coordinate is 1."""
    blocks = []
    for lead in range(d + 1):
        free = d - lead
        tail = np.indices((q,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        blk = np.zeros((len(tail), d + 1), dtype=np.int64)
        blk[:, lead] = 1
        blk[:, lead + 1:] = tail
        blocks.append(blk)
    return np.concatenate(blocks, axis=0)


def count_projective_points(d: int, q: int) -> int:
    return (q ** (d + 1) - 1) // (q - 1)
