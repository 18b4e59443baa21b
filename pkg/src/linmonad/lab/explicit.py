"""Explicit linear monads on P^n as matrices of linear forms over Q or F_p."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..monads import NonPositiveRank
from .forms import (LinearFormMatrix, count_projective_points, dim_forms, monomial_index, monomials,
                    projective_points, quadratic_index)
from .linalg import QQ, Field, field_from_token

__all__ = [
    "ExplicitMonad",
    "SolutionSpaceTooSmall",
    "AlphaH0NotInjective",
    "random_monad",
    "planted_alpha",
    "beta_equations",
    "h0_graded",
    "h0_beta_matrix",
    "h1_dual_coker",
    "direct_sum",
    "zero_monad",
    "instanton_monad",
    "restrict_left",
    "restrict_right",
    "fiber_rank_drops",
]

DEFAULT_SAMPLING_PRIME = 10007
RETRY_BUDGET = 32
EXHAUSTIVE_LIMIT = 2_000_000


class SolutionSpaceTooSmall(ValueError):
    """No fiberwise surjective beta with beta.alpha = 0 was found."""


class AlphaH0NotInjective(ValueError):
    pass


@dataclass
class ExplicitMonad:
    """O(-1)^a --alpha--> O^b --beta--> O(1)^c on P^n.

    ``alpha`` is b x a and ``beta`` is c x b; coefficients are integers,
    read in Q or reduced mod p according to ``field``.
    """

    alpha: LinearFormMatrix
    beta: LinearFormMatrix
    n: int
    field: Field = QQ
    seed: int | None = None

    @property
    def a(self) -> int:
        return self.alpha.cols

    @property
    def b(self) -> int:
        return self.alpha.rows

    @property
    def c(self) -> int:
        return self.beta.rows

    @property
    def rank(self) -> int:
        return self.b - self.a - self.c

    @property
    def c1(self) -> int:
        return self.a - self.c

    def composite(self) -> np.ndarray:
        """Coefficients of beta.alpha, shape (c, a, dim S_2)."""
        n = self.n
        A = self.alpha.coeffs.astype(object)
        B = self.beta.coeffs.astype(object)
        out = np.zeros((self.c, self.a, dim_forms(n, 2)), dtype=object)
        if self.c == 0 or self.a == 0 or self.b == 0:
            return out
        P = np.einsum("ilu,ljv->ijuv", B, A)
        qi = quadratic_index(n)
        for u in range(n + 1):
            for v in range(n + 1):
                out[:, :, qi[u, v]] += P[:, :, u, v]
        if self.field.p:
            out %= self.field.p
        return out

    def is_complex(self) -> bool:
        return not np.any(self.composite() != 0)

    def dual(self) -> "ExplicitMonad":
        """O(-1)^c --beta^T--> O^b --alpha^T--> O(1)^a."""
        return ExplicitMonad(self.beta.transpose(), self.alpha.transpose(), self.n, self.field, self.seed)

    def shape(self) -> tuple[int, int, int]:
        return self.a, self.b, self.c

    def to_json(self) -> dict:
        return {
            "a": self.a, "b": self.b, "c": self.c, "n": self.n,
            "field": self.field.token(), "seed": self.seed,
            "alpha": self.alpha.to_json(), "beta": self.beta.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExplicitMonad":
        n, a, b, c = obj["n"], obj["a"], obj["b"], obj["c"]
        alpha = _matrix(obj["alpha"], (b, a), n + 1)
        beta = _matrix(obj["beta"], (c, b), n + 1)
        return cls(alpha, beta, n, field_from_token(obj.get("field", "QQ")), obj.get("seed"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _matrix(obj, shape, nvars) -> LinearFormMatrix:
    if shape[0] == 0 or shape[1] == 0:
        return LinearFormMatrix(np.zeros((shape[0], shape[1], nvars), dtype=np.int64))
    return LinearFormMatrix(obj)


def zero_monad(n: int, field: Field = QQ) -> ExplicitMonad:
    z = np.zeros((0, 0, n + 1), dtype=np.int64)
    return ExplicitMonad(LinearFormMatrix(z), LinearFormMatrix(z), n, field)


def beta_equations(alpha: LinearFormMatrix, n: int) -> list[list[int]]:
    """Linear system on a beta row s (indexed l*(n+1)+u) expressing s.alpha = 0."""
    b, a = alpha.rows, alpha.cols
    qi = quadratic_index(n)
    nq = dim_forms(n, 2)
    A = alpha.coeffs
    rows = np.zeros((a * nq, b * (n + 1)), dtype=object)
    for j in range(a):
        for l in range(b):
            for u in range(n + 1):
                for v in range(n + 1):
                    if A[l, j, v]:
                        rows[j * nq + qi[u, v], l * (n + 1) + u] += int(A[l, j, v])
    return rows.tolist()


def planted_alpha(kind: str, n: int) -> np.ndarray:
    """alpha vanishing exactly on a planted locus of P^n (n >= 3).

    ``point``: (x_1, ..., x_n, 0, 0), zero set the point [1:0:...:0];
    ``line``: (x_2, ..., x_n, 0, 0), zero set the line x_2 = ... = x_n = 0.
    """
    if n < 3:
        raise ValueError("planted loci are set up on P^n with n >= 3")
    first = {"point": 1, "line": 2}.get(kind)
    if first is None:
        raise ValueError(f"unknown planted locus {kind!r}")
    forms = [np.eye(n + 1, dtype=np.int64)[u] for u in range(first, n + 1)]
    col = forms + [np.zeros(n + 1, dtype=np.int64)] * 2
    return np.array(col, dtype=np.int64).reshape(len(col), 1, n + 1)


def _generic_rank_at(mat: LinearFormMatrix, rng, p: int, trials: int = 4) -> int:
    from .linalg import batched_rank_mod_p

    pts = rng.integers(0, p, size=(trials, mat.nvars))
    if mat.rows == 0 or mat.cols == 0:
        return 0
    return int(batched_rank_mod_p(mat.evaluate(pts, p), p).max())


def _sample_points(rng, n: int, p: int, count: int) -> np.ndarray:
    pts = rng.integers(0, p, size=(count, n + 1))
    zero = ~pts.any(axis=1)
    pts[zero, 0] = 1
    return pts


def fiber_rank_drops(m: ExplicitMonad, points: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Masks of points where alpha is not injective / beta is not surjective."""
    from .linalg import batched_rank_mod_p

    N = len(points)
    a_drop = np.zeros(N, dtype=bool)
    b_drop = np.zeros(N, dtype=bool)
    if m.a:
        for s in range(0, N, 1 << 16):
            vals = m.alpha.evaluate(points[s:s + (1 << 16)], p)
            a_drop[s:s + len(vals)] = batched_rank_mod_p(vals, p) < m.a
    if m.c:
        for s in range(0, N, 1 << 16):
            vals = m.beta.evaluate(points[s:s + (1 << 16)], p)
            b_drop[s:s + len(vals)] = batched_rank_mod_p(vals, p) < m.c
    return a_drop, b_drop


def random_monad(a: int, b: int, c: int, n: int, field: Field = QQ, seed: int = 0,
                 planted: str | None = None, samples: int = 2000) -> ExplicitMonad:
    """Seeded random linear monad with beta drawn from the solution space of beta.alpha = 0.

    The result is a complex by construction, alpha has full generic rank and
    beta showed no rank drop on ``samples`` random points over F_10007, or
    on every point of P^n when the field is a small finite field.
    """
    if b - a - c < 1:
        raise NonPositiveRank(f"rank {b - a - c} < 1 for ({a},{b},{c})")
    rng = np.random.default_rng(seed)
    p_check = field.p or DEFAULT_SAMPLING_PRIME
    if planted is not None:
        base = planted_alpha(planted, n)
        if (a, b) != (1, base.shape[0]):
            raise ValueError(f"planted {planted} alpha needs a = 1 and b = {base.shape[0]}")
        alpha = LinearFormMatrix(base)
    else:
        for _ in range(RETRY_BUDGET):
            alpha = LinearFormMatrix(field.random(rng, (b, a, n + 1), bound=1))
            if _generic_rank_at(alpha, rng, p_check) == a:
                break
        else:
            raise SolutionSpaceTooSmall("no alpha of full generic rank found")
    basis = field.nullspace(beta_equations(alpha, n), b * (n + 1)) if c else []
    if basis and field.is_rational:
        basis = lll_reduce(basis)
    if c and len(basis) < c:
        raise SolutionSpaceTooSmall(
            f"the rows of beta with beta.alpha = 0 span only {len(basis)} < {c} dimensions")
    basis_arr = np.array(basis, dtype=object).reshape(len(basis), b * (n + 1)) if c else None
    for _ in range(RETRY_BUDGET):
        if c:
            comb = np.array(field.random(rng, (c, len(basis)), bound=3), dtype=object)
            rows = comb.dot(basis_arr)
            rows = np.array([_primitive(r, field) for r in rows], dtype=object)
            beta = LinearFormMatrix(rows.reshape(c, b, n + 1).tolist())
        else:
            beta = LinearFormMatrix(np.zeros((0, b, n + 1), dtype=np.int64))
        m = ExplicitMonad(alpha, beta, n, field, seed)
        if c and _generic_rank_at(beta, rng, p_check) < c:
            continue
        if field.p and count_projective_points(n, field.p) <= EXHAUSTIVE_LIMIT:
            pts = projective_points(n, field.p)
        else:
            pts = _sample_points(rng, n, p_check, samples)
        _, b_drop = fiber_rank_drops(m, pts, p_check)
        if not b_drop.any():
            return m
    raise SolutionSpaceTooSmall(f"no fiberwise surjective beta after {RETRY_BUDGET} draws")


def lll_reduce(basis: list[list[int]]) -> list[list[int]]:
    """LLL-reduced integer basis of the same lattice (keeps coefficients small)."""
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in basis], (len(basis), len(basis[0])), ZZ)
    return [[int(x) for x in row] for row in dm.lll().to_list()]


def _primitive(row, field: Field):
    if field.p:
        return [int(x) % field.p for x in row]
    from math import gcd

    g = 0
    for x in row:
        g = gcd(g, int(x))
    return [int(x) // g for x in row] if g else [int(x) for x in row]


def _toeplitz(coords: list[int], rows: int, cols: int, nvars: int) -> np.ndarray:
    """Multiplication by sum_i x_{coords[i]} z^i from Poly_{<cols} to Poly_{<rows}."""
    out = np.zeros((rows, cols, nvars), dtype=np.int64)
    for j in range(cols):
        for i, u in enumerate(coords):
            if i + j < rows:
                out[i + j, j, u] = 1
    return out


def _window(coords: list[int], start: int, size: int, length: int, nvars: int) -> np.ndarray:
    """Coefficients z^start .. z^(start+size-1) of (sum_i x_{coords[i]} z^i) * g, g in Poly_{<length}."""
    out = np.zeros((size, length, nvars), dtype=np.int64)
    for t in range(size):
        for i, u in enumerate(coords):
            j = start + t - i
            if 0 <= j < length:
                out[t, j, u] = 1
    return out


def instanton_monad(c: int, n: int, field: Field = QQ) -> ExplicitMonad:
    """O(-1)^c -> O^(2c+n-1) -> O(1)^c on P^n with entries +-x_u.

    The coordinates split into x(z) of degree ceil((n-1)/2) and y(z); alpha is
    f -> (y f, -x f) and beta takes a fixed window of coefficients of
    x g + y h, so beta.alpha = 0 by commutativity.  For odd n both maps have
    full rank everywhere; for even n the construction is dualized so that the
    single degenerate point sits on alpha.
    """
    if c < 1 or n < 1:
        raise ValueError("need c >= 1 and n >= 1")
    nv = n + 1
    k = n // 2
    xs, ys = list(range(0, k + 1)), list(range(k + 1, nv))
    dx, dy = len(xs) - 1, len(ys) - 1
    ly, lx = c + dy, c + dx  # lengths of y f and x f
    alpha = np.concatenate([_toeplitz(ys, ly, c, nv), -_toeplitz(xs, lx, c, nv)], axis=0)
    start = dy if n % 2 == 0 else dx
    beta = np.concatenate([_window(xs, start, c, ly, nv), _window(ys, start, c, lx, nv)], axis=1)
    m = ExplicitMonad(LinearFormMatrix(alpha), LinearFormMatrix(beta), n, field)
    return m.dual() if n % 2 == 0 else m


def restrict_left(m: ExplicitMonad, a: int, seed: int = 0) -> ExplicitMonad:
    """Compose alpha with a seeded generic inclusion O(-1)^a -> O(-1)^(m.a)."""
    rng = np.random.default_rng(seed)
    P = np.array(m.field.random(rng, (m.a, a), bound=2), dtype=object)
    alpha = np.einsum("lju,jk->lku", m.alpha.coeffs.astype(object), P)
    if m.field.p:
        alpha %= m.field.p
    return ExplicitMonad(LinearFormMatrix(alpha.tolist()), m.beta, m.n, m.field, seed)


def restrict_right(m: ExplicitMonad, c: int, seed: int = 0) -> ExplicitMonad:
    """Compose beta with a seeded generic projection O(1)^(m.c) -> O(1)^c."""
    return restrict_left(m.dual(), c, seed).dual()


def _mult_matrix(mat: LinearFormMatrix, n: int, k: int) -> list[list[int]]:
    """Matrix of H^0 of mat: (forms of degree k)^cols -> (forms of degree k+1)^rows."""
    src, tgt = monomials(n, k), monomial_index(n, k + 1)
    ns, nt = len(src), len(tgt)
    out = [[0] * (mat.cols * ns) for _ in range(mat.rows * nt)]
    C = mat.coeffs
    for l in range(mat.cols):
        for si, mono in enumerate(src):
            col = l * ns + si
            for u in range(n + 1):
                e = list(mono)
                e[u] += 1
                ti = tgt[tuple(e)]
                for i in range(mat.rows):
                    x = C[i, l, u]
                    if x:
                        out[i * nt + ti][col] += int(x)
    return out


def h0_beta_matrix(m: ExplicitMonad, k: int) -> list[list[int]]:
    return _mult_matrix(m.beta, m.n, k)


def h0_graded(m: ExplicitMonad, k: int) -> int:
    """h^0(E(k)) = dim ker H^0 beta(k) - a dim S_{k-1} (requires H^0 alpha(k) injective)."""
    n = m.n
    src = m.b * dim_forms(n, k)
    if src == 0:
        return 0
    left = m.a * dim_forms(n, k - 1)
    if left:
        ra = m.field.rank(_mult_matrix(m.alpha, n, k - 1))
        if ra != left:
            raise AlphaH0NotInjective(f"H^0 alpha({k}) has rank {ra} < {left}")
    kernel = src - (m.field.rank(h0_beta_matrix(m, k)) if m.c else 0)
    return kernel - left


def h1_dual_coker(m: ExplicitMonad) -> int:
    """dim coker of H^0 alpha^*: H^0(O^b) -> H^0(O(1)^a), i.e. h^1 of the dual of ker alpha^T."""
    rows = [[int(x) for x in m.alpha.coeffs[l].reshape(-1)] for l in range(m.b)]
    return m.a * (m.n + 1) - m.field.rank(rows)


def direct_sum(m1: ExplicitMonad, m2: ExplicitMonad) -> ExplicitMonad:
    if m1.n != m2.n or m1.field != m2.field:
        raise ValueError("direct sum needs the same projective space and field")
    n = m1.n

    def block(x: LinearFormMatrix, y: LinearFormMatrix) -> LinearFormMatrix:
        out = np.zeros((x.rows + y.rows, x.cols + y.cols, n + 1), dtype=object)
        out[: x.rows, : x.cols] = x.coeffs
        out[x.rows:, x.cols:] = y.coeffs
        return LinearFormMatrix(out.tolist() if out.size else np.zeros(out.shape, dtype=np.int64))

    return ExplicitMonad(block(m1.alpha, m2.alpha), block(m1.beta, m2.beta), n, m1.field, m1.seed)
