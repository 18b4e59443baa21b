import numpy as np
import pytest
import sympy
from sympy.polys.matrices import DomainMatrix

from linmonad.lab import GF, QQ, degeneration_scan, field_from_token, h0_graded, h1_dual_coker, random_monad
from linmonad.lab.explicit import (
    AlphaH0NotInjective,
    ExplicitMonad,
    SolutionSpaceTooSmall,
    direct_sum,
    fiber_rank_drops,
    instanton_monad,
    planted_alpha,
    restrict_left,
    restrict_right,
    zero_monad,
)
from linmonad.lab.forms import LinearFormMatrix, count_projective_points, dim_forms, monomials, projective_points
from linmonad.lab.linalg import bareiss_rank, batched_rank_mod_p, nullspace_mod_p, rank_mod_p, rref_nullspace_qq
from linmonad.lab.scan import EnumerationBudgetExceeded, classify_codim, validate_explicit
from linmonad.monads import NonPositiveRank


# -- exact linear algebra, with sympy as the oracle -----------------------------

@pytest.mark.parametrize("seed", range(6))
def test_bareiss_and_nullspace_match_sympy(seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(1, 7, size=2)
    a = rng.integers(-3, 4, size=(rows, cols))
    a[-1] = a[0] * 2 - (a[1] if rows > 1 else 0)
    M = sympy.Matrix(a.tolist())
    assert bareiss_rank(a.tolist()) == M.rank()
    ns = rref_nullspace_qq(a.tolist(), cols)
    assert len(ns) == cols - M.rank()
    for v in ns:
        assert all(isinstance(x, int) for x in v)
        assert M * sympy.Matrix(v) == sympy.zeros(rows, 1)


@pytest.mark.parametrize("p", [2, 7, 101])
def test_mod_p_rank_and_nullspace(p):
    rng = np.random.default_rng(p)
    a = rng.integers(0, p, size=(5, 7))
    a[4] = (a[0] + 3 * a[1]) % p
    r = rank_mod_p(a.tolist(), p)
    F = sympy.GF(p)
    assert r == DomainMatrix([[F(int(x)) for x in row] for row in a], a.shape, F).rank()
    ns = nullspace_mod_p(a.tolist(), p)
    assert len(ns) == 7 - r
    assert not np.any(a.dot(ns.T) % p)
    stack = np.stack([a[:, :5], np.zeros((5, 5), dtype=np.int64), np.eye(5, dtype=np.int64)])
    assert list(batched_rank_mod_p(stack, p)) == [rank_mod_p(s.tolist(), p) for s in stack]


def test_fields():
    assert field_from_token("QQ") == QQ
    assert field_from_token("GF(101)") == GF(101) == field_from_token("F_101")
    with pytest.raises(ValueError):
        GF(100)
    with pytest.raises(ValueError):
        field_from_token("R")


# -- forms -----------------------------------------------------------------

def test_forms_and_points():
    assert len(monomials(3, 2)) == dim_forms(3, 2) == 10
    assert dim_forms(2, -1) == 0
    pts = projective_points(2, 5)
    assert len(pts) == count_projective_points(2, 5) == 31
    assert len({tuple(x) for x in pts}) == 31
    m = LinearFormMatrix([[[1, 2, 0]], [[0, 0, 1]]])
    vals = m.evaluate(np.array([[1, 1, 1], [0, 1, 0]]), 7)
    assert vals.shape == (2, 2, 1)
    assert vals[:, :, 0].tolist() == [[3, 1], [2, 0]]
    assert m.transpose().transpose() == m
    assert LinearFormMatrix.from_json(m.to_json()) == m


# -- explicit monads ----------------------------------------------------------

def test_random_monad_is_complex_and_seeded():
    m = random_monad(1, 4, 1, 3, QQ, seed=3)
    assert m.is_complex() and m.shape() == (1, 4, 1) and (m.rank, m.c1) == (2, 0)
    assert random_monad(1, 4, 1, 3, QQ, seed=3).dumps() == m.dumps()
    assert ExplicitMonad.from_json(m.to_json()).dumps() == m.dumps()
    with pytest.raises(NonPositiveRank):
        random_monad(2, 3, 1, 3)
    with pytest.raises(SolutionSpaceTooSmall):
        random_monad(2, 5, 1, 3, QQ)


def test_null_correlation_sections():
    m = random_monad(1, 4, 1, 3, QQ, seed=0)
    # h0(N(k)) for the null-correlation bundle on P3
    assert [h0_graded(m, k) for k in range(-1, 4)] == [0, 0, 5, 16, 35]


def test_instanton_monad_families():
    for n in range(2, 7):
        for c in (1, 2, 3):
            m = instanton_monad(c, n)
            assert m.is_complex() and m.shape() == (c, 2 * c + n - 1, c)
            r = validate_explicit(m, samples=500, q=101)
            assert r.beta_drop_count == 0
            if n % 2:
                assert r.alpha_drop_count == 0


def test_restrictions_keep_complexes():
    base = instanton_monad(3, 4)
    assert restrict_left(base, 2).shape() == (2, 9, 3)
    assert restrict_right(base, 2).shape() == (3, 9, 2)
    assert restrict_left(base, 2).is_complex() and restrict_right(base, 1).is_complex()


def test_dual_and_direct_sum():
    m = random_monad(2, 7, 1, 4, QQ, seed=0)
    d = m.dual()
    assert d.shape() == (1, 7, 2) and d.is_complex()
    s = direct_sum(m, d)
    assert s.shape() == (3, 14, 3) and s.c1 == 0 and s.rank == 8 and s.is_complex()
    assert zero_monad(3).shape() == (0, 0, 0)


def test_h1_dual_coker_generic_values():
    # 4(n+1) - (n+9) for a generic alpha
    assert h1_dual_coker(random_monad(4, 11, 5, 2, QQ, seed=0)) == 1
    assert h1_dual_coker(random_monad(4, 12, 5, 3, QQ, seed=0)) == 4


def test_h0_needs_injective_alpha():
    alpha = np.zeros((4, 1, 4), dtype=np.int64)
    beta = np.zeros((1, 4, 4), dtype=np.int64)
    m = ExplicitMonad(LinearFormMatrix(alpha), LinearFormMatrix(beta), 3)
    with pytest.raises(AlphaH0NotInjective):
        h0_graded(m, 1)


# -- degeneration scans -------------------------------------------------------

def test_planted_loci_hit_exactly():
    a = planted_alpha("point", 3)
    m = ExplicitMonad(LinearFormMatrix(a), LinearFormMatrix(np.zeros((0, 5, 4), dtype=np.int64)), 3, GF(7))
    drops, _ = fiber_rank_drops(m, projective_points(3, 7), 7)
    assert drops.sum() == 1
    with pytest.raises(ValueError):
        planted_alpha("plane", 3)


def test_classification_table():
    assert classify_codim("empty") == "locally-free"
    assert [classify_codim(d) for d in (1, 2, 3, 4)] == ["torsion-possible", "torsion-free", "reflexive", "reflexive"]


def test_scan_reports_and_budget():
    m = random_monad(1, 5, 1, 3, GF(101), seed=0, planted="point")
    # a point is rarely met by 8 planes over F_101: only a lower bound on the codimension
    r = degeneration_scan(m, (0, 1, 2), subspaces=8, seed=1)
    assert r.codim_estimate == ">2" and r.classification == "reflexive"
    assert "not enumerated" in r.confidence
    assert r.to_json()["hits"]["2"][1] == 8
    with pytest.raises(EnumerationBudgetExceeded):
        degeneration_scan(m, (0, 1, 2, 3), subspaces=64, budget=1000)


def test_validate_flags_broken_complex():
    m = random_monad(1, 4, 1, 3, GF(101), seed=0)
    bad = ExplicitMonad(m.alpha, LinearFormMatrix(np.ones((1, 4, 4), dtype=np.int64)), 3, GF(101))
    assert validate_explicit(bad, samples=200).classification == "invalid-monad"
    assert validate_explicit(m, samples=200).classification == "locally-free"
