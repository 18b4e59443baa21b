"""Algebraic identities checked on generated inputs."""

import numpy as np
import sympy
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from linmonad.chern import ChernSeries, chern_of_monad, chi_of_kclass, chi_tensor_display_chain, kclass_of_monad, kclass_tensor
from linmonad.cohomology import derive_instanton_table
from linmonad.lab import GF, random_monad
from linmonad.lab.explicit import SolutionSpaceTooSmall
from linmonad.lab.linalg import bareiss_rank, rank_mod_p
from linmonad.lattice import INF, DimRange
from linmonad.monads import direct_sum, dualize, linear
from linmonad.stability import normalize_twist
from linmonad.varieties import chi_line_bundle, h_line_bundle, projective_space, quadric

varieties = st.one_of(st.integers(2, 6).map(projective_space), st.integers(3, 6).map(quadric))


@st.composite
def monad_dims(draw, min_rank=1):
    a = draw(st.integers(0, 4))
    c = draw(st.integers(0, 4))
    b = draw(st.integers(a + c + min_rank, a + c + 6))
    return a, b, c


@given(st.integers(1, 6), st.lists(st.integers(-5, 5), min_size=1, max_size=6))
def test_series_inverse(n, tail):
    s = ChernSeries(n, tuple([1] + tail))
    assert s * s.inverse() == ChernSeries.one(n)
    assert (s * s).inverse() == s.inverse() * s.inverse()


@given(varieties, monad_dims(), monad_dims())
def test_chern_is_multiplicative_on_direct_sums(v, d1, d2):
    s = tuple(x + y for x, y in zip(d1, d2))
    assert chern_of_monad(*s, v) == chern_of_monad(*d1, v) * chern_of_monad(*d2, v)


@given(varieties, monad_dims())
def test_chi_two_paths_agree(v, d):
    k = kclass_of_monad(*d)
    assert chi_tensor_display_chain(*d, v) == chi_of_kclass(kclass_tensor(k, k), v)


@given(monad_dims(), monad_dims())
def test_kclass_tensor_rank_and_c1(d1, d2):
    x, y = kclass_of_monad(*d1), kclass_of_monad(*d2)
    t = kclass_tensor(x, y)
    assert t.rank == x.rank * y.rank
    assert t.c1 == x.rank * y.c1 + y.rank * x.c1
    assert t == kclass_tensor(y, x)


@given(varieties, st.integers(-12, 12))
def test_line_bundle_serre_duality(v, k):
    n = v.n
    for q in range(n + 1):
        assert h_line_bundle(v, q, k) == h_line_bundle(v, n - q, v.lam - k)
    assert sum((-1) ** q * h_line_bundle(v, q, k).lo for q in range(n + 1)) == chi_line_bundle(v, k)


@given(st.integers(1, 30), st.integers(-100, 100), st.integers(-5, 5))
def test_normalized_twist_is_twist_invariant(r, d, t):
    a, b = normalize_twist(r, d), normalize_twist(r, d + r * t)
    assert a.normalized_c1 == b.normalized_c1
    assert a.k_E == b.k_E + t
    assert -r < a.normalized_c1 <= 0


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20))
def test_dimrange_meet_is_commutative(a, b, c, d):
    x, y = DimRange(min(a, b), max(a, b)), DimRange(min(c, d), max(c, d) if d % 3 else INF)
    if max(x.lo, y.lo) <= min(x.hi, y.hi):
        assert x.meet(y) == y.meet(x)
        assert x.meet(y).lo >= x.lo


@given(varieties, monad_dims())
def test_dualize_and_direct_sum(v, d):
    m = linear(*d, v)
    assert dualize(dualize(m)) == m
    s = direct_sum(m, dualize(m))
    assert s.c1 == 0 and s.rank == 2 * m.rank


@settings(max_examples=40)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_exact_ranks_agree_with_sympy(rows, cols, seed):
    a = np.random.default_rng(seed).integers(-4, 5, size=(rows, cols)).tolist()
    assert bareiss_rank(a) == sympy.Matrix(a).rank()
    assert rank_mod_p(a, 2) <= bareiss_rank(a)


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from([2, 3, 4]), st.sampled_from([(1, 1), (1, 2), (2, 1), (2, 2)]), st.integers(2, 5),
       st.integers(0, 1000))
def test_random_monads_are_complexes(n, ac, extra, seed):
    a, c = ac
    try:
        m = random_monad(a, a + c + extra, c, n, GF(10007), seed=seed)
    except SolutionSpaceTooSmall:
        return
    assert m.is_complex()
    assert m.shape() == (a, a + c + extra, c)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.integers(1, 3), st.integers(1, 3))
def test_engine_respects_serre_duality_for_instantons(n, c, extra):
    """E* of an instanton is again an instanton of the same charge; the derived
    intervals for h^q(E(k)) and h^(n-q)(E(-k-n-1)) must intersect."""
    v = projective_space(n)
    m = linear(c, 2 * c + extra, c, v)
    t = derive_instanton_table(m, locally_free=True, window=(-n - 4, 3)).table("E")
    for k in range(-3, 1):
        for q in range(n + 1):
            x, y = t.get(q, k), t.get(n - q, -k - n - 1)
            assert max(x.lo, y.lo) <= min(x.hi, y.hi), (q, k, x, y)
