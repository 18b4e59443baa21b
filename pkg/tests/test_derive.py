import pytest

from linmonad.cohomology import (
    CohTable,
    Indeterminate,
    MissingAssumption,
    beilinson_dims,
    bott_form_oracle,
    build_display_engine,
    coverage_report,
    criterio_check,
    derive_instanton_table,
    derive_special_table,
    exterior_replay,
    closed_form_vanishing,
)
from linmonad.lab import QQ, h0_graded, random_monad
from linmonad.lattice import ZERO, DimRange, exact
from linmonad.monads import MonadSpec, linear
from linmonad.varieties import custom_variety, h_line_bundle, projective_space, quadric

P3 = projective_space(3)


def test_null_correlation_table():
    t = derive_instanton_table(linear(1, 4, 1, P3), locally_free=True).table("E")
    for k in range(-10, 0):
        assert t.get(0, k).is_zero
    assert t.get(1, -1) == exact(1)  # h^1(E(-1)) = charge
    assert t.get(1, -2).is_zero
    assert t.get(2, -3) == exact(1)  # Serre dual of h^1(E(-1))
    assert all(t.get(3, k).is_zero for k in range(-3, 5))


def test_explain_names_the_sequences():
    d = derive_instanton_table(linear(1, 4, 1, P3))
    steps = d.explain("E", 1, -1)
    assert steps and any("via ker" in s for s in steps)
    assert steps[-1].startswith("h^1(E(-1))") and "-> 1 via" in steps[-1]


@pytest.mark.parametrize("v", [projective_space(3), projective_space(4), quadric(3), quadric(4)])
def test_linear_coverage_is_complete(v):
    for a, b, c in [(1, 4, 1), (2, 7, 1), (1, 6, 3), (3, 9, 2)]:
        d = derive_instanton_table(linear(a, b, c, v), locally_free=True)
        assert coverage_report(d) == {"E": set(), "E*": set()}


def test_closed_form_vanishing_dual_top_only_on_quadrics():
    lf = closed_form_vanishing(linear(1, 4, 1, quadric(3)), (-2, 2), locally_free=True)
    assert (3, -2) in lf["E*"]
    assert not any(q == 3 for q, _ in closed_form_vanishing(linear(1, 4, 1, P3), (-2, 2), True)["E*"])


def test_custom_variety_needs_hypothesis():
    x = custom_variety(3, 1, -2, 4, 6, vanishing_hypothesis=False)
    with pytest.raises(MissingAssumption):
        derive_instanton_table(linear(1, 4, 1, x))


def test_special_routes_linear_shapes():
    d = derive_special_table(linear(1, 4, 1, quadric(3)))
    assert d.table("E").get(0, -1).is_zero
    sp = derive_special_table(MonadSpec(1, 5, 1, quadric(3), "M2.1"))
    assert sp.table("E").get(0, -1).is_zero
    assert sp.table("E").get(1, -2).is_zero
    with pytest.raises(ValueError):
        derive_special_table(linear(1, 4, 1, P3))


def test_exterior_replay():
    ev = exterior_replay(linear(1, 4, 1, P3), locally_free=True)
    assert ev.vanishing == {1: -1} and ev.complete
    # rank 2n-1 on P3: q <= 2 directly, q = 3, 4 through the dual
    ev = exterior_replay(linear(2, 9, 2, P3), locally_free=True)
    assert ev.complete and ev.source[4].startswith("dual")
    with pytest.raises(MissingAssumption):
        exterior_replay(linear(1, 4, 1, P3))


def test_criterion_check():
    t = derive_instanton_table(linear(1, 4, 1, P3)).table("E")
    assert criterio_check(t)
    # O(1) has sections at twist -1
    bad = CohTable.unknown("F", 3, (-4, 4))
    for k in range(-4, 5):
        for q in range(4):
            bad.entries[(q, k)] = h_line_bundle(P3, q, k + 1)
    res = criterio_check(bad)
    assert not res and res.failing == (0, -1)
    with pytest.raises(Indeterminate):
        criterio_check(CohTable.unknown("F", 3, (-4, 4)))


def test_beilinson_of_trivial_bundle():
    # O is the monad 0 -> O -> 0
    n = 3
    dims = beilinson_dims(lambda q, k: h_line_bundle(P3, q, k), n,
                          form_twists={p: bott_form_oracle(p, n) for p in range(1, n + 1)})
    assert dims == (0, 1, 0)


@pytest.mark.parametrize("shape,n", [((1, 4, 1), 3), ((2, 7, 1), 4), ((2, 6, 2), 3), ((2, 5, 1), 2)])
def test_beilinson_recovers_monad_from_explicit_sections(shape, n):
    """Seed h^0(E(k)) from an explicit monad; the Euler chain gives back (a, b, c)."""
    a, b, c = shape
    m = random_monad(a, b, c, n, QQ, seed=1)
    w = (-n - 3, 2)
    eng = build_display_engine(linear(a, b, c, projective_space(n)), True, window=w)
    for k in range(w[0], w[1] + 1):
        eng.seed("E", 0, k, exact(h0_graded(m, k)), "explicit matrices")
    eng.propagate()
    assert beilinson_dims(eng.table("E"), n, window=w) == shape


def test_beilinson_indeterminate_without_sections():
    t = derive_instanton_table(linear(1, 4, 1, P3)).table("E")
    with pytest.raises(Indeterminate):
        beilinson_dims(t, 3)
