import pytest

from linmonad.cohomology import CohomologyEngine, CohTable, Contradiction
from linmonad.lattice import UNKNOWN, ZERO, DimRange, exact
from linmonad.monads import SES, Term
from linmonad.varieties import bott_forms, h_line_bundle, projective_space


def euler_engine(n, window):
    """0 -> W(k) -> O(k)^(n+1) -> O(k+1) -> 0 with W = Omega^1(1)."""
    v = projective_space(n)
    eng = CohomologyEngine(n, window)
    eng.add_oracle("O", lambda q, k: h_line_bundle(v, q, k))
    eng.add_node("W")
    eng.add_sequence(SES("euler", (Term("W"),), (Term("O", n + 1),), (Term("O", 1, 1),), "Euler"))
    return eng.propagate()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_euler_sequence_reproduces_bott(n):
    eng = euler_engine(n, (-8, 8))
    t = eng.table("W")
    for k in range(-8, 9):
        for q in range(n + 1):
            r, want = t.get(q, k), bott_forms(n, q, 1, k + 1)
            assert r.contains(want), (q, k)
            # dimension counting cannot see that H^0 of the Euler map is onto
            if k <= -1 or q >= 2:
                assert r == exact(want), (q, k)
    assert t.get(0, 0) == t.get(1, 0) == DimRange(0, n + 1)


def test_trace_and_explain():
    eng = euler_engine(3, (-3, 3))
    steps = eng.explain("W", 1, -1)
    assert steps and steps[-1].after == exact(1)
    assert "euler" in steps[-1].describe()


def test_contradiction_on_inconsistent_seed():
    eng = CohomologyEngine(2, (-2, 2))
    eng.add_oracle("O", lambda q, k: h_line_bundle(projective_space(2), q, k))
    eng.add_node("W")
    eng.seed("W", 0, 0, exact(5), "wrong on purpose")
    eng.add_sequence(SES("euler", (Term("W"),), (Term("O", 3),), (Term("O", 1, 1),)))
    with pytest.raises(Contradiction):
        eng.propagate()


def test_zero_node_and_unknown_cells():
    eng = CohomologyEngine(2, (-1, 1))
    eng.add_node("Z", zero=True)
    eng.add_node("X")
    assert eng.cell("Z", 1, 0) == ZERO
    assert eng.cell("X", 1, 0) == UNKNOWN


def test_table_round_trips():
    t = euler_engine(3, (-2, 2)).table("W")
    assert CohTable.from_csv(t.to_csv(), "W", 3).entries == t.entries
    back = CohTable.from_json(t.to_json())
    assert back.entries == t.entries and back.window == t.window
    assert t.euler_characteristic(0) is None
    assert t.euler_characteristic(-1) == sum((-1) ** q * bott_forms(3, q, 1, 0) for q in range(4)) == -1


def test_cells_outside_window_are_unknown():
    t = euler_engine(2, (-1, 1)).table("W")
    assert not t.in_window(5)
    assert t.get(0, 5) == DimRange()
