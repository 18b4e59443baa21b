from fractions import Fraction

import pytest

from linmonad.chern import (
    ChernSeries,
    KClass,
    NoOracle,
    chern_of_monad,
    chi_of_kclass,
    chi_tensor_display_chain,
    exterior_c1,
    kclass_of_monad,
    kclass_tensor,
    rank_and_c1,
    slope,
)
from linmonad.varieties import chi_line_bundle, projective_space, quadric


def test_rank_and_c1():
    assert rank_and_c1(2, 7, 1) == (4, 1)
    assert rank_and_c1(4, 13, 5) == (4, -1)
    assert rank_and_c1(1, 4, 1, l=2) == (2, 0)


def test_chern_series_of_linear_sheaf():
    # 1/((1-l)^2 (1+l)) on P4
    cs = chern_of_monad(2, 7, 1, projective_space(4))
    assert cs.coeffs == tuple(map(Fraction, (1, 1, 2, 2, 3)))
    assert cs.c1 == 1
    assert ChernSeries.from_json(cs.to_json()) == cs
    with pytest.raises(ValueError):
        chern_of_monad(3, 4, 2, projective_space(3))


def test_series_inverse_and_power():
    s = ChernSeries(5, (1, 3, -2, 7))
    assert s * s.inverse() == ChernSeries.one(5)
    assert s ** 3 == s * s * s
    assert s ** -2 == (s * s).inverse()
    with pytest.raises(ZeroDivisionError):
        ChernSeries(3, (0, 1)).inverse()


def test_kclass_arithmetic():
    k = kclass_of_monad(1, 4, 1)
    assert (k.rank, k.c1) == (2, 0)
    assert k.twist(2).terms == ((1, -1), (2, 4), (3, -1))
    sq = kclass_tensor(k, k)
    assert (sq.rank, sq.c1) == (4, 0)
    assert (k - k).terms == ()
    assert k.scale(3).rank == 6


def test_chi_paths_agree_on_quadrics():
    for n in (3, 4, 5):
        v = quadric(n)
        for a, b, c in [(1, 4, 1), (2, 8, 1), (1, 6, 2)]:
            k = kclass_of_monad(a, b, c)
            assert chi_tensor_display_chain(a, b, c, v) == chi_of_kclass(kclass_tensor(k, k), v)


def test_chi_of_monad_cohomology_is_alternating_sum():
    v = projective_space(3)
    k = kclass_of_monad(1, 5, 1)
    want = 5 * chi_line_bundle(v, 0) - chi_line_bundle(v, -1) - chi_line_bundle(v, 1)
    assert chi_of_kclass(k, v) == want == 1


def test_opaque_summands_have_no_oracle():
    x = KClass.from_counter({0: 5, 1: -1}, {"S(-1)": -1})
    with pytest.raises(NoOracle):
        chi_of_kclass(x, quadric(3))
    with pytest.raises(NoOracle):
        x.rank
    with pytest.raises(NoOracle):
        kclass_tensor(x, x)


def test_slope_and_exterior_c1():
    assert slope(1, 4, projective_space(4)) == Fraction(1, 4)
    assert slope(-1, 2, quadric(3)) == Fraction(-1)
    assert exterior_c1(4, 1, 2) == (6, 3)
    with pytest.raises(ValueError):
        slope(1, 0, projective_space(2))
