from fractions import Fraction

import pytest

from linmonad.monads import MonadExtension, MonadSpec, Twisted, dualize, linear
from linmonad.stability import (
    HoppeEvidence,
    SectionWitness,
    StabilityVerdict,
    SubobjectWitness,
    TheoremCitation,
    WrongRoute,
    hoppe_verdict,
    instanton_verdict,
    linear_verdict,
    normalize_twist,
    replay_certificate,
    sections_obstruction,
    special_verdict,
    verdict,
)
from linmonad.varieties import custom_variety, projective_space, quadric

P3, P4, Q3 = projective_space(3), projective_space(4), quadric(3)


@pytest.mark.parametrize("r,d,k", [(2, 0, 0), (2, 1, -1), (2, -1, 0), (4, 1, -1), (3, 5, -2), (3, -4, 1)])
def test_normalize_twist(r, d, k):
    nt = normalize_twist(r, d)
    assert nt.k_E == k
    assert -r < nt.normalized_c1 <= 0


def test_hoppe_thresholds():
    # rank 2, c1 = 0: normalized twist 0, vanishing at -1 is one short of stable
    assert hoppe_verdict({1: -1}, 2, 0).status == "Semistable"
    assert hoppe_verdict({1: 0}, 2, 0).status == "Stable"
    assert hoppe_verdict({1: None}, 2, 0).status == "Undetermined"
    with pytest.raises(ValueError):
        hoppe_verdict({2: 0}, 2, 0)


def test_sections_obstruction():
    w = sections_obstruction(3, 1, P3)
    assert w.h0_lower == 1 and w.c1 == 0
    assert sections_obstruction(2, 1, P3) is None
    assert sections_obstruction(1, 1, P3) is None


def test_instanton_verdicts():
    v = verdict(linear(1, 4, 1, P3), locally_free=True)
    assert v.status == "Semistable" and isinstance(v.certificate, HoppeEvidence)
    assert replay_certificate(v, linear(1, 4, 1, P3))
    assert verdict(linear(1, 4, 1, P3), torsion_free=True).status == "Semistable"
    v = verdict(linear(1, 5, 1, P3), locally_free=True)
    assert v.status == "ProperlySemistable" and v.find(SectionWitness).h0_lower == 1
    assert verdict(linear(3, 12, 3, P3)).status == "Undetermined"
    # rank 7 > (H - 2) c = 6: sections kill stability even without a semistability proof
    assert verdict(linear(3, 13, 3, P3)).status == "NotStable"


def test_instanton_outside_range_is_undetermined_with_conjecture():
    v = instanton_verdict(linear(2, 8, 2, P4), torsion_free=True)
    assert v.status == "Undetermined"
    assert v.conjectures


def test_linear_verdicts():
    assert verdict(linear(2, 7, 1, P4), locally_free=True).status == "Stable"
    dual = verdict(linear(1, 7, 2, P4), locally_free=True)
    assert dual.status == "Stable" and dual.notes
    assert verdict(linear(2, 7, 1, P4)).status == "Undetermined"
    assert verdict(linear(1, 8, 2, P4), locally_free=True).status == "Undetermined"  # r = 5 > n
    with pytest.raises(WrongRoute):
        linear_verdict(linear(1, 4, 1, P3), locally_free=True)
    with pytest.raises(WrongRoute):
        instanton_verdict(linear(2, 7, 1, P4))


def test_special_verdicts():
    sp = MonadSpec(1, 5, 1, Q3, "M2.1")
    assert special_verdict(sp, locally_free=True).status == "Undetermined"
    v = special_verdict(sp, torsion_free=True, c1=0)
    assert v.status == "Semistable" and v.citations
    assert special_verdict(MonadSpec(1, 6, 1, Q3, "M2.1"), locally_free=True, c1=1).status == "Stable"
    assert special_verdict(linear(1, 4, 1, Q3), locally_free=True).status == "Semistable"
    with pytest.raises(ValueError):
        special_verdict(linear(1, 4, 1, P3))


def test_extensions():
    f = linear(2, 7, 1, P4)
    v = verdict(MonadExtension(f, dualize(f)), locally_free=True)
    w = v.find(SubobjectWitness)
    assert v.status == "NotSemistable" and w.strict and w.mu_sub == Fraction(1, 4)
    e = verdict(MonadExtension(linear(0, 1, 0, P4), linear(4, 13, 5, P4)))
    assert e.status == "NotStable" and e.find(SectionWitness).h0_lower == 1
    assert e.notes  # c1 < 0 also breaks semistability


def test_twist_does_not_change_verdict():
    m = linear(1, 4, 1, P3)
    assert verdict(Twisted(m, 3), locally_free=True).status == verdict(m, locally_free=True).status


def test_missing_vanishing_hypothesis():
    x = custom_variety(3, 1, 1, 4, 6, vanishing_hypothesis=False)
    assert verdict(linear(1, 4, 1, x), locally_free=True).status == "Undetermined"


def test_verdict_invariants_and_json():
    with pytest.raises(ValueError):
        StabilityVerdict("Stable", [])
    with pytest.raises(ValueError):
        StabilityVerdict("Wobbly", [TheoremCitation("x", ())])
    j = verdict(linear(1, 4, 1, P3), locally_free=True).to_json()
    assert j["status"] == "Semistable" and j["certificate"][0]["kind"] == "HoppeEvidence"
