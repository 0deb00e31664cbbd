import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malle.frobenius import local_scan
from malle.polyalg import UniPoly
from malle.twist2 import (
    QuadTwist, TwistError, lang_weil_on_twist, local_point_residues, verify_global, verify_grid,
    verify_local,
)

F = UniPoly((0, -1, 1))


def test_global_examples():
    assert verify_global(QuadTwist(F, 2), 9) is True
    assert verify_global(QuadTwist(F, 3), 9) is False
    assert verify_global(QuadTwist(F, 1), 2) is False
    assert not any(verify_global(QuadTwist(F, 1), t) for t in range(2, 3000))
    with pytest.raises(TwistError):
        verify_global(QuadTwist(F, 2), 1)


def test_local_examples(quad):
    assert verify_local(QuadTwist(F, 3), 17)
    assert 3 * 36 % 17 == 6
    split = sorted(local_scan(quad, 17).class_residues["1A"])
    assert local_point_residues(QuadTwist(F, 1), 17) == split == [2, 6, 7, 9, 11, 12, 16]


def test_point_counts():
    assert lang_weil_on_twist(QuadTwist(F, 1), 17).total == 18
    pc = lang_weil_on_twist(QuadTwist(UniPoly((0, -1, 0, 1)), 1), 7)
    assert pc.genus == 1 and pc.within and pc.total == 8
    with pytest.raises(TwistError):
        lang_weil_on_twist(QuadTwist(F, 7), 7)


def test_invalid_twists():
    with pytest.raises(TwistError):
        QuadTwist(F, 4)
    with pytest.raises(TwistError):
        QuadTwist(F, 0)
    with pytest.raises(TwistError):
        QuadTwist(UniPoly((0, 0, 1)), 2)


def test_cross_module_consistency(quad):
    for p in (17, 19, 23, 101, 499):
        assert local_point_residues(QuadTwist(F, 1), p) == sorted(local_scan(quad, p).class_residues["1A"])


@pytest.mark.parametrize("f", [F, UniPoly((0, -1, 0, 1)), UniPoly((1, 0, 0, 0, 0, 1))])
def test_genus_invariant_under_twist(f):
    for d in (-3, -1, 2, 5):
        tw = QuadTwist(f, d)
        assert tw.genus == tw.genus_of_twist()


def test_grid_small():
    rep = verify_grid(F, [-1, 2, 3], (-500, 500), [3, 5, 7, 11, 13])
    assert rep.violations == [] and rep.global_checked == 3 * 999


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([-3, -2, -1, 2, 3, 5, 6, 7, 10]), st.sampled_from([11, 13, 17, 19, 23, 29, 101]))
def test_local_identity(d, p):
    tw = QuadTwist(F, d)
    if d % p == 0:
        return
    assert verify_local(tw, p)
    assert lang_weil_on_twist(tw, p).within
