from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from freespace.constructions import hard_envelope_family, random_segments
from freespace.envelopes import (
    VerticalSegment, cross_envelope_visible, envelope, family_crossings, inverse_ackermann,
    naive_cross_visible, naive_envelope, seg_y,
)

coord = st.integers(-20, 20)


@st.composite
def segment(draw):
    x0 = draw(coord)
    x1 = draw(coord.filter(lambda x: x != x0))
    return ((x0, draw(coord)), (x1, draw(coord)))


def test_two_crossing_segments():
    env = envelope([((0, 0), (4, 4)), ((0, 4), (4, 0))])
    assert [(p.x0, p.x1, p.seg) for p in env.pieces] == [(0, 2, 0), (2, 4, 1)]
    assert env.crossing_count == 1
    assert env.value_at(Fraction(2)) == 2
    assert env.value_at(Fraction(5)) is None


def test_vertical_segment_refused():
    with pytest.raises(VerticalSegment):
        envelope([((1, 0), (1, 5))])


@settings(max_examples=150, deadline=None)
@given(st.lists(segment(), min_size=1, max_size=9), st.sampled_from(["lower", "upper"]))
def test_envelope_matches_slab_oracle(segs, side):
    fast, slow = envelope(segs, side), naive_envelope(segs, side)
    assert fast.pieces == slow.pieces
    assert fast.breakpoints == slow.breakpoints


@settings(max_examples=150, deadline=None)
@given(st.lists(segment(), min_size=1, max_size=8), st.integers(-20, 20))
def test_value_at_is_pointwise_min(segs, x):
    env = envelope(segs, "lower")
    ys = [seg_y(s, Fraction(x)) for s in env.segments if s[0][0] <= x <= s[1][0]]
    assert env.value_at(Fraction(x)) == (min(ys) if ys else None)


@settings(max_examples=100, deadline=None)
@given(st.lists(segment(), min_size=1, max_size=7), st.lists(segment(), min_size=1, max_size=7),
       st.sampled_from(["lower", "upper"]), st.sampled_from(["lower", "upper"]), st.booleans())
def test_cross_visibility_matches_oracle(a, b, side1, side2, transversal):
    assert (cross_envelope_visible(a, side1, b, side2, transversal)
            == naive_cross_visible(a, side1, b, side2, transversal))


def test_random_segments_noncrossing():
    for seed in range(10):
        segs = random_segments(12, seed, noncrossing=True)
        assert len(segs) == 12 and not family_crossings(segs)


def test_hard_family_has_many_crossings():
    for m in (2, 5, 16):
        fam = hard_envelope_family(m)
        assert envelope(fam, "lower").crossing_count == m - 1


def test_inverse_ackermann_is_tiny():
    assert inverse_ackermann(1) == 1
    assert inverse_ackermann(4) == 2
    assert inverse_ackermann(10**6) <= 4
