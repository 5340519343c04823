from fractions import Fraction
from itertools import product

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from freespace.geometry import (
    convex_hull3, locate_point, minkowski_sum_convex, negate_body, orient2d, orient3d, primitive,
    pt, rat, seg2_intersect, separated, solve3, translate_body,
)

small = st.integers(-6, 6)
point3 = st.tuples(small, small, small)


def cube(lo=0, hi=1):
    return convex_hull3([pt(*c) for c in product((lo, hi), repeat=3)])


def test_rat_accepts_exact_forms():
    assert rat(3) == 3
    assert rat("-2/6") == Fraction(-1, 3)
    assert rat(Fraction(1, 2)) == Fraction(1, 2)


@pytest.mark.parametrize("bad", [0.5, "1.5", "1e3", True, None, ""])
def test_rat_refuses_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        rat(bad)


def test_orientation_signs():
    a, b, c = pt(0, 0), pt(1, 0), pt(0, 1)
    assert orient2d(a, b, c) == 1
    assert orient2d(a, c, b) == -1
    assert orient2d(a, b, pt(2, 0)) == 0
    o = pt(0, 0, 0)
    assert orient3d(o, pt(1, 0, 0), pt(0, 1, 0), pt(0, 0, 1)) != 0
    assert orient3d(o, pt(1, 0, 0), pt(0, 1, 0), pt(5, 7, 0)) == 0


def test_primitive_direction():
    assert primitive((Fraction(2, 3), Fraction(-4, 3), 0)) == (1, -2, 0)


def test_solve3_exact():
    rows = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]
    x = solve3(rows, (Fraction(1), Fraction(2), Fraction(3)))
    assert [sum(r[i] * x[i] for i in range(3)) for r in rows] == [1, 2, 3]


def test_segment_intersections():
    s = (pt(0, 0), pt(2, 2))
    assert seg2_intersect(s, (pt(0, 2), pt(2, 0))).a == (1, 1)
    assert seg2_intersect(s, (pt(3, 0), pt(4, 0))).kind == "empty"
    hit = seg2_intersect(s, (pt(1, 1), pt(3, 3)))
    assert hit.kind == "overlap" and (hit.a, hit.b) == ((1, 1), (2, 2))
    assert seg2_intersect(s, (pt(2, 2), pt(3, 1))).a == (2, 2)


def test_cube_hull_counts():
    c = cube()
    assert (c.dim, len(c.vertices), len(c.edges), len(c.facets)) == (3, 8, 12, 6)
    assert len(c.triangles()) == 12


def test_lower_dimensional_hulls():
    assert convex_hull3([pt(0, 0, 0)] * 3).dim == 0
    assert convex_hull3([pt(0, 0, 0), pt(1, 1, 1), pt(2, 2, 2)]).dim == 1
    tri = convex_hull3([pt(0, 0, 0), pt(1, 0, 0), pt(0, 1, 0), pt(1, 1, 0)])
    assert tri.dim == 2 and len(tri.vertices) == 4


@settings(max_examples=40, deadline=None)
@given(st.lists(point3, min_size=4, max_size=12, unique=True))
def test_hull_contains_its_inputs(points):
    body = convex_hull3([pt(*p) for p in points])
    for p in points:
        assert locate_point(body, pt(*p)).kind != "outside"
    if body.dim == 3:
        for f in body.facets:
            assert all(sum(a * b for a, b in zip(f.normal, pt(*p))) <= f.offset for p in points)


def test_locate_point_features():
    c = cube()
    assert locate_point(c, pt("1/2", "1/2", "1/2")).kind == "interior"
    assert locate_point(c, pt(2, 0, 0)).kind == "outside"
    assert locate_point(c, pt(0, 0, 0)).feature[0] == 0
    assert locate_point(c, pt("1/2", 0, 0)).feature[0] == 1
    assert locate_point(c, pt("1/2", "1/2", 0)).feature[0] == 2


def test_minkowski_of_cubes():
    s = minkowski_sum_convex(cube(), negate_body(cube()))
    assert s.vertices[0] == (-1, -1, -1) and s.vertices[-1] == (1, 1, 1)
    assert len(s.facets) == 6


@settings(max_examples=60, deadline=None)
@given(point3, st.booleans())
def test_separation_is_sound(shift, weak):
    a, b = cube(), cube()
    sh = pt(*shift)
    if separated(a, b, sh, weak=weak):
        moved = translate_body(b, sh)
        gap = [max(0, moved.bbox()[0][k] - 1, -moved.bbox()[1][k]) for k in range(3)]
        touching = [moved.bbox()[0][k] - 1 == 0 or moved.bbox()[1][k] == 0 for k in range(3)]
        assert any(gap) or (weak and any(touching))


@settings(max_examples=200, deadline=None)
@given(point3, point3, point3, st.integers(0, 4), st.integers(0, 4))
def test_planar_location_matches_barycentric(a, b, c, i, j):
    a, b, c = pt(*a), pt(*b), pt(*c)
    tri = convex_hull3([a, b, c])
    if tri.dim != 2:
        return
    # convex combination with weights i/8, j/8 and the rest
    wa, wb = Fraction(i, 8), Fraction(j, 8)
    wc = 1 - wa - wb
    p = tuple(wa * x + wb * y + wc * z for x, y, z in zip(a, b, c))
    inside = wc >= 0
    assert (locate_point(tri, p).kind != "outside") == inside
