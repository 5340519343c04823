"""Exact rational geometry: predicates, segment intersection, convex hulls.

Every coordinate is a :class:`fractions.Fraction`.  Points are plain tuples,
which keeps them hashable and cheap to build.  No floating point is used
anywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple, Sequence

Rat = Fraction
Pt2 = tuple  # (x, y)
Pt3 = tuple  # (x, y, z)


def rat(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.  Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coordinate")


def pt(*coords) -> tuple:
    return tuple(rat(c) for c in coords)


def fmt_rat(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# -- vector helpers (work for any dimension unless noted) --

def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def neg(a):
    return tuple(-x for x in a)


def scale(a, k):
    return tuple(x * k for x in a)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def is_zero(a) -> bool:
    return all(x == 0 for x in a)


def sign(x) -> int:
    return (x > 0) - (x < 0)


def det3(r0, r1, r2):
    return dot(r0, cross(r1, r2))


def orient2d(a, b, c) -> int:
    return sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def orient3d(a, b, c, d) -> int:
    return sign(det3(sub(b, a), sub(c, a), sub(d, a)))


def parallel(u, v) -> bool:
    """True when two 3-vectors are parallel (or one of them is zero)."""
    return is_zero(cross(u, v))


def primitive(v):
    """Scale a rational vector by a positive factor to coprime integers."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x // g) for x in ints)


def canonical_line_normal(v):
    """Primitive integer vector with the first nonzero entry positive."""
    p = primitive(v)
    for x in p:
        if x != 0:
            return p if x > 0 else neg(p)
    return p


def solve3(rows, rhs):
    """Solve a 3x3 linear system exactly by Cramer's rule; None if singular."""
    d = det3(*rows)
    if d == 0:
        return None
    cols = list(zip(*rows))
    out = []
    for k in range(3):
        c = list(cols)
        c[k] = tuple(rhs)
        out.append(det3(*zip(*c)) / d)
    return tuple(out)


def solve2(m, rhs):
    """Solve [[a, b], [c, d]] x = rhs; None if singular."""
    (a, b), (c, d) = m
    det = a * d - b * c
    if det == 0:
        return None
    return ((rhs[0] * d - b * rhs[1]) / det, (a * rhs[1] - c * rhs[0]) / det)


# -- planar segments --

class SegHit(NamedTuple):
    kind: str  # "empty" | "point" | "overlap"
    a: tuple = None
    b: tuple = None


EMPTY = SegHit("empty")


def _on_segment2(p, a, b) -> bool:
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def seg2_intersect(s, t) -> SegHit:
    """Exact intersection of two closed planar segments."""
    (a, b), (c, d) = s, t
    o1, o2 = orient2d(a, b, c), orient2d(a, b, d)
    o3, o4 = orient2d(c, d, a), orient2d(c, d, b)
    if o1 == o2 == 0 and (a != b or c != d):
        # collinear (or one of them degenerate on the other's line)
        key = (lambda p: (p[0], p[1]))
        lo1, hi1 = sorted((a, b), key=key)
        lo2, hi2 = sorted((c, d), key=key)
        if a == b:
            return SegHit("point", a) if _on_segment2(a, c, d) else EMPTY
        if c == d:
            return SegHit("point", c) if _on_segment2(c, a, b) else EMPTY
        if o3 != 0 or o4 != 0:
            return EMPTY
        lo = max(lo1, lo2, key=key)
        hi = min(hi1, hi2, key=key)
        if key(lo) > key(hi):
            return EMPTY
        if lo == hi:
            return SegHit("point", lo)
        return SegHit("overlap", lo, hi)
    if o1 * o2 > 0 or o3 * o4 > 0:
        return EMPTY
    if o1 == 0 and _on_segment2(c, a, b):
        return SegHit("point", c)
    if o2 == 0 and _on_segment2(d, a, b):
        return SegHit("point", d)
    if o3 == 0 and _on_segment2(a, c, d):
        return SegHit("point", a)
    if o4 == 0 and _on_segment2(b, c, d):
        return SegHit("point", b)
    if 0 in (o1, o2, o3, o4):
        return EMPTY
    r, q = sub(b, a), sub(d, c)
    tpar = cross2(sub(c, a), q) / cross2(r, q)
    return SegHit("point", add(a, scale(r, tpar)))


# -- convex bodies --

class Facet(NamedTuple):
    cycle: tuple    # vertex indices, counter-clockwise seen from the normal side
    normal: tuple   # primitive integer vector (outward for dim 3 bodies)
    offset: Fraction


class Location(NamedTuple):
    kind: str                 # "outside" | "boundary" | "interior"
    feature: tuple = None     # (dim, index) of the lowest-dimensional feature


OUTSIDE = Location("outside")
INTERIOR = Location("interior")


@dataclass(frozen=True)
class ConvexBody:
    """Convex polytope of dimension 0..3 in canonical form.

    Vertices are sorted lexicographically.  Facets are maximal faces stored as
    vertex cycles starting at their smallest index; a dim-2 body carries its
    single polygon as one facet whose normal is the canonical plane normal.
    """
    dim: int
    vertices: tuple
    edges: tuple
    facets: tuple

    @property
    def empty_interior(self) -> bool:
        return self.dim < 3

    def triangles(self):
        """Fan triangulation of the facets (index triples)."""
        out = []
        for f in self.facets:
            c = f.cycle
            out.extend((c[0], c[i], c[i + 1]) for i in range(1, len(c) - 1))
        return out

    def bbox(self):
        lo = tuple(min(v[k] for v in self.vertices) for k in range(3))
        hi = tuple(max(v[k] for v in self.vertices) for k in range(3))
        return lo, hi


def separated(a: ConvexBody, b: ConvexBody, shift=None, weak=False) -> bool:
    """True if some plane separates a from b + shift (strictly, or allowing contact).

    Tries facet normals, edge-edge cross products and the coordinate axes.
    A True answer is a proof; False only means no axis in that list works.
    """
    bv = b.vertices if shift is None else [add(p, shift) for p in b.vertices]
    axes = [f.normal for f in a.facets] + [f.normal for f in b.facets]
    ea = [sub(a.vertices[j], a.vertices[i]) for i, j in a.edges]
    eb = [sub(b.vertices[j], b.vertices[i]) for i, j in b.edges]
    axes += [cross(u, w) for u in ea for w in eb]
    axes += [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    for n in axes:
        if is_zero(n):
            continue
        pa = [dot(n, p) for p in a.vertices]
        pb = [dot(n, p) for p in bv]
        if weak:
            if max(pa) <= min(pb) or max(pb) <= min(pa):
                return True
        elif max(pa) < min(pb) or max(pb) < min(pa):
            return True
    return False


def _hull2_indices(pts2):
    """Andrew's monotone chain on exact 2D points; strict (no collinear)."""
    order = sorted(range(len(pts2)), key=lambda i: pts2[i])
    if len(order) <= 2:
        return order

    def half(seq):
        chain = []
        for i in seq:
            while len(chain) >= 2 and orient2d(pts2[chain[-2]], pts2[chain[-1]], pts2[i]) <= 0:
                chain.pop()
            chain.append(i)
        return chain

    lower, upper = half(order), half(reversed(order))
    return lower[:-1] + upper[:-1]


def _drop_axis(n):
    return max(range(3), key=lambda k: abs(n[k]))


def _planar_cycle(points, normal):
    """Convex polygon of coplanar 3D points, CCW around `normal`."""
    k = _drop_axis(normal)
    keep = [i for i in range(3) if i != k]
    proj = [(p[keep[0]], p[keep[1]]) for p in points]
    idx = _hull2_indices(proj)
    cyc = [points[i] for i in idx]
    if len(cyc) >= 3 and dot(cross(sub(cyc[1], cyc[0]), sub(cyc[2], cyc[0])), normal) < 0:
        cyc.reverse()
    return cyc


def _rotate_min(cycle):
    m = cycle.index(min(cycle))
    return tuple(cycle[m:] + cycle[:m])


def _finish(dim, verts, cycles_with_planes):
    verts = sorted(set(verts))
    index = {v: i for i, v in enumerate(verts)}
    facets, edges = [], set()
    for cyc, normal, offset in cycles_with_planes:
        ids = [index[v] for v in cyc]
        for a, b in zip(ids, ids[1:] + ids[:1]):
            if a != b:
                edges.add((min(a, b), max(a, b)))
        facets.append(Facet(_rotate_min(ids), normal, offset))
    if dim == 1:
        edges = {(0, 1)}
    facets.sort(key=lambda f: (f.normal, f.offset))
    return ConvexBody(dim, tuple(verts), tuple(sorted(edges)), tuple(facets))


def convex_hull3(points: Sequence) -> ConvexBody:
    """Exact convex hull of a nonempty set of 3D rational points."""
    pts = sorted(set(tuple(rat(c) for c in p) for p in points))
    if not pts:
        raise ValueError("convex_hull3 needs at least one point")
    p0 = pts[0]
    if len(pts) == 1:
        return ConvexBody(0, (p0,), (), ())
    p1 = pts[-1]
    d1 = sub(p1, p0)
    p2 = next((p for p in pts if not is_zero(cross(d1, sub(p, p0)))), None)
    if p2 is None:
        return ConvexBody(1, (p0, p1), ((0, 1),), ())
    n = cross(d1, sub(p2, p0))
    p3 = next((p for p in pts if dot(n, sub(p, p0)) != 0), None)
    if p3 is None:
        normal = canonical_line_normal(n)
        cyc = _planar_cycle(pts, normal)
        return _finish(2, cyc, [(cyc, normal, dot(normal, cyc[0]))])
    return _hull3_full(pts, p0, p1, p2, p3)


def _hull3_full(pts, p0, p1, p2, p3):
    if orient3d(p0, p1, p2, p3) > 0:
        p1, p2 = p2, p1
    # orient3d(p0,p1,p2,p3) < 0: p3 lies on the inner side of face (p0,p1,p2)
    faces = {(p0, p1, p2), (p0, p3, p1), (p1, p3, p2), (p2, p3, p0)}
    for p in pts:
        if p in (p0, p1, p2, p3):
            continue
        visible = [f for f in faces if orient3d(f[0], f[1], f[2], p) > 0]
        if not visible:
            continue
        vis_edges = set()
        for a, b, c in visible:
            vis_edges.update(((a, b), (b, c), (c, a)))
        for f in visible:
            faces.discard(f)
        for a, b in vis_edges:
            if (b, a) not in vis_edges:
                faces.add((a, b, p))
    planes = {}
    for a, b, c in faces:
        nrm = primitive(cross(sub(b, a), sub(c, a)))
        planes.setdefault(nrm, dot(nrm, a))
    cycles = []
    verts = []
    for nrm, off in planes.items():
        on = [p for p in pts if dot(nrm, p) == off]
        cyc = _planar_cycle(on, nrm)
        cycles.append((cyc, nrm, off))
        verts.extend(cyc)
    return _finish(3, verts, cycles)


def negate_body(body: ConvexBody) -> ConvexBody:
    return convex_hull3([neg(v) for v in body.vertices])


def translate_body(body: ConvexBody, t) -> ConvexBody:
    return convex_hull3([add(v, t) for v in body.vertices])


def minkowski_sum_convex(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    return convex_hull3([add(p, q) for p in a.vertices for q in b.vertices])


def _in_polygon(body, p):
    """Locate a point already known to lie in the plane of a dim-2 body."""
    f = body.facets[0]
    k = _drop_axis(f.normal)
    keep = [i for i in range(3) if i != k]
    proj = lambda q: (q[keep[0]], q[keep[1]])
    cyc = [proj(body.vertices[i]) for i in f.cycle]
    q = proj(p)
    # dropping y flips the handedness of the (x, z) projection
    s = sign(f.normal[k]) * (-1 if k == 1 else 1)
    zero_edges = []
    for i, (a, b) in enumerate(zip(cyc, cyc[1:] + cyc[:1])):
        o = orient2d(a, b, q) * s
        if o < 0:
            return OUTSIDE
        if o == 0:
            zero_edges.append((f.cycle[i], f.cycle[(i + 1) % len(cyc)]))
    return _boundary_feature(body, p, zero_edges, (2, 0))


def _boundary_feature(body, p, zero_edges, default):
    if p in body.vertices:
        return Location("boundary", (0, body.vertices.index(p)))
    if zero_edges:
        a, b = zero_edges[0]
        return Location("boundary", (1, body.edges.index((min(a, b), max(a, b)))))
    return Location("boundary", default)


def locate_point(body: ConvexBody, p) -> Location:
    p = tuple(p)
    if body.dim == 0:
        return Location("boundary", (0, 0)) if p == body.vertices[0] else OUTSIDE
    if body.dim == 1:
        a, b = body.vertices
        d = sub(b, a)
        w = sub(p, a)
        if not is_zero(cross(d, w)):
            return OUTSIDE
        t = dot(w, d) / dot(d, d)
        if t < 0 or t > 1:
            return OUTSIDE
        if t == 0:
            return Location("boundary", (0, 0))
        if t == 1:
            return Location("boundary", (0, 1))
        return Location("boundary", (1, 0))
    if body.dim == 2:
        f = body.facets[0]
        if dot(f.normal, p) != f.offset:
            return OUTSIDE
        return _in_polygon(body, p)
    on = []
    for i, f in enumerate(body.facets):
        s = dot(f.normal, p) - f.offset
        if s > 0:
            return OUTSIDE
        if s == 0:
            on.append(i)
    if not on:
        return INTERIOR
    if len(on) == 1:
        return Location("boundary", (2, on[0]))
    if len(on) == 2:
        c1, c2 = (body.facets[i].cycle for i in on)
        e1 = {(min(a, b), max(a, b)) for a, b in zip(c1, c1[1:] + c1[:1])}
        e2 = {(min(a, b), max(a, b)) for a, b in zip(c2, c2[1:] + c2[:1])}
        shared = sorted(e1 & e2)
        return Location("boundary", (1, body.edges.index(shared[0])))
    return Location("boundary", (0, body.vertices.index(p)))


def point_in_interior(body: ConvexBody, p) -> bool:
    """Fast path for freeness tests: strict inequality on every facet."""
    if body.dim < 3:
        return False
    for f in body.facets:
        if dot(f.normal, p) >= f.offset:
            return False
    return True
