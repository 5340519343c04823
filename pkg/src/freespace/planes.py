"""Parametric planes: structured generation of triple-contact candidates.

Vertex contacts are handled in a frame where the robot's vertex triple is
horizontal.  Obstacle faces are split into subtriangles whose horizontal
slices move affinely with the height ``z``; double contacts become segments
in the parametric plane ``(z, s)`` of a contact, and legal triple contacts
must be visible on envelopes of those segments.  Edge and face contacts get
rectangular parametric planes with illegal-side tags.

Every generator here may over-generate; candidates are confirmed by the
shared ``ContactModel.triple`` check, exactly as brute force does.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import ceil, gcd
from typing import NamedTuple

from .contacts import (
    ContactSpec, NoLine, _edge_in_face, _idot, _opposite_face, classify_triple, contact_model,
    sort_specs,
    third_contacts_on_line,
)
from .envelopes import envelope, normalize, seg_y, visible_between
from .geometry import (
    add, canonical_line_normal, cross, cross2, dot, is_zero, scale, sub,
)
from .scene import GPViolation, robot_triple_normals


class DegenerateFace(ValueError):
    pass


class UndefinedCover(ValueError):
    pass


class IncompatiblePair(ValueError):
    pass


# ---------------------------------------------------------------- frames

class Frame(NamedTuple):
    """Linear chart (u1.x, u2.x, n.x); u1, u2, n pairwise orthogonal."""
    u1: tuple
    u2: tuple
    n: tuple

    def apply(self, p):
        return (dot(self.u1, p), dot(self.u2, p), dot(self.n, p))


IDENTITY = Frame((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _face_points(scene):
    for o in scene.obstacles:
        for f, cyc in enumerate(o.faces):
            yield o, f, tuple(o.vertices[i] for i in cyc)


def _frame_for(normal, scene):
    """A frame with ``normal`` as height whose x-axis is oblique to every slice."""
    n = tuple(Fraction(x) for x in normal)
    axis = min(range(3), key=lambda k: abs(n[k]))
    e = tuple(Fraction(int(k == axis)) for k in range(3))
    a = cross(n, e)
    b = cross(n, a)
    slices = []
    for _, _, pts in _face_points(scene):
        fn = cross(sub(pts[1], pts[0]), sub(pts[2], pts[0]))
        d = cross(fn, n)
        if not is_zero(d):
            slices.append(d)
    for j in range(len(slices) + 1):
        u2 = add(b, scale(a, j))
        u1 = cross(u2, n)
        if all(dot(u1, d) != 0 for d in slices):
            return Frame(u1, u2, n)
    return None  # unreachable: each slice direction rules out at most one j


# ---------------------------------------------------------------- subtriangles

@dataclass(frozen=True)
class SubTri:
    """Half of an obstacle face, in frame coordinates.

    ``vertices`` is (apex, p, q): p and q span the horizontal side, p with the
    smaller x.  Slices at height z run from apex + lam(z)(p - apex) to
    apex + lam(z)(q - apex) with lam affine, 0 at the apex and 1 at the side.
    """
    id: int
    oid: int
    face: int
    vertices: tuple
    z_lo: Fraction
    z_hi: Fraction

    @property
    def apex(self):
        return self.vertices[0]

    @property
    def side_z(self):
        return self.vertices[1][2]

    @property
    def direction(self):
        p, q = self.vertices[1], self.vertices[2]
        return (q[0] - p[0], q[1] - p[1], Fraction(0))

    def lam(self):
        """lam(z) as an affine pair (k, c): k*z + c."""
        za = self.apex[2]
        k = 1 / (self.side_z - za)
        return (k, -za * k)

    def left(self):
        """Left slice endpoint as an affine 2-vector."""
        a, p = self.apex, self.vertices[1]
        k, c = self.lam()
        return tuple((k * (p[i] - a[i]), a[i] + c * (p[i] - a[i])) for i in (0, 1))


def _sub_from(sid, oid, face, apex, m, b):
    p, q = sorted((m, b), key=lambda v: (v[0], v[1]))
    lo, hi = sorted((apex[2], m[2]))
    return SubTri(sid, oid, face, (apex, p, q), lo, hi)


def split_faces(scene, frame: Frame = IDENTITY) -> list:
    """Two subtriangles per obstacle face, split at the middle-height vertex."""
    out = []
    for o, f, pts in _face_points(scene):
        a, b, c = sorted((frame.apply(p) for p in pts), key=lambda v: v[2])
        if a[2] == b[2] or b[2] == c[2]:
            raise DegenerateFace(f"obstacle {o.id} face {f} has two vertices at one height")
        t = (b[2] - a[2]) / (c[2] - a[2])
        m = tuple(a[i] + t * (c[i] - a[i]) for i in range(3))
        out.append(_sub_from(len(out), o.id, f, a, m, b))
        out.append(_sub_from(len(out), o.id, f, c, m, b))
    return out


def slice_at(sub: SubTri, z):
    """The slice f(z) as ((x, y), (x, y)), left endpoint first, or None."""
    if z < sub.z_lo or z > sub.z_hi:
        return None
    a, p, q = sub.vertices
    lam = (z - a[2]) / (sub.side_z - a[2])
    return tuple((a[0] + lam * (v[0] - a[0]), a[1] + lam * (v[1] - a[1])) for v in (p, q))


# ---------------------------------------------------------------- cover

def _lam_at(sub, z):
    k, c = sub.lam()
    return k * z + c


def _line_meet(a, u, b, w):
    """Parameters (s, t) with a + s u = b + t w, or None when parallel."""
    den = cross2(u, w)
    if den == 0:
        return None
    r = (b[0] - a[0], b[1] - a[1])
    return cross2(r, w) / den, cross2(r, u) / den


def _xy(p):
    return (p[0], p[1])


def cover(robot, o1, o2, z, frame: Frame = IDENTITY):
    """Whether contact o2 = (p2, f2) covers o1 = (p1, f1) at height z.

    Returns "left", "right" or None.  Contacts are (robot vertex index,
    SubTri) pairs in ``frame`` coordinates.
    """
    (p1, f1), (p2, f2) = o1, o2
    s1, s2 = slice_at(f1, z), slice_at(f2, z)
    if s1 is None or s2 is None:
        raise UndefinedCover("z outside a subtriangle's height range")
    w1, w2 = _xy(f1.direction), _xy(f2.direction)
    if w1[0] == 0:
        raise UndefinedCover("slice parallel to the y-axis")
    a, b = s1
    hit = _line_meet(a, w1, s2[0], w2)
    if hit is None:
        raise UndefinedCover("parallel slice lines")
    sq = hit[0]
    lam = _lam_at(f1, z)
    if 0 <= sq <= lam:
        raise UndefinedCover("slice lines meet inside f1(z)")
    right = sq > lam
    start = b if right else a
    d = sub(frame.apply(robot.vertices[p2]), frame.apply(robot.vertices[p1]))
    ray = _line_meet(start, _xy(d), s2[0], w2)
    if ray is None:
        raise UndefinedCover("robot edge parallel to f2's slices")
    t, u = ray
    if t >= 0 and 0 <= u <= _lam_at(f2, z):
        return "right" if right else "left"
    return None


# ---------------------------------------------------------------- affine pieces
# An affine scalar is (k, c) meaning k*z + c; affine 2-vectors are pairs of them.

def _a_add(p, q):
    return (p[0] + q[0], p[1] + q[1])


def _a_neg(p):
    return (-p[0], -p[1])


def _a_scale(p, x):
    return (p[0] * x, p[1] * x)


def _av_sub(u, v):
    return (_a_add(u[0], _a_neg(v[0])), _a_add(u[1], _a_neg(v[1])))


def _av_const(w):
    return ((0, w[0]), (0, w[1]))


def _av_times(a, w):
    """Affine scalar a times constant vector w."""
    return (_a_scale(a, w[0]), _a_scale(a, w[1]))


def _a_cross(r, w):
    """cross2 of an affine 2-vector with a constant vector."""
    return _a_add(_a_scale(r[0], w[1]), _a_neg(_a_scale(r[1], w[0])))


def _a_at(a, z):
    return a[0] * z + a[1]


def _interval(cons, lo, hi):
    """Closed z-interval where every k*z + c >= 0 holds, within [lo, hi]."""
    for k, c in cons:
        if k == 0:
            if c < 0:
                return None
        elif k > 0:
            lo = max(lo, -c / k)
        else:
            hi = min(hi, -c / k)
    return (lo, hi) if lo <= hi else None


class CoverInterval(NamedTuple):
    o1: tuple
    o2: tuple
    side: str
    lo: Fraction
    hi: Fraction


class PPSeg(NamedTuple):
    """A double-contact segment in the parametric plane of ``plane``.

    ``seg`` is ((x0, y0), (x1, y1)) with x0 < x1; ``side`` is left/right for
    vertex-contact planes and above/below (the illegal side) otherwise.
    ``sub`` is the source subtriangle id for vertex-contact planes.
    """
    plane: ContactSpec
    source: ContactSpec
    seg: tuple
    side: str
    sub: int = None


class _Pair(NamedTuple):
    lo: Fraction
    hi: Fraction
    s: tuple
    base: tuple      # constraints for a realized double contact
    sides: dict      # side -> cover constraints


def _pair(f1, f2, P1, P2):
    """Affine data for contacts (P1 on f1), (P2 on f2); P1, P2 frame points."""
    lo, hi = max(f1.z_lo, f2.z_lo), min(f1.z_hi, f2.z_hi)
    if lo > hi:
        return None
    w1, w2 = _xy(f1.direction), _xy(f2.direction)
    d = (P2[0] - P1[0], P2[1] - P1[1])
    c12, cd2 = cross2(w1, w2), cross2(d, w2)
    if c12 == 0 or cd2 == 0:
        return None
    lam1, lam2 = f1.lam(), f2.lam()
    Q = _av_sub(f2.left(), f1.left())
    sq = _a_scale(_a_cross(Q, w2), 1 / c12)
    R = _av_sub(Q, _av_const(d))
    s = _a_scale(_a_cross(R, w2), 1 / c12)
    u = _a_scale(_a_cross(R, w1), 1 / c12)
    base = [s, _a_add(lam1, _a_neg(s)), u, _a_add(lam2, _a_neg(u))]
    sides = {}
    for side, start, qcon in (
        ("right", _av_sub(Q, _av_times(lam1, w1)), _a_add(sq, _a_neg(lam1))),
        ("left", Q, _a_neg(sq)),
    ):
        t = _a_scale(_a_cross(start, w2), 1 / cd2)
        uu = _a_scale(_a_cross(start, d), 1 / cd2)
        sides[side] = [qcon, t, uu, _a_add(lam2, _a_neg(uu))]
    return _Pair(lo, hi, s, base, sides)


def _seg_from(s, iv):
    z0, z1 = iv
    if z0 == z1:
        return None
    return ((z0, _a_at(s, z0)), (z1, _a_at(s, z1)))


# ---------------------------------------------------------------- vertex-contact planes

def vertex_spec(p, st: SubTri) -> ContactSpec:
    return ContactSpec(0, p, st.oid, 2, st.face)


class _Family(NamedTuple):
    segs: list       # PPSeg
    env: object

    @property
    def boundaries(self):
        return sorted({x for p in self.env.pieces for x in (p.x0, p.x1)})


def _side_env(side):
    # below a left-cover segment is illegal, so legal points sit on the upper envelope
    return "upper" if side == "left" else "lower"


class VertexSystem:
    """Subtriangles, families and candidates for one robot vertex-triple plane."""

    def __init__(self, robot, scene, normal, model=None):
        self.robot = robot
        self.scene = scene
        self.model = model or contact_model(robot, scene)
        self.frame = _frame_for(normal, scene)
        self.normal = normal
        self.subs = split_faces(scene, self.frame)
        self.pts = [self.frame.apply(v) for v in robot.vertices]
        self._fam = {}
        self._pair_cache = {}

    def pair(self, p1, f1, p2, f2):
        key = (p1, f1.id, p2, f2.id)
        if key not in self._pair_cache:
            self._pair_cache[key] = _pair(f1, f2, self.pts[p1], self.pts[p2])
        return self._pair_cache[key]

    def cover_intervals(self, o1, o2):
        (p1, f1), (p2, f2) = o1, o2
        pr = self.pair(p1, f1, p2, f2)
        if pr is None:
            return []
        out = []
        for side in ("left", "right"):
            iv = _interval(pr.sides[side], pr.lo, pr.hi)
            if iv is not None:
                out.append(CoverInterval(o1, o2, side, *iv))
        return out

    def sigma(self, o1, o2):
        """Double-contact segments of o2 in the plane of o1, one per cover side."""
        (p1, f1), (p2, f2) = o1, o2
        pr = self.pair(p1, f1, p2, f2)
        if pr is None:
            return []
        out = []
        for side in ("left", "right"):
            iv = _interval(pr.base + pr.sides[side], pr.lo, pr.hi)
            seg = iv and _seg_from(pr.s, iv)
            if seg:
                out.append(PPSeg(vertex_spec(p1, f1), vertex_spec(p2, f2), seg, side, f2.id))
        return out

    def _partners(self, p1, f1, p2):
        adj = self.model.adjacency.get(vertex_spec(p1, f1))
        if adj is None:
            return []
        return [f for f in self.subs if vertex_spec(p2, f) in adj]

    def families(self, p1, f1, p2):
        """(L, R) families of the plane of (p1, f1) for the second vertex p2."""
        key = (p1, f1.id, p2)
        if key not in self._fam:
            fam = {"left": [], "right": []}
            for f2 in self._partners(p1, f1, p2):
                for ps in self.sigma((p1, f1), (p2, f2)):
                    fam[ps.side].append(ps)
            self._fam[key] = {side: _Family(segs, envelope([s.seg for s in segs], _side_env(side)))
                              for side, segs in fam.items()}
        f = self._fam[key]
        return f["left"], f["right"]

    def family(self, p1, f1, p2, side):
        left, right = self.families(p1, f1, p2)
        return left if side == "left" else right

    def mechanism_a(self, triple):
        out = set()
        for p1 in triple:
            p2, p3 = (p for p in triple if p != p1)
            for f1 in self.subs:
                if vertex_spec(p1, f1) not in self.model.adjacency:
                    continue
                for x2 in ("left", "right"):
                    fa = self.family(p1, f1, p2, x2)
                    if not fa.segs:
                        continue
                    for x3 in ("left", "right"):
                        fb = self.family(p1, f1, p3, x3)
                        if not fb.segs:
                            continue
                        for c in visible_between(fa.env, fb.env, transversal_only=False):
                            out.add(sort_specs((fa.segs[c.i].plane, fa.segs[c.i].source,
                                                fb.segs[c.j].source)))
        return out

    def _extremal(self, fam, x, after):
        piece = fam.env.piece_at(x, after)
        return None if piece is None else fam.segs[piece.seg]

    def mechanism_b(self, triple):
        """Circular triples reconstructed from envelope breakpoints."""
        out = set()
        by_id = self.subs
        for p1, p2, p3 in permutations(triple):
            for f1 in self.subs:
                if vertex_spec(p1, f1) not in self.model.adjacency:
                    continue
                for x1 in ("left", "right"):
                    fam1 = self.family(p1, f1, p2, x1)
                    if not fam1.segs:
                        continue
                    for x in fam1.boundaries:
                        for after in (True, False):
                            s2 = self._extremal(fam1, x, after)
                            if s2 is None:
                                continue
                            f2 = by_id[s2.sub]
                            for x2 in ("left", "right"):
                                s3 = self._extremal(self.family(p2, f2, p3, x2), x, after)
                                if s3 is None:
                                    continue
                                f3 = by_id[s3.sub]
                                for x3 in ("left", "right"):
                                    s4 = self._extremal(self.family(p3, f3, p1, x3), x, after)
                                    if s4 is None:
                                        continue
                                    if (by_id[s4.sub].oid, by_id[s4.sub].face) == (f1.oid, f1.face):
                                        out.add(sort_specs((s2.plane, s2.source, s3.source)))
        return out


def vertex_triples(robot):
    """Non-collinear robot vertex triples grouped by canonical plane normal."""
    groups = {}
    for t in combinations(range(len(robot.vertices)), 3):
        a, b, c = (robot.vertices[i] for i in t)
        n = cross(sub(b, a), sub(c, a))
        if not is_zero(n):
            groups.setdefault(canonical_line_normal(n), []).append(t)
    return groups


def vertex_systems(robot, scene, model=None):
    model = model or contact_model(robot, scene)
    return [(VertexSystem(robot, scene, n, model), ts)
            for n, ts in sorted(vertex_triples(robot).items())]


def vertex_families(robot, scene, o1, p2, p3=None):
    """(L, R) segment lists for contact o1 = (p1, face spec) and second vertex p2.

    ``o1`` is (vertex index, SubTri id) in the frame of the plane through
    p1, p2 and p3 (any third vertex by default).
    """
    p1, sid = o1
    for system, triples in vertex_systems(robot, scene):
        for t in triples:
            if p1 in t and p2 in t and (p3 is None or p3 in t):
                left, right = system.families(p1, system.subs[sid], p2)
                return left.segs, right.segs
    return [], []


def vvv_candidates(robot, scene, mechanisms=("A", "B"), model=None) -> set:
    """Spec triples that may be free triple vertex contacts."""
    out = set()
    if not any(o.faces for o in scene.obstacles):
        return out
    for system, triples in vertex_systems(robot, scene, model):
        for t in triples:
            if "A" in mechanisms:
                out |= system.mechanism_a(t)
            if "B" in mechanisms:
                out |= system.mechanism_b(t)
    return out


# ---------------------------------------------------------------- edge and face planes

def robot_halfspaces(robot):
    """(m, c) pairs with m.x >= c describing the robot inside its affine hull."""
    if "halfspaces" not in robot.memo:
        robot.memo["halfspaces"] = _halfspaces(robot)
    return robot.memo["halfspaces"]


def _halfspaces(robot):
    body = robot.body
    if body.dim == 3:
        return [(tuple(-x for x in f.normal), -f.offset) for f in body.facets]
    f = body.facets[0]
    poly = [body.vertices[i] for i in f.cycle]
    sides = []
    for a, b in zip(poly, poly[1:] + poly[:1]):
        m = cross(f.normal, sub(b, a))
        sides.append((m, dot(m, a)))
    centre = tuple(sum(p[k] for p in poly) / len(poly) for k in range(3))
    if any(dot(m, centre) < c for m, c in sides):
        sides = [(tuple(-x for x in m), -c) for m, c in sides]
    return sides


def inward(robot, x, d) -> bool:
    """Whether x + eps*d stays in the (closed) robot for small eps > 0."""
    if robot.is_flat and dot(robot.face_normals[0], d) != 0:
        return False
    return all(dot(m, d) >= 0 for m, c in robot_halfspaces(robot) if dot(m, x) == c)


def chord(robot, x, d):
    """Largest t with x + t*d in the robot (x on the robot)."""
    ts = [(dot(m, x) - c) / -dot(m, d) for m, c in robot_halfspaces(robot) if dot(m, d) < 0]
    return min(ts)


class Chart(NamedTuple):
    """Placements p0 + x*h + y*v over the unit square, split into y-strips."""
    spec: ContactSpec
    p0: tuple
    h: tuple
    v: tuple
    strips: tuple


def strips(robot, o1) -> list:
    """Horizontal strips of an edge-contact plane: ceil(D/d) when f1 is the longer edge."""
    if o1.rdim != 1:
        return [(Fraction(0), Fraction(1))]
    r = robot.pair_ratio[o1.ridx]
    k = ceil(1 / r) if r is not None and r < 1 else 1
    return [(Fraction(i, k), Fraction(i + 1, k)) for i in range(k)]


def _is_parallelogram(pts):
    return len(pts) == 4 and pts[2] == add(pts[1], sub(pts[3], pts[0]))


def charts(robot, scene, o1) -> list:
    """Parametric charts of an edge or face contact (two orientations for faces)."""
    g = scene.obstacle(o1.oid).feature_points(o1.odim, o1.oidx)
    f = robot.feature_points((o1.rdim, o1.ridx))
    if o1.rdim == 1:
        (c, e), (a, b) = f, g
        return [Chart(o1, sub(a, c), sub(b, a), sub(c, e), tuple(strips(robot, o1)))]
    if o1.rdim == 2 and _is_parallelogram(f):
        es, et = sub(f[1], f[0]), sub(f[3], f[0])
        p0 = sub(g[0], f[0])
        unit = ((Fraction(0), Fraction(1)),)
        return [Chart(o1, p0, scale(es, -1), scale(et, -1), unit),
                Chart(o1, p0, scale(et, -1), scale(es, -1), unit)]
    return []


def eligible_features(robot, o1) -> list:
    """Robot features whose contacts give tagged segments in the plane of o1."""
    out = [(0, i) for i in range(len(robot.vertices))]
    for e in range(len(robot.edges)):
        d = robot.edge_vector(e)
        if o1.rdim == 1 and (e == o1.ridx or robot.edges_parallel(e, o1.ridx)):
            continue
        if o1.rdim == 2 and dot(d, robot.face_normals[o1.ridx]) == 0:
            continue
        out.append((1, e))
    return out


def illegal_side(robot, chart, feat):
    """'above' or 'below' if the whole strip beyond a segment is illegal, else None."""
    height = max(hi - lo for lo, hi in chart.strips)
    key = ("illegal", feat, chart.v, height)
    if key not in robot.memo:
        robot.memo[key] = _illegal_side(robot, chart.v, feat, height)
    return robot.memo[key]


def _illegal_side(robot, v, feat, height):
    pts = robot.feature_points(feat)
    mid = tuple(sum(p[k] for p in pts) / len(pts) for k in range(3))
    up = scale(v, -1)     # obstacle motion relative to the robot as y grows
    for tag, d in (("above", up), ("below", v)):
        if inward(robot, mid, d) and not inward(robot, mid, scale(d, -1)):
            if min(chord(robot, p, d) for p in pts) >= height:
                return tag
    return None


def chart_valid(robot, chart) -> bool:
    return all(illegal_side(robot, chart, f) is not None for f in eligible_features(robot, chart.spec))


def _chart_line(chart, surf):
    """y as an affine function of x where the chart meets a contact plane."""
    nv = dot(surf.normal, chart.v)
    if nv == 0:
        return None
    k = -dot(surf.normal, chart.h) / nv
    c = (surf.offset - dot(surf.normal, chart.p0)) / nv
    return (k, c)


def _scaled(vec):
    """(integer vector, positive int d) with vec = ints / d."""
    d = 1
    for x in vec:
        d = d * Fraction(x).denominator // gcd(d, Fraction(x).denominator)
    return tuple(int(x * d) for x in vec), d


def _chart_ints(chart):
    return _scaled(chart.p0) + _scaled(chart.h) + _scaled(chart.v)


def _chart_segment(chart, surf, ints=None):
    """Segment where the chart meets a contact polygon, as ((x0, y0), (x1, y1)).

    Works on integer-scaled vectors; every bound is one exact fraction.
    """
    P, D0, H, Dh, V, Dv = ints or _chart_ints(chart)
    N, C = surf.plane_int
    nv = _idot(N, V)
    if nv == 0:
        return None
    nh, q = _idot(N, H), C * D0 - _idot(N, P)
    k, c0 = Fraction(-nh * Dv, nv * Dh), Fraction(q * Dv, D0 * nv)
    if k == 0 and c0 in (0, 1):
        # runs along the rim of the rectangle: the two contacts share a degenerate
        # contact there, and the illegal-side argument does not apply
        return None
    sg = 1 if nv > 0 else -1
    # L(x) = -nh*D0*x + q*Dh is y scaled by D0*Dh*nv/Dv
    cons = [(-sg * nh * D0, sg * q * Dh),
            (sg * Dv * nh * D0, sg * (D0 * Dh * nv - Dv * q * Dh))]
    for M, c in surf.sides_int:
        mv = _idot(M, V)
        cons.append((sg * D0 * (_idot(M, H) * nv - nh * mv),
                     sg * Dh * (_idot(M, P) * nv + q * mv - c * D0 * nv)))
    lo, hi = Fraction(0), Fraction(1)
    for a, b in cons:
        if a == 0:
            if b < 0:
                return None
        elif a > 0:
            lo = max(lo, Fraction(-b, a))
        else:
            hi = min(hi, Fraction(-b, a))
    if lo >= hi:
        return None
    return ((lo, k * lo + c0), (hi, k * hi + c0))


def pp_segment_generic(robot, scene, o1, o2, orientation=0, model=None):
    """Segment of o2 in the edge- or face-contact plane of o1, tagged by its illegal side."""
    model = model or contact_model(robot, scene)
    cs = charts(robot, scene, o1)
    if not cs:
        raise IncompatiblePair(f"{o1.label} has no rectangular chart")
    chart = cs[orientation]
    feat = (o2.rdim, o2.ridx)
    if feat not in eligible_features(robot, o1):
        raise IncompatiblePair(f"{o2.label} moves along the line of {o1.label}")
    surf = model.surfaces.get(o2)
    if surf is None:
        return None
    seg = _chart_segment(chart, surf)
    if seg is None:
        return None
    return PPSeg(o1, o2, seg, illegal_side(robot, chart, feat))


def _clip(seg, lo, hi):
    (x0, y0), (x1, y1) = seg
    k = (y1 - y0) / (x1 - x0)
    y = (k, y0 - k * x0)
    iv = _interval([(y[0], y[1] - lo), (-y[0], hi - y[1])], x0, x1)
    return iv and _seg_from(y, iv)


def chart_families(robot, chart, model):
    """Tagged segments per eligible feature of the chart's plane."""
    fams = {}
    feats = set(eligible_features(robot, chart.spec))
    sides = {}
    ints = _chart_ints(chart)
    for o2 in sorted(model.adjacency.get(chart.spec, ()), key=lambda s: s.key):
        feat = (o2.rdim, o2.ridx)
        if feat not in feats:
            continue
        seg = _chart_segment(chart, model.surfaces[o2], ints)
        if seg is not None:
            if feat not in sides:
                sides[feat] = illegal_side(robot, chart, feat)
            fams.setdefault(feat, []).append(PPSeg(chart.spec, o2, seg, sides[feat]))
    return fams


def chart_candidates(robot, chart, model) -> set:
    out = set()
    fams = chart_families(robot, chart, model)
    for lo, hi in chart.strips:
        clipped = {}
        for feat, segs in fams.items():
            kept = [(ps, _clip(ps.seg, lo, hi)) for ps in segs]
            kept = [(ps, s) for ps, s in kept if s]
            if kept:
                side = "lower" if kept[0][0].side == "above" else "upper"
                clipped[feat] = (kept, envelope([s for _, s in kept], side))
        for fa, fb in combinations(sorted(clipped), 2):
            (ka, ea), (kb, eb) = clipped[fa], clipped[fb]
            for c in visible_between(ea, eb, transversal_only=False):
                out.add(sort_specs((chart.spec, ka[c.i][0].source, kb[c.j][0].source)))
    return out


def plane_families(robot, scene, model=None):
    """Every segment family the envelope routes rely on, as (name, [PPSeg]).

    L/R families of vertex-contact planes per second robot vertex, and
    per-vertex families of valid edge and face charts.
    """
    model = model or contact_model(robot, scene)
    out = []
    for system, triples in vertex_systems(robot, scene, model):
        pairs = sorted({(p, q) for t in triples for p in t for q in t if p != q})
        for f1 in system.subs:
            for p1, p2 in pairs:
                if vertex_spec(p1, f1) not in model.adjacency:
                    continue
                left, right = system.families(p1, f1, p2)
                for side, fam in (("L", left), ("R", right)):
                    if fam.segs:
                        out.append((f"{side} {vertex_spec(p1, f1).label} p2={p2}", fam.segs))
    for o1 in model.specs:
        if o1 not in model.adjacency or not (o1.rdim == 2 or (o1.rdim == 1 and o1.odim == 1)):
            continue
        for k, chart in enumerate(charts(robot, scene, o1)):
            if not chart_valid(robot, chart):
                continue
            for feat, segs in sorted(chart_families(robot, chart, model).items()):
                if feat[0] == 0:
                    out.append((f"chart{k} {o1.label} vertex {feat[1]}", segs))
    return out


# ---------------------------------------------------------------- pipeline

def _restricted(model, spec_ok, triple_ok, pair_ok=None):
    """Brute-force spec triples limited by per-spec, per-pair and per-triple predicates."""
    adj = model.adjacency
    specs = [s for s in model.specs if s in adj and spec_ok(s)]
    index = {s: i for i, s in enumerate(specs)}
    out = set()
    for s in specs:
        later = sorted((t for t in adj[s] if t in index and index[t] > index[s]
                        and (pair_ok is None or pair_ok(s, t))), key=index.get)
        for j, t in enumerate(later):
            for u in later[j + 1:]:
                if u in adj[t] and (pair_ok is None or pair_ok(t, u)) and triple_ok((s, t, u)):
                    out.add(sort_specs((s, t, u)))
    return out


def _tag_is(robot, tag):
    return lambda triple: classify_triple(robot, triple) == tag


def _line_pair_ok(robot, s, t):
    if s.rdim == 1 and t.rdim == 1:
        return s.ridx == t.ridx or robot.edges_parallel(s.ridx, t.ridx)
    if robot.is_flat:
        return False
    if s.rdim == 2 and t.rdim == 2:
        return True
    if {s.rdim, t.rdim} == {1, 2}:
        f, e = (s.ridx, t.ridx) if s.rdim == 2 else (t.ridx, s.ridx)
        opp = _opposite_face(robot, f)
        return _edge_in_face(robot, e, f) or (opp is not None and _edge_in_face(robot, e, opp))
    return False


def line_candidates(robot, model) -> set:
    """PAR_EDGE and LINE_PAIR triples: third contacts along realized lines of motion."""
    out = set()
    adj = model.adjacency
    for s in model.specs:
        for t in adj.get(s, ()):
            if t.key <= s.key or not _line_pair_ok(robot, s, t):
                continue
            try:
                thirds = third_contacts_on_line(robot, model.scene, s, t, model)
            except NoLine:
                continue
            for u, _ in thirds:
                out.add(sort_specs((s, t, u)))
    return out


def edge_plane_candidates(robot, model) -> set:
    out = set()
    for s in model.specs:
        if s.rdim == 1 and s.odim == 1 and s in model.adjacency:
            for chart in charts(robot, model.scene, s):
                out |= chart_candidates(robot, chart, model)
    return out


def face_plane_candidates(robot, model) -> set:
    out = set()
    for s in model.specs:
        if s.rdim == 2 and s in model.adjacency:
            for chart in charts(robot, model.scene, s):
                out |= chart_candidates(robot, chart, model)
    return out


def _edge_planes_valid(robot):
    from .scene import make_obstacle, make_scene
    probe = make_scene([make_obstacle(0, "segment", [(0, 0, 0), (1, 2, 3)])])
    for e in range(len(robot.edges)):
        o1 = ContactSpec(1, e, 0, 1, 0)
        if not all(chart_valid(robot, c) for c in charts(robot, probe, o1)):
            return False
    return True


def _face_planes_valid(robot):
    from .scene import make_obstacle, make_scene
    probe = make_scene([make_obstacle(0, "point", [(0, 0, 0)])])
    for f in range(len(robot.faces)):
        cs = charts(robot, probe, ContactSpec(2, f, 0, 0, 0))
        if not cs or not all(chart_valid(robot, c) for c in cs):
            return False
    return True


def _routes(robot, model, mechanisms):
    """Route name -> thunk producing its candidate spec triples."""
    scene = model.scene
    routes = {"VVV": lambda: vvv_candidates(robot, scene, mechanisms, model),
              "LINE": lambda: line_candidates(robot, model)}
    if robot.is_flat:
        routes["FACE"] = lambda: _restricted(model, lambda s: True,
                                             lambda t: any(x.rdim == 2 for x in t))
    if _edge_planes_valid(robot):
        routes["EDGE_PP"] = lambda: edge_plane_candidates(robot, model)
    else:
        routes["EDGE_PP"] = lambda: _restricted(model, lambda s: s.rdim <= 1, _tag_is(robot, "EDGE_PP"))
    if not robot.is_flat:
        if _face_planes_valid(robot):
            routes["FACE_PP"] = lambda: face_plane_candidates(robot, model)
        else:
            routes["FACE_PP"] = lambda: _restricted(model, lambda s: True, _tag_is(robot, "FACE_PP"))
    routes["EEE_NONPAR"] = lambda: _restricted(
        model, lambda s: s.rdim == 1, _tag_is(robot, "EEE_NONPAR"),
        lambda s, t: s.ridx != t.ridx and not robot.edges_parallel(s.ridx, t.ridx))
    return routes


def class_candidates(robot, scene, model=None, mechanisms=("A", "B"), threads=1) -> dict:
    """Candidate spec triples per class route (a route may yield several tags)."""
    model = model or contact_model(robot, scene)
    model.adjacency     # build shared caches before any worker starts
    routes = _routes(robot, model, mechanisms)
    names = sorted(routes)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda n: routes[n](), names))
    else:
        results = [routes[n]() for n in names]
    return dict(zip(names, results))


def structured_triples(robot, scene, classes=None, mechanisms=("A", "B"), threads=1) -> list:
    """Free triple contacts found through the per-class structured routes.

    The result is sorted canonically, so it does not depend on ``threads``.
    """
    model = contact_model(robot, scene)
    cands = set()
    for c in class_candidates(robot, scene, model, mechanisms, threads).values():
        cands |= c
    found = {}
    for specs in cands:
        tc = model.triple(specs)
        if tc is not None and (classes is None or tc.tag in classes):
            found[tc.key] = tc
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------- diagnostics

def _fp(p):
    return "(" + ", ".join(str(Fraction(c)) for c in p) + ")"


def _dump_family(lines, head, segs, env):
    lines.append(f"  {head}: {len(segs)} segments, {len(env.pieces)} envelope pieces, "
                 f"{env.crossing_count} crossings")
    for ps in segs:
        lines.append(f"    seg {ps.source.label} {_fp(ps.seg[0])} {_fp(ps.seg[1])} {ps.side}")
    for b in env.breakpoints:
        lines.append(f"    break {b.kind} {_fp(b.point)}")


def explain(robot, scene, spec) -> str:
    """Text dump of the parametric plane(s) of one contact: families, envelopes, candidates."""
    model = contact_model(robot, scene)
    lines = [f"plane {spec.label}"]
    if spec not in model.surfaces:
        lines.append("  not a generic contact of this scene")
        return "\n".join(lines) + "\n"
    if spec.rdim == 0 and spec.odim == 2:
        for system, triples in vertex_systems(robot, scene, model):
            n = ", ".join(str(x) for x in system.normal)
            for f1 in system.subs:
                if (f1.oid, f1.face) != (spec.oid, spec.oidx):
                    continue
                lines.append(f"subtriangle {f1.id} normal ({n}) z {_fp((f1.z_lo, f1.z_hi))}")
                for p2 in sorted({p for t in triples if spec.ridx in t for p in t} - {spec.ridx}):
                    left, right = system.families(spec.ridx, f1, p2)
                    _dump_family(lines, f"L p2={p2} upper", left.segs, left.env)
                    _dump_family(lines, f"R p2={p2} lower", right.segs, right.env)
                cands = set()
                for t in triples:
                    if spec.ridx in t:
                        cands |= {c for c in system.mechanism_a(t) | system.mechanism_b(t) if spec in c}
                _dump_candidates(lines, model, cands)
    elif spec.rdim in (1, 2) and (spec.rdim == 2 or spec.odim == 1):
        cs = charts(robot, scene, spec)
        if not cs:
            lines.append("  no rectangular chart")
        for k, chart in enumerate(cs):
            valid = chart_valid(robot, chart)
            strips_txt = " ".join(f"[{lo},{hi}]" for lo, hi in chart.strips)
            lines.append(f"chart {k} p0 {_fp(chart.p0)} h {_fp(chart.h)} v {_fp(chart.v)} "
                         f"strips {strips_txt} valid {valid}")
            for feat, segs in sorted(chart_families(robot, chart, model).items()):
                side = segs[0].side
                env = envelope([ps.seg for ps in segs], "lower" if side == "above" else "upper")
                _dump_family(lines, f"feature {feat[0]}.{feat[1]} illegal {side}", segs, env)
            _dump_candidates(lines, model, chart_candidates(robot, chart, model) if valid else set())
    else:
        lines.append("  contact has no parametric plane (edge-face contacts are handled along lines)")
    return "\n".join(lines) + "\n"


def _dump_candidates(lines, model, cands):
    lines.append(f"  candidates: {len(cands)}")
    for c in sorted(cands, key=lambda t: tuple(s.key for s in t)):
        tc = model.triple(c)
        status = "free" if tc is not None else "rejected"
        lines.append("    " + " ".join(s.label for s in c) + f" {status}"
                     + (f" {_fp(tc.v)} {tc.tag}" if tc else ""))


# ---------------------------------------------------------------- general position

def frame_violations(robot, scene, focus=None) -> list:
    """V5: an obstacle face with two vertices at one height over a robot vertex-triple plane."""
    out = []
    for n in robot_triple_normals(robot):
        for o, f, pts in _face_points(scene):
            if focus is not None and o.id not in focus:
                continue
            hs = [dot(n, p) for p in pts]
            if len(set(hs)) < len(hs):
                out.append(GPViolation("V5", (o.id, f, n), "face has two vertices at one height"))
    return out
