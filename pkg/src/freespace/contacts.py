"""Contact specifications, contact surfaces, triple contacts and freeness.

A placement is a translation vector ``v`` of the robot.  A contact
specification pairs a robot feature ``f`` with an obstacle feature ``g``;
the placements realizing it form the convex polygon ``g - f`` (the contact
surface).  Collision means ``v`` lies in the interior of ``C + (-B)`` for
some obstacle ``C``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import NamedTuple

from .geometry import (
    ConvexBody, add, convex_hull3, cross, dot, is_zero, minkowski_sum_convex,
    negate_body, parallel, point_in_interior, scale, sign, solve3, sub,
)
from .scene import GPViolation, RobotShape, Scene, bodies_intersect

CLASS_TAGS = ("VVV", "FACE", "PAR_EDGE", "LINE_PAIR", "FACE_PP", "EDGE_PP", "EEE_NONPAR")


class DegenerateSurface(Exception):
    pass


class Unclassifiable(Exception):
    pass


class NoLine(Exception):
    pass


class ContactSpec(NamedTuple):
    """Robot feature ``(rdim, ridx)`` against obstacle feature ``(oid, odim, oidx)``."""
    rdim: int
    ridx: int
    oid: int
    odim: int
    oidx: int

    @property
    def key(self):
        return (self.oid, self.odim, self.oidx, self.rdim, self.ridx)

    @property
    def degree(self):
        return {2: "generic", 1: "singly degenerate", 0: "doubly degenerate"}[self.rdim + self.odim]

    @property
    def kind(self):
        return ("vertex", "edge", "face")[self.rdim]

    @property
    def label(self):
        return f"R{self.rdim}.{self.ridx}@O{self.oid}.{self.odim}.{self.oidx}"


def parse_spec_label(text: str) -> ContactSpec:
    r, o = text.split("@")
    rdim, ridx = r[1:].split(".")
    oid, odim, oidx = o[1:].split(".")
    return ContactSpec(int(rdim), int(ridx), int(oid), int(odim), int(oidx))


def sort_specs(specs):
    return tuple(sorted(specs, key=lambda s: s.key))


class ContactSurface(NamedTuple):
    spec: ContactSpec
    normal: tuple
    offset: Fraction
    polygon: tuple          # CCW around normal
    sides: tuple            # (inward in-plane normal m, dot(m, a)) per edge
    bbox: tuple
    plane_int: tuple = None  # (normal, offset) scaled to integers
    sides_int: tuple = None  # sides scaled to integers

    def contains(self, p, strict=True) -> bool:
        lo, hi = self.bbox
        for k in range(3):
            if p[k] < lo[k] or p[k] > hi[k]:
                return False
        if strict:
            return all(dot(m, p) > c for m, c in self.sides)
        return all(dot(m, p) >= c for m, c in self.sides)


class TripleContact(NamedTuple):
    specs: tuple
    v: tuple
    tag: str

    @property
    def key(self):
        return tuple(s.key for s in self.specs) + (self.v,)


def enumerate_specs(robot: RobotShape, scene: Scene) -> list:
    out = []
    for o in scene.obstacles:
        for rdim in range(3):
            odim = 2 - rdim
            for ridx in range(len(robot.features(rdim))):
                for oidx in range(o.count(odim)):
                    out.append(ContactSpec(rdim, ridx, o.id, odim, oidx))
    out.sort(key=lambda s: s.key)
    return out


def _surface_from_points(spec, pts):
    body = convex_hull3(pts)
    if body.dim != 2:
        raise DegenerateSurface(f"{spec.label}: surface is {body.dim}-dimensional")
    f = body.facets[0]
    poly = tuple(body.vertices[i] for i in f.cycle)
    sides = []
    for a, b in zip(poly, poly[1:] + poly[:1]):
        m = cross(f.normal, sub(b, a))
        sides.append((m, dot(m, a)))
    return ContactSurface(spec, f.normal, f.offset, poly, tuple(sides), body.bbox(),
                          integer_halfspace(f.normal, f.offset),
                          tuple(integer_halfspace(m, c) for m, c in sides))


def integer_halfspace(m, c):
    """(m, c) scaled by a positive factor so every entry is a Python int."""
    den = 1
    for x in (*m, c):
        x = Fraction(x)
        den = den * x.denominator // gcd(den, x.denominator)
    return tuple(int(x * den) for x in m), int(c * den)


def _idot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _icross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _solve_int(p1, p2, p3):
    """Cramer on integer planes: (numerators, det) with det > 0, or None."""
    (a, ra), (b, rb), (c, rc) = p1, p2, p3
    bc, ca, ab = _icross(b, c), _icross(c, a), _icross(a, b)
    det = _idot(a, bc)
    if det == 0:
        return None
    # x = (ra * (b x c) + rb * (c x a) + rc * (a x b)) / det
    num = tuple(ra * bc[k] + rb * ca[k] + rc * ab[k] for k in range(3))
    if det < 0:
        det, num = -det, tuple(-x for x in num)
    return num, det


def _inside_int(sides, num, det, strict):
    if strict:
        return all(_idot(m, num) > c * det for m, c in sides)
    return all(_idot(m, num) >= c * det for m, c in sides)


def contact_surface(robot: RobotShape, scene: Scene, spec: ContactSpec) -> ContactSurface:
    if spec.rdim + spec.odim != 2:
        raise DegenerateSurface("contact surfaces are defined for generic specs only")
    fpts = robot.feature_points((spec.rdim, spec.ridx))
    gpts = scene.obstacle(spec.oid).feature_points(spec.odim, spec.oidx)
    return _surface_from_points(spec, [sub(w, u) for w in gpts for u in fpts])


def forbidden_body(robot: RobotShape, obstacle) -> ConvexBody:
    return minkowski_sum_convex(obstacle.body, negate_body(robot.body))


class ContactModel:
    """Per (robot, scene) cache of specs, surfaces and forbidden bodies."""

    def __init__(self, robot: RobotShape, scene: Scene):
        self.robot = robot
        self.scene = scene
        self.specs = enumerate_specs(robot, scene)
        self.surfaces = {}
        self.degenerate = []
        for s in self.specs:
            try:
                self.surfaces[s] = contact_surface(robot, scene, s)
            except DegenerateSurface:
                self.degenerate.append(s)
        self.bodies = [forbidden_body(robot, o) for o in scene.obstacles]
        self.body_boxes = [b.bbox() for b in self.bodies]
        self.body_int = [([integer_halfspace(f.normal, f.offset) for f in b.facets]
                          if b.dim == 3 else None) for b in self.bodies]
        self._adj = None

    @property
    def adjacency(self):
        if self._adj is None:
            self._adj = self.candidate_pairs()
        return self._adj

    def is_free(self, v) -> bool:
        for body, (lo, hi) in zip(self.bodies, self.body_boxes):
            if all(lo[k] < v[k] < hi[k] for k in range(3)) and point_in_interior(body, v):
                return False
        return True

    def _free_int(self, num, det):
        for planes in self.body_int:
            if planes is not None and all(_idot(n, num) < c * det for n, c in planes):
                return False
        return True

    def blocking(self, v):
        """Ids of obstacles whose forbidden interior contains v."""
        return [o.id for o, b in zip(self.scene.obstacles, self.bodies) if point_in_interior(b, v)]

    def _solve(self, s1, s2, s3):
        a, b, c = self.surfaces[s1], self.surfaces[s2], self.surfaces[s3]
        sol = _solve_int(a.plane_int, b.plane_int, c.plane_int)
        if sol is None:
            return None, "singular"
        num, det = sol
        if not all(_inside_int(x.sides_int, num, det, False) for x in (a, b, c)):
            return sol, "outside"
        if all(_inside_int(x.sides_int, num, det, True) for x in (a, b, c)):
            return sol, "interior"
        return sol, "boundary"

    def solve(self, s1, s2, s3):
        """(v, status): status is singular | outside | boundary | interior."""
        sol, status = self._solve(s1, s2, s3)
        if sol is None:
            return None, status
        num, det = sol
        return tuple(Fraction(x, det) for x in num), status

    def triple(self, specs):
        sol, status = self._solve(*specs)
        if status != "interior" or not self._free_int(*sol):
            return None
        specs = sort_specs(specs)
        v = tuple(Fraction(x, sol[1]) for x in sol[0])
        return TripleContact(specs, v, classify_triple(self.robot, specs))

    def candidate_pairs(self, specs=None):
        """Adjacency between surfaces whose bounding boxes overlap."""
        specs = [s for s in (specs or self.specs) if s in self.surfaces]
        order = sorted(specs, key=lambda s: self.surfaces[s].bbox[0][0])
        adj = {s: set() for s in specs}
        for i, s in enumerate(order):
            lo, hi = self.surfaces[s].bbox
            for t in order[i + 1:]:
                tlo, thi = self.surfaces[t].bbox
                if tlo[0] > hi[0]:
                    break
                if all(tlo[k] <= hi[k] and lo[k] <= thi[k] for k in (1, 2)):
                    adj[s].add(t)
                    adj[t].add(s)
        return adj


@lru_cache(maxsize=16)
def contact_model(robot: RobotShape, scene: Scene) -> ContactModel:
    return ContactModel(robot, scene)


def is_free(robot: RobotShape, scene: Scene, v) -> bool:
    return contact_model(robot, scene).is_free(tuple(v))


def solve_triple(robot: RobotShape, scene: Scene, s1, s2, s3):
    """The placement realizing all three specs (closed polygons), or None."""
    v, status = contact_model(robot, scene).solve(s1, s2, s3)
    return v if status in ("interior", "boundary") else None


def _triples_from(model, adj, firsts):
    index = {s: i for i, s in enumerate(model.specs)}
    out = []
    for s in firsts:
        later = sorted((t for t in adj[s] if index[t] > index[s]), key=index.get)
        for j, t in enumerate(later):
            common = adj[t]
            for u in later[j + 1:]:
                if u in common:
                    tc = model.triple((s, t, u))
                    if tc is not None:
                        out.append(tc)
    return out


def brute_force_triples(robot: RobotShape, scene: Scene, threads: int = 1, classes=None) -> list:
    """Every free generic triple contact, by exhaustive enumeration.

    Triples are pruned only by pairwise bounding-box overlap of their contact
    surfaces, which every realizable triple must satisfy.  ``classes``
    restricts the output to the given class tags.
    """
    model = contact_model(robot, scene)
    adj = model.adjacency
    firsts = [s for s in model.specs if s in adj]
    if threads > 1 and len(firsts) > 1:
        chunks = [firsts[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda c: _triples_from(model, adj, c), chunks))
        found = [t for p in parts for t in p]
    else:
        found = _triples_from(model, adj, firsts)
    if classes is not None:
        found = [t for t in found if t.tag in classes]
    found.sort(key=lambda t: t.key)
    return found


def verify_in_workspace(robot: RobotShape, scene: Scene, triple: TripleContact) -> bool:
    """Re-check each contact by intersecting the translated robot feature with g."""
    for s in triple.specs:
        f = [add(p, triple.v) for p in robot.feature_points((s.rdim, s.ridx))]
        g = scene.obstacle(s.oid).feature_points(s.odim, s.oidx)
        if not bodies_intersect(convex_hull3(f), convex_hull3(g)):
            return False
    return True


# ---------------------------------------------------------------- classification

def _edge_in_face(robot, e, f):
    i, j = robot.edges[e]
    cyc = robot.faces[f]
    return i in cyc and j in cyc


def _opposite_face(robot, f):
    n = robot.face_normals[f]
    for g, m in enumerate(robot.face_normals):
        if g != f and parallel(n, m) and dot(n, m) < 0:
            return g
    return None


def classify_triple(robot: RobotShape, specs) -> str:
    """Case-analysis tag of a generic spec triple, checked in priority order."""
    feats = tuple(sorted((s.rdim, s.ridx) for s in specs))
    memo = robot.memo.setdefault("tags", {})
    if feats not in memo:
        try:
            memo[feats] = _classify(robot, feats)
        except Unclassifiable as e:
            memo[feats] = e
    tag = memo[feats]
    if isinstance(tag, Exception):
        raise tag
    return tag


def _classify(robot, feats):
    dims = sorted(d for d, _ in feats)
    if dims == [0, 0, 0]:
        return "VVV"
    edges = [i for d, i in feats if d == 1]
    for a, b in combinations(edges, 2):
        if a == b or robot.edges_parallel(a, b):
            return "PAR_EDGE"
    faces = [i for d, i in feats if d == 2]
    if not robot.is_flat:
        if len(faces) >= 2:
            # nonparallel faces; equal or opposite faces are folded in here too
            return "LINE_PAIR"
        if faces:
            f = faces[0]
            opp = _opposite_face(robot, f)
            for e in edges:
                if _edge_in_face(robot, e, f) or (opp is not None and _edge_in_face(robot, e, opp)):
                    return "LINE_PAIR"
    if faces and robot.is_flat:
        return "FACE"
    if faces:
        if dims.count(0) >= 1 and all(dot(robot.edge_vector(e), robot.face_normals[faces[0]]) != 0
                                      for e in edges):
            return "FACE_PP"
        raise Unclassifiable(f"face triple {feats}")
    if len(edges) in (1, 2):
        return "EDGE_PP"
    if len(edges) == 3:
        return "EEE_NONPAR"
    raise Unclassifiable(f"triple {feats}")


# ---------------------------------------------------------------- lines of motion

def _line_interval(surface, p, d):
    """Closed parameter interval of the line p + t d inside a polygon."""
    lo, hi = None, None
    for m, c in surface.sides:
        a, b = dot(m, d), dot(m, p) - c      # need a t + b >= 0
        if a == 0:
            if b < 0:
                return None
            continue
        t = -b / a
        if a > 0:
            lo = t if lo is None else max(lo, t)
        else:
            hi = t if hi is None else min(hi, t)
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def double_contact_segment(model: ContactModel, o1, o2):
    """(p, d, t0, t1): the line of motion preserving both contacts, clipped to both polygons."""
    a, b = model.surfaces[o1], model.surfaces[o2]
    d = cross(a.normal, b.normal)
    if is_zero(d):
        raise NoLine(f"{o1.label} and {o2.label} have parallel planes")
    # a point on both planes: solve with the line direction as third row
    p = solve3((a.normal, b.normal, d), (a.offset, b.offset, Fraction(0)))
    ia, ib = _line_interval(a, p, d), _line_interval(b, p, d)
    if ia is None or ib is None:
        return None
    t0, t1 = max(ia[0], ib[0]), min(ia[1], ib[1])
    if t0 > t1:
        return None
    return p, d, t0, t1


def third_contacts_on_line(robot: RobotShape, scene: Scene, o1, o2, model=None) -> list:
    """Specs O3 that close a free triple with the pair (o1, o2) along their common line.

    Returns (spec, placement) pairs sorted canonically.
    """
    model = model or contact_model(robot, scene)
    if is_zero(cross(model.surfaces[o1].normal, model.surfaces[o2].normal)):
        raise NoLine(f"{o1.label} and {o2.label} have parallel planes")
    adj = model.adjacency
    out = []
    # each third plane crosses the common line once; keep crossings inside all three
    # closed polygons at free placements
    for s3 in adj.get(o1, set()) & adj.get(o2, set()):
        sol, status = model._solve(o1, o2, s3)
        if status in ("interior", "boundary") and model._free_int(*sol):
            num, det = sol
            out.append((s3, tuple(Fraction(x, det) for x in num)))
    out.sort(key=lambda sv: sv[0].key)
    return out


# ---------------------------------------------------------------- full-mode GP checks

def full_gp_violations(robot: RobotShape, scene: Scene) -> list:
    model = contact_model(robot, scene)
    out = []
    adj = model.adjacency
    by_plane = {}
    for s, surf in model.surfaces.items():
        by_plane.setdefault((surf.normal, surf.offset), []).append(s)
    for group in by_plane.values():
        for s, t in combinations(sorted(group, key=lambda x: x.key), 2):
            if s.oid != t.oid and t in adj[s]:
                out.append(GPViolation("V6", (s.label, t.label), "coplanar contact surfaces"))
    index = {s: i for i, s in enumerate(model.specs)}
    for s in model.specs:
        if s not in adj:
            continue
        later = sorted((t for t in adj[s] if index[t] > index[s]), key=index.get)
        for j, t in enumerate(later):
            for u in later[j + 1:]:
                if u not in adj[t]:
                    continue
                if len({s.oid, t.oid, u.oid}) < 3:
                    continue
                a, b, c = (model.surfaces[x] for x in (s, t, u))
                v, status = model.solve(s, t, u)
                if status == "singular":
                    if _consistent_singular(a, b, c):
                        out.append(GPViolation("V6", (s.label, t.label, u.label),
                                               "three contact planes share a line"))
                    continue
                if status == "outside" or not model.is_free(v):
                    continue
                if status == "boundary":
                    out.append(GPViolation("V7", (s.label, t.label, u.label),
                                           "free triple point on a surface boundary"))
                    continue
                for w, surf in model.surfaces.items():
                    if w.oid in (s.oid, t.oid, u.oid):
                        continue
                    if dot(surf.normal, v) == surf.offset and surf.contains(v, strict=False):
                        out.append(GPViolation("V6", (s.label, t.label, u.label, w.label),
                                               "four contact planes concurrent"))
    return out


def _consistent_singular(a, b, c):
    rows = [a.normal, b.normal, c.normal]
    if any(parallel(x, y) for x, y in combinations(rows, 2)):
        return False
    d = cross(a.normal, b.normal)
    p = solve3((a.normal, b.normal, d), (a.offset, b.offset, Fraction(0)))
    return dot(c.normal, p) == c.offset
