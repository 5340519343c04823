"""Scene generators: random general-position scenes and lower-bound layouts."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .envelopes import envelope
from .geometry import (
    add, cross, dot, is_zero, minkowski_sum_convex, negate_body, point_in_interior,
    pt, scale, seg2_intersect, separated, sub,
)
from .scene import (
    Scene, SceneError, bodies_intersect, check_general_position, make_obstacle, make_robot,
    make_scene,
)


class GenerationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    """Knobs for ``random_scene``; generation is a pure function of (m, seed, config).

    ``plants`` clusters of three obstacles are built around random placements
    of ``plant_robot`` so that each cluster pins the robot in a generic triple
    contact; the remaining obstacles are random sticks, slivers and
    tetrahedra of extent up to ``length`` inside a box whose edge grows like
    ``spread * m**(1/3)``.
    """
    kinds: tuple = ("segment", "triangle", "solid")
    spread: Fraction = Fraction(2)
    length: Fraction = Fraction(3)
    width: Fraction = Fraction(1, 2)
    denominator: int = 64
    plants: int = None            # default: m // 4
    plant_robot: str = "square"
    vertex_bias: float = 1 / 3    # chance that a plant uses three robot vertices
    robots: tuple = ("square", "triangle", "cube", "hexagon")
    retries: int = 200


DEFAULT = GenConfig()

_NPTS = {"point": 1, "segment": 2, "triangle": 3, "solid": 4}


def _rr(rng, lo, hi, den):
    return Fraction(rng.randint(ceil(lo * den), floor(hi * den)), den)


def _rvec(rng, lo, hi, den):
    return tuple(_rr(rng, lo, hi, den) for _ in range(3))


def _ivec(rng, k=6):
    while True:
        v = tuple(rng.randint(-k, k) for _ in range(3))
        if any(v):
            return v


def _stick(rng, oid, box, cfg):
    """A random segment, sliver triangle or thin tetrahedron."""
    den = cfg.denominator
    kind = rng.choice(cfg.kinds)
    a = _rvec(rng, 0, box, den)
    d = _rvec(rng, -cfg.length, cfg.length, den)
    pts = [a, add(a, d)]
    for _ in range(_NPTS[kind] - 2):
        t = _rr(rng, 0, 1, den)
        pts.append(add(add(a, scale(d, t)), _rvec(rng, -cfg.width, cfg.width, den)))
    return make_obstacle(oid, kind, pts)


def _inner_point(rng, pts, den):
    """A rational point in the relative interior of conv(pts)."""
    w = [Fraction(rng.randint(1, 8)) for _ in pts]
    tot = sum(w)
    return tuple(sum(wi * p[k] for wi, p in zip(w, pts)) / tot for k in range(3))


def _away_normal(rng, robot, x):
    """Integer n with n.(q - x) > 0 for every robot vertex q other than x."""
    others = [q for q in robot.vertices if q != x]
    for _ in range(200):
        n = _ivec(rng)
        if all(dot(n, sub(q, x)) > 0 for q in others):
            return n
    return None


def _contact_obstacle(rng, oid, robot, feat, v, cfg):
    """An obstacle touching feature ``feat`` of the robot placed at v, generically."""
    den = cfg.denominator
    pts = robot.feature_points(feat)
    x = pts[0] if feat[0] == 0 else _inner_point(rng, pts, den)
    xv = add(x, v)
    if feat[0] == 0:
        # a plate (or a tetrahedron face) through the vertex, robot on one side
        n = _away_normal(rng, robot, x)
        if n is None:
            return None
        e1 = cross(n, _ivec(rng))
        if is_zero(e1):
            return None
        e2 = cross(n, e1)
        r = _rr(rng, Fraction(1, 2), Fraction(3, 2), 8) / max(abs(c) for c in e1 + e2)
        corners = [(1, 0), (Fraction(-1, 2), 1), (Fraction(-1, 2), -1)]
        plate = [add(xv, scale(add(scale(e1, a + _rr(rng, -Fraction(1, 4), Fraction(1, 4), 8)),
                                   scale(e2, b + _rr(rng, -Fraction(1, 4), Fraction(1, 4), 8))), r))
                 for a, b in corners]
        if rng.random() < 0.5:
            return make_obstacle(oid, "triangle", plate)
        apex = add(_inner_point(rng, plate, den), scale(n, -r * _rr(rng, Fraction(1, 2), 2, 8)))
        return make_obstacle(oid, "solid", plate + [apex])
    if feat[0] == 1:
        d = _ivec(rng)
        t = _rr(rng, Fraction(1, 4), Fraction(3, 2), 8) / max(abs(c) for c in d)
        u = _rr(rng, Fraction(1, 4), Fraction(3, 2), 8) / max(abs(c) for c in d)
        return make_obstacle(oid, "segment", [add(xv, scale(d, t)), sub(xv, scale(d, u))])
    n = robot.face_normals[feat[1]]
    if robot.is_flat and rng.random() < 0.5:
        n = scale(n, -1)
    d = _ivec(rng)
    if dot(d, n) < 0:
        d = scale(d, -1)
    if dot(d, n) == 0:
        return None
    far = add(xv, scale(d, _rr(rng, Fraction(1, 2), 2, 8) / max(abs(c) for c in d)))
    if rng.random() < 0.5:
        return make_obstacle(oid, "segment", [xv, far])
    e = cross(d, _ivec(rng))
    if is_zero(e):
        return None
    e = scale(e, _rr(rng, Fraction(1, 4), Fraction(1), 8) / max(abs(c) for c in e))
    return make_obstacle(oid, "triangle", [xv, add(far, e), sub(far, e)])


def _blocks(o, robot, v):
    """Whether obstacle o meets the interior of the robot placed at v."""
    if separated(o.body, robot.body, v, weak=True):
        return False
    return point_in_interior(minkowski_sum_convex(o.body, negate_body(robot.body)), v)


def _plant(rng, start, robot, box, cfg):
    den = cfg.denominator
    v = _rvec(rng, 0, box, den)
    if rng.random() < cfg.vertex_bias:
        picks = rng.sample(robot.features(0), 3)
    else:
        feats = [f for d in range(3) for f in robot.features(d)]
        while True:
            picks = rng.sample(feats, 3)
            if sum(1 for f in picks if f[0] == 2) <= 1:
                break
    out = []
    for k, f in enumerate(picks):
        try:
            o = _contact_obstacle(rng, start + k, robot, f, v, cfg)
        except SceneError:
            return None
        if o is None or _blocks(o, robot, v) or any(bodies_intersect(o.body, p.body) for p in out):
            return None
        out.append(o)
    return v, out


def _gp_clean(scene, robots, focus=None):
    return all(not check_general_position(r, scene, focus=focus) for r in robots)


def random_scene(m: int, seed: int, cfg: GenConfig = DEFAULT) -> Scene:
    """m pairwise-disjoint obstacles with small-denominator rational coordinates.

    Draws that touch an earlier obstacle, block a planted placement, or
    break general position for any of ``cfg.robots`` are redrawn.
    """
    meta = {"seed": seed, "generator": "random"}
    if m <= 0:
        return make_scene([], meta)
    rng = random.Random(f"random_scene:{m}:{seed}:{cfg.plant_robot}")
    robots = [make_robot(r) for r in cfg.robots]
    planter = make_robot(cfg.plant_robot)
    box = cfg.spread * Fraction(round(m ** (1 / 3) * 64), 64)
    plants = m // 4 if cfg.plants is None else cfg.plants
    obstacles, placements = [], []

    def fits(group):
        if any(bodies_intersect(o.body, p.body) for o in group for p in obstacles):
            return False
        if any(_blocks(o, planter, v) for o in group for v in placements):
            return False
        # earlier obstacles were already clean, so only the new ones need checking
        return _gp_clean(make_scene(obstacles + group), robots, {o.id for o in group})

    budget = cfg.retries * max(m, 1)
    while len(obstacles) < m:
        budget -= 1
        if budget < 0:
            raise GenerationFailed(f"gave up after placing {len(obstacles)} of {m} obstacles")
        oid = len(obstacles)
        if len(placements) < plants and m - oid >= 3:
            got = _plant(rng, oid, planter, box, cfg)
            if got is None or not fits(got[1]):
                continue
            placements.append(got[0])
            obstacles.extend(got[1])
            continue
        try:
            o = _stick(rng, oid, box, cfg)
        except SceneError:
            continue
        if fits([o]):
            obstacles.append(o)
    return make_scene(obstacles, meta)


def quadratic_scene(m: int, robot=None) -> Scene:
    """Square-robot layout with 4*m*m free triple contacts.

    A_i and A'_i form m corners (a floor rail at x = 4i + 1/2 and a wall rail
    at x = 4i, z = 1/2), all parallel to the y-axis.  The m diagonal rails B_j
    at height 1/4 cross every corner, pinning the square in two placements
    each: v = (4i, 4i - 3j, 0) and (4i, 4i - 3j + 1, 0).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    big = 10 * m
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    obs = []
    for i in range(1, m + 1):
        obs.append([(4 * i + half, -big, 0), (4 * i + half, big, 0)])
        obs.append([(4 * i, -big, half), (4 * i, big, half)])
    for j in range(1, m + 1):
        obs.append([(3 * j - big, -big, quarter), (3 * j + big, big, quarter)])
    scene = make_scene([make_obstacle(k, "segment", p) for k, p in enumerate(obs)],
                       {"seed": 0, "generator": f"quadratic:{m}"})
    return scene


def quadratic_predicted(m: int) -> list:
    """The placements quadratic_scene(m) is built to realize."""
    out = []
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            out.append(pt(4 * i, 4 * i - 3 * j, 0))
            out.append(pt(4 * i, 4 * i - 3 * j + 1, 0))
    return out


def hard_envelope_family(m: int, seed: int = 0) -> list:
    """m nonvertical segments whose lower envelope has m - 1 crossings.

    Segment i lies on the tangent to w = -u**2 at u = t_i; tangents to a
    concave curve all show up on the lower envelope, in order, and
    consecutive ones cross there.  The seed jitters the tangent points.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    rng = random.Random(f"hard_envelope_family:{m}:{seed}")
    out = []
    for i in range(m):
        t = i + Fraction(rng.randint(-8, 8), 64)
        lo, hi = t - Fraction(3, 4), t + Fraction(3, 4)
        out.append(((lo, -2 * t * lo + t * t), (hi, -2 * t * hi + t * t)))
    return out


def _fig1_layout(m):
    fam = hard_envelope_family(m, 0)
    xs = [c.point for c in envelope(fam, "lower").breakpoints if c.kind == "crossing"]
    ws = [w for _, w in xs] or [0]
    # x = -kappa * w turns the lower envelope in w into the upper envelope in x,
    # squeezed so every crossing has x within a window of width 1 / (4(m+1))
    spread = max(ws) - min(ws) or 1
    kappa = Fraction(1, 4 * (m + 1)) / spread
    return fam, kappa, -kappa * min(ws)


def fig1_scene(m: int) -> Scene:
    """Triangle-robot layout pairing every envelope crossing with every rail.

    Family (a): the m segments of ``hard_envelope_family(m)`` drawn in the
    xy-plane with x = -kappa*w, y = u, segment i at height (i+1)*eps.  The
    robot's vertical edge can rest against two of them exactly at a crossing
    of their upper x-envelope and then slides freely up and down.
    Family (b): m rails parallel to the y-axis just inside the robot's
    right corner at heights -k/(m+1).  Each rail blocks a short, separate
    stretch of that vertical slide, so every (crossing, rail) pair gives two
    free triple contacts: one on the bottom edge, one on the slanted edge.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        fam, kappa, xhi = [((Fraction(-1), Fraction(0)), (Fraction(1), Fraction(0)))], Fraction(1), 0
    else:
        fam, kappa, xhi = _fig1_layout(m)
    eps = Fraction(1, 8 * m * (m + 1))
    obs = []
    for i, ((u0, w0), (u1, w1)) in enumerate(fam):
        z = (i + 1) * eps
        obs.append(make_obstacle(i, "segment", [(-kappa * w0, u0, z), (-kappa * w1, u1, z)]))
    big = m + 2
    lam = Fraction(3, 4 * (m + 1))
    for k in range(1, m + 1):
        c = xhi + 1 - lam - Fraction(k, 64 * (m + 1) ** 2)
        h = Fraction(-k, m + 1)
        obs.append(make_obstacle(m + k - 1, "segment", [(c, -big, h), (c, big, h)]))
    return make_scene(obs, {"seed": 0, "generator": f"fig1:{m}"})


def fig1_crossings(m: int) -> int:
    """B(m): envelope crossings of the planar family behind fig1_scene(m)."""
    if m < 2:
        return 0
    return envelope(hard_envelope_family(m, 0), "lower").crossing_count


def fig1_pairings(triples, m: int) -> list:
    """Triples of fig1_scene(m) that pair an (a)-crossing with a (b) rail.

    Two contacts must hold one robot edge against two family-(a) segments
    (ids < m); the third touches a rail.
    """
    out = []
    for t in triples:
        a = [s for s in t.specs if s.oid < m]
        if len(a) == 2 and a[0].rdim == a[1].rdim == 1 and a[0].ridx == a[1].ridx:
            out.append(t)
    return out


def random_segments(m: int, seed: int, noncrossing: bool = False, span: int = 32) -> list:
    """m nonvertical planar segments with integer endpoints in [0, span]^2.

    Redraws anything that would overlap collinearly or touch another segment
    at an endpoint, so every shared point is a transversal crossing; with
    ``noncrossing`` no two segments share any point.
    """
    rng = random.Random(f"random_segments:{m}:{seed}:{noncrossing}:{span}")
    out = []
    budget = 1000 * max(m, 1)
    while len(out) < m:
        budget -= 1
        if budget < 0:
            raise GenerationFailed(f"placed {len(out)} of {m} segments")
        x0, x1 = sorted(rng.sample(range(span + 1), 2))
        if noncrossing and x1 - x0 > span // 2:
            continue
        s = ((Fraction(x0), Fraction(rng.randint(0, span))), (Fraction(x1), Fraction(rng.randint(0, span))))
        ok = True
        for t in out:
            hit = seg2_intersect(s, t)
            if hit.kind == "empty":
                continue
            if noncrossing or hit.kind == "overlap" or hit.a in s or hit.a in t:
                ok = False
                break
        if ok:
            out.append(s)
    return out
