"""Robots, obstacles, scenes, scene files and general-position checks."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

from .geometry import (
    ConvexBody, convex_hull3, cross, dot, fmt_rat, is_zero, locate_point,
    minkowski_sum_convex, negate_body, orient2d, parallel, primitive, pt, rat, separated, sub,
)

SCENE_VERSION = 1


class SceneError(Exception):
    pass


class NonConvex(SceneError):
    pass


class NotFullyParallel(SceneError):
    pass


class DegenerateInput(SceneError):
    pass


class ParseError(SceneError):
    def __init__(self, locus, detail):
        super().__init__(f"{locus}: {detail}")
        self.locus = locus
        self.detail = detail


class InvariantViolation(SceneError):
    pass


class PerturbationBrokeDisjointness(SceneError):
    pass


# ---------------------------------------------------------------- robots

@dataclass(frozen=True)
class RobotShape:
    """A translating robot.

    Features are addressed as ``(dim, index)``: vertices index ``vertices``,
    edges index ``edges`` (vertex-index pairs) and faces index ``faces``
    (vertex-index cycles).  A flat polygon has exactly one face, itself.
    ``partner[e]`` is the index of the edge parallel to edge ``e`` (or None)
    and ``pair_ratio[e]`` is len(partner) / len(e), an exact rational.
    """
    tag: str
    kind: str  # "flat" or "polytope"
    vertices: tuple
    edges: tuple
    faces: tuple
    face_normals: tuple
    body: ConvexBody
    partner: tuple
    pair_ratio: tuple
    is_triangle: bool = False
    is_square: bool = False
    is_fully_parallel: bool = False
    is_cube: bool = False

    @property
    def is_flat(self):
        return self.kind == "flat"

    def edge_vector(self, e):
        i, j = self.edges[e]
        return sub(self.vertices[j], self.vertices[i])

    def feature_points(self, feat):
        dim, idx = feat
        if dim == 0:
            return (self.vertices[idx],)
        if dim == 1:
            return tuple(self.vertices[i] for i in self.edges[idx])
        return tuple(self.vertices[i] for i in self.faces[idx])

    def features(self, dim):
        n = (len(self.vertices), len(self.edges), len(self.faces))[dim]
        return [(dim, i) for i in range(n)]

    @cached_property
    def memo(self):
        """Per-robot cache for derived data (halfspaces, triple tags, ...)."""
        return {}

    @cached_property
    def _par(self):
        n = len(self.edges)
        return [[parallel(self.edge_vector(a), self.edge_vector(b)) for b in range(n)] for a in range(n)]

    def edges_parallel(self, e1, e2):
        return self._par[e1][e2]

    def pair_lengths(self, e):
        """(d, D) as rationals in units of the shorter edge of the pair."""
        r = self.pair_ratio[e]
        if r is None:
            return None
        return (Fraction(1), r) if r >= 1 else (Fraction(1), 1 / r)


def _flat_robot(tag, points, want_parallel=False):
    pts = [pt(*p) for p in points]
    if len(pts) < 3 or len(set(pts)) != len(pts):
        raise DegenerateInput("a flat robot needs at least 3 distinct vertices")
    body = convex_hull3(pts)
    if body.dim != 2:
        raise DegenerateInput("flat robot vertices must be coplanar and not collinear")
    if len(body.vertices) != len(pts):
        raise NonConvex("some vertices are not extreme points")
    normal = body.facets[0].normal
    k = max(range(3), key=lambda i: abs(normal[i]))
    keep = [i for i in range(3) if i != k]
    proj = [(p[keep[0]], p[keep[1]]) for p in pts]
    turns = {orient2d(proj[i - 2], proj[i - 1], proj[i]) for i in range(len(pts))}
    if 0 in turns or len(turns) != 1:
        raise NonConvex("vertices do not form a strictly convex loop in the given order")
    nv = len(pts)
    edges = tuple((i, (i + 1) % nv) for i in range(nv))
    vecs = [sub(pts[j], pts[i]) for i, j in edges]
    partner, ratio = [], []
    for e, u in enumerate(vecs):
        mates = [f for f, w in enumerate(vecs) if f != e and parallel(u, w)]
        if mates:
            f = mates[0]
            k2 = max(range(3), key=lambda i: abs(u[i]))
            partner.append(f)
            ratio.append(abs(vecs[f][k2] / u[k2]))
        else:
            partner.append(None)
            ratio.append(None)
    fully = all(p is not None for p in partner)
    if want_parallel and not fully:
        raise NotFullyParallel("every edge needs a parallel partner")
    # outward normal of the face is arbitrary for a flat robot; keep the hull's
    return RobotShape(
        tag=tag, kind="flat", vertices=tuple(pts), edges=edges,
        faces=(tuple(range(nv)),), face_normals=(normal,), body=body,
        partner=tuple(partner), pair_ratio=tuple(ratio),
        is_triangle=nv == 3, is_fully_parallel=fully,
    )


def _polytope_robot(tag, points):
    body = convex_hull3([pt(*p) for p in points])
    if body.dim != 3:
        raise DegenerateInput("a polytope robot must be full-dimensional")
    edges = body.edges
    vecs = [sub(body.vertices[j], body.vertices[i]) for i, j in edges]
    partner, ratio = [], []
    for e, u in enumerate(vecs):
        mates = [f for f, w in enumerate(vecs) if f != e and parallel(u, w)]
        partner.append(mates[0] if mates else None)
        ratio.append(None)
    return RobotShape(
        tag=tag, kind="polytope", vertices=body.vertices, edges=edges,
        faces=tuple(f.cycle for f in body.facets),
        face_normals=tuple(f.normal for f in body.facets), body=body,
        partner=tuple(partner), pair_ratio=tuple(ratio),
    )


SQUARE = [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)]
TRIANGLE = [(0, 0, 0), (1, 0, 0), (0, 0, 1)]
# fully-parallel hexagon in the xz-plane; every parallel pair has length ratio 3
HEXAGON = [(0, 0, 0), (3, 0, 0), (4, 0, 1), (4, 0, 4), (3, 0, 4), (0, 0, 1)]

ROBOT_TAGS = ("square", "triangle", "hexagon", "cube", "fully_parallel", "polygon", "polytope")


def make_robot(tag: str, params=None) -> RobotShape:
    """Build and validate a robot.

    ``square`` and ``cube`` take no parameters; ``triangle`` and ``hexagon``
    fall back to the defaults above.  ``fully_parallel`` and ``polygon``
    take a convex loop of 3D points; ``polytope`` takes a point cloud.
    """
    if tag == "square":
        r = _flat_robot("square", SQUARE)
        return _replace(r, is_square=True)
    if tag == "triangle":
        return _flat_robot("triangle", params or TRIANGLE)
    if tag == "hexagon":
        return _flat_robot("hexagon", params or HEXAGON, want_parallel=True)
    if tag == "fully_parallel":
        if params is None:
            raise DegenerateInput("fully_parallel needs vertices")
        if len(params) % 2:
            raise NotFullyParallel("odd number of edges")
        return _flat_robot("fully_parallel", params, want_parallel=True)
    if tag == "polygon":
        return _flat_robot("polygon", params)
    if tag == "cube":
        r = _polytope_robot("cube", [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)])
        return _replace(r, is_cube=True)
    if tag == "polytope":
        return _polytope_robot("polytope", params)
    raise DegenerateInput(f"unknown robot kind {tag!r}")


def _replace(robot, **kw):
    from dataclasses import replace
    return replace(robot, **kw)


# ---------------------------------------------------------------- obstacles

OBSTACLE_KINDS = ("point", "segment", "triangle", "solid")


@dataclass(frozen=True)
class Obstacle:
    id: int
    kind: str
    points: tuple
    body: ConvexBody
    vertices: tuple
    edges: tuple
    faces: tuple

    def feature_points(self, dim, idx):
        if dim == 0:
            return (self.vertices[idx],)
        if dim == 1:
            return tuple(self.vertices[i] for i in self.edges[idx])
        return tuple(self.vertices[i] for i in self.faces[idx])

    def count(self, dim):
        return (len(self.vertices), len(self.edges), len(self.faces))[dim]


def make_obstacle(oid: int, kind: str, points) -> Obstacle:
    pts = tuple(pt(*p) for p in points)
    body = convex_hull3(pts)
    need = {"point": 0, "segment": 1, "triangle": 2, "solid": 3}
    if kind not in need:
        raise DegenerateInput(f"unknown obstacle kind {kind!r}")
    if body.dim != need[kind] or len(body.vertices) != len(set(pts)) or len(set(pts)) != len(pts):
        raise DegenerateInput(f"obstacle {oid}: points do not form a proper {kind}")
    if kind == "point":
        return Obstacle(oid, kind, pts, body, body.vertices, (), ())
    if kind == "segment":
        return Obstacle(oid, kind, pts, body, body.vertices, ((0, 1),), ())
    if kind == "triangle":
        return Obstacle(oid, kind, pts, body, body.vertices, body.edges,
                        (body.facets[0].cycle,))
    # faces of solids are triangulated so every face is a triangle
    faces = tuple(sorted(tuple(sorted(t)) for t in body.triangles()))
    edges = set(body.edges)
    for a, b, c in faces:
        for u, v in ((a, b), (b, c), (a, c)):
            edges.add((min(u, v), max(u, v)))
    return Obstacle(oid, kind, pts, body, body.vertices, tuple(sorted(edges)), faces)


@dataclass(frozen=True)
class Scene:
    obstacles: tuple = ()
    metadata: dict = field(default_factory=dict, compare=False, hash=False)
    robot: RobotShape = None

    @property
    def n(self):
        return sum(len(o.vertices) for o in self.obstacles)

    @property
    def k(self):
        return len(self.obstacles)

    def obstacle(self, oid):
        for o in self.obstacles:
            if o.id == oid:
                return o
        raise KeyError(oid)


def make_scene(obstacles, metadata=None, robot=None) -> Scene:
    obs = tuple(sorted(obstacles, key=lambda o: o.id))
    if len({o.id for o in obs}) != len(obs):
        raise InvariantViolation("duplicate obstacle ids")
    return Scene(obs, dict(metadata or {}), robot)


# ---------------------------------------------------------------- files

def _ser_pts(points):
    return [[fmt_rat(c) for c in p] for p in points]


def scene_to_dict(scene: Scene) -> dict:
    robot = None
    if scene.robot is not None:
        robot = {"kind": scene.robot.tag, "vertices": _ser_pts(scene.robot.vertices)}
    return {
        "version": SCENE_VERSION,
        "robot": robot,
        "obstacles": [{"id": o.id, "kind": o.kind, "points": _ser_pts(o.points)}
                      for o in scene.obstacles],
        "metadata": {"seed": scene.metadata.get("seed"),
                     "generator": scene.metadata.get("generator")},
    }


def dumps_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=1, sort_keys=True) + "\n"


def save_scene(scene: Scene, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_scene(scene))


def _check_keys(obj, allowed, locus):
    if not isinstance(obj, dict):
        raise ParseError(locus, "expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise ParseError(locus, f"unknown fields {sorted(extra)}")


def _parse_pts(raw, locus):
    if not isinstance(raw, list):
        raise ParseError(locus, "expected a list of points")
    out = []
    for i, p in enumerate(raw):
        if not isinstance(p, list) or len(p) != 3:
            raise ParseError(f"{locus}[{i}]", "a point is a list of three rationals")
        coords = []
        for j, c in enumerate(p):
            if not isinstance(c, str):
                raise ParseError(f"{locus}[{i}][{j}]", "rationals must be strings like \"p/q\"")
            try:
                coords.append(rat(c))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"{locus}[{i}][{j}]", str(exc)) from None
        out.append(tuple(coords))
    return out


def scene_from_dict(data: dict, validate=True) -> Scene:
    _check_keys(data, ("version", "robot", "obstacles", "metadata"), "$")
    if data.get("version") != SCENE_VERSION:
        raise ParseError("$.version", f"unsupported version {data.get('version')!r}")
    robot = None
    if data.get("robot") is not None:
        r = data["robot"]
        _check_keys(r, ("kind", "vertices"), "$.robot")
        verts = _parse_pts(r.get("vertices"), "$.robot.vertices")
        try:
            robot = make_robot(r.get("kind"), verts)
        except SceneError as exc:
            raise ParseError("$.robot", str(exc)) from None
    obstacles = []
    raw = data.get("obstacles", [])
    if not isinstance(raw, list):
        raise ParseError("$.obstacles", "expected a list")
    for i, o in enumerate(raw):
        loc = f"$.obstacles[{i}]"
        _check_keys(o, ("id", "kind", "points"), loc)
        if not isinstance(o.get("id"), int):
            raise ParseError(loc + ".id", "integer id required")
        pts = _parse_pts(o.get("points"), loc + ".points")
        try:
            obstacles.append(make_obstacle(o["id"], o.get("kind"), pts))
        except SceneError as exc:
            raise ParseError(loc, str(exc)) from None
    meta = data.get("metadata") or {}
    _check_keys(meta, ("seed", "generator"), "$.metadata")
    scene = make_scene(obstacles, meta, robot)
    if validate:
        bad = validate_scene(scene)
        if bad:
            raise InvariantViolation(f"obstacles intersect: {bad}")
    return scene


def loads_scene(text: str, validate=True) -> Scene:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}", exc.msg) from None
    return scene_from_dict(data, validate)


def load_scene(path, validate=True) -> Scene:
    with open(path) as fh:
        return loads_scene(fh.read(), validate)


# ---------------------------------------------------------------- validation

def _bbox_overlap(a, b):
    (alo, ahi), (blo, bhi) = a, b
    return all(alo[i] <= bhi[i] and blo[i] <= ahi[i] for i in range(3))


def bodies_intersect(a: ConvexBody, b: ConvexBody) -> bool:
    """Closed convex sets intersect iff the origin lies in a - b."""
    if not _bbox_overlap(a.bbox(), b.bbox()) or separated(a, b):
        return False
    diff = minkowski_sum_convex(a, negate_body(b))
    return locate_point(diff, (Fraction(0),) * 3).kind != "outside"


def validate_scene(scene: Scene) -> list:
    """Pairs of obstacle ids whose closed point sets intersect."""
    return [(a.id, b.id) for a, b in combinations(scene.obstacles, 2)
            if bodies_intersect(a.body, b.body)]


# ---------------------------------------------------------------- general position

class GPViolation(NamedTuple):
    code: str
    ids: tuple
    detail: str


GP_CODES = {
    "V1": "obstacle edge parallel to a robot face plane",
    "V2": "obstacle face parallel to a robot edge",
    "V3": "obstacle face parallel to the flat robot's plane",
    "V4": "two obstacle face planes meet in a line parallel to a robot vertex-triple plane",
    "V5": "no slicing frame avoids degenerate subtriangles (equal heights or y-parallel slices)",
    "V6": "coincident contact planes (coplanar surfaces, dependent triples, 4 concurrent planes)",
    "V7": "free triple-contact point on a contact-surface boundary (accidental coincidence)",
}


def _ints(v):
    """Direction of a rational vector as coprime Python ints (fast exact tests)."""
    return tuple(int(x) for x in primitive(tuple(Fraction(c) for c in v)))


def _obstacle_edges(scene):
    for o in scene.obstacles:
        for e, (i, j) in enumerate(o.edges):
            yield o, e, _ints(sub(o.vertices[j], o.vertices[i]))


def _obstacle_faces(scene):
    for o in scene.obstacles:
        for f, cyc in enumerate(o.faces):
            a, b, c = (o.vertices[i] for i in cyc[:3])
            yield o, f, _ints(cross(sub(b, a), sub(c, a)))


def robot_triple_normals(robot):
    """Distinct plane normals spanned by triples of robot vertices."""
    if "triple_normals" not in robot.memo:
        from .geometry import canonical_line_normal
        out = set()
        for a, b, c in combinations(robot.vertices, 3):
            n = cross(sub(b, a), sub(c, a))
            if not is_zero(n):
                out.add(canonical_line_normal(n))
        robot.memo["triple_normals"] = sorted(out)
    return robot.memo["triple_normals"]


def check_general_position(robot: RobotShape, scene: Scene, mode: str = "pairwise",
                           focus=None) -> list:
    """GP violations, sorted.  With ``focus`` (a set of obstacle ids) only
    violations involving at least one of those obstacles are reported."""
    out = []
    face_normals = [_ints(n) for n in robot.face_normals]
    redges = [_ints(robot.edge_vector(e)) for e in range(len(robot.edges))]
    mine = (lambda o: True) if focus is None else (lambda o: o.id in focus)
    for o, e, d in _obstacle_edges(scene):
        if not mine(o):
            continue
        for fi, n in enumerate(face_normals):
            if dot(d, n) == 0:
                out.append(GPViolation("V1", (o.id, e, fi), "obstacle edge parallel to robot face"))
    faces = list(_obstacle_faces(scene))
    for o, f, n in faces:
        if not mine(o):
            continue
        for ei, d in enumerate(redges):
            if dot(d, n) == 0:
                out.append(GPViolation("V2", (o.id, f, ei), "obstacle face parallel to robot edge"))
        if robot.is_flat and parallel(n, face_normals[0]):
            out.append(GPViolation("V3", (o.id, f), "obstacle face parallel to robot plane"))
    tri_normals = [_ints(n) for n in robot_triple_normals(robot)]
    for (o1, f1, n1), (o2, f2, n2) in combinations(faces, 2):
        if not (mine(o1) or mine(o2)):
            continue
        line = cross(n1, n2)
        if is_zero(line):
            continue
        for tn in tri_normals:
            if dot(line, tn) == 0:
                out.append(GPViolation("V4", (o1.id, f1, o2.id, f2),
                                       "face planes meet in a line parallel to a robot plane"))
                break
    from .planes import frame_violations
    out.extend(frame_violations(robot, scene, focus))
    if mode == "full":
        from .contacts import full_gp_violations
        out.extend(full_gp_violations(robot, scene))
    out.sort(key=lambda v: (v.code, v.ids))
    return out


# ---------------------------------------------------------------- perturbation

PERTURB_GRID = 1000


def perturb_scene(scene: Scene, seed: int, magnitude) -> Scene:
    """Jitter every defining point by a deterministic rational vector."""
    magnitude = rat(magnitude)
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    if magnitude == 0:
        return scene
    rng = random.Random(f"perturb:{seed}:{len(scene.obstacles)}")
    obstacles = []
    for o in scene.obstacles:
        pts = []
        for p in o.points:
            delta = [Fraction(rng.randint(-PERTURB_GRID, PERTURB_GRID), PERTURB_GRID) * magnitude
                     for _ in range(3)]
            pts.append(tuple(c + d for c, d in zip(p, delta)))
        obstacles.append(make_obstacle(o.id, o.kind, pts))
    out = make_scene(obstacles, scene.metadata, scene.robot)
    if validate_scene(out):
        raise PerturbationBrokeDisjointness("perturbation made obstacles touch; shrink magnitude")
    return out
