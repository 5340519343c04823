from fractions import Fraction

import pytest

from freespace.constructions import GenConfig, random_scene
from freespace.contacts import ContactSpec, brute_force_triples, contact_model, is_free
from freespace.envelopes import family_crossings
from freespace.geometry import add, scale, solve3, sub
from freespace.planes import (
    IncompatiblePair, chart_families, chart_valid, charts, cover, explain, plane_families,
    pp_segment_generic, slice_at, UndefinedCover, structured_triples, vertex_systems, vvv_candidates,
)
from freespace.scene import make_robot


def corpus(robot_tag, seeds):
    cfg = GenConfig(plant_robot=robot_tag)
    return [random_scene(4 + s % 11, s, cfg) for s in seeds]


def frame_to_world(frame, p):
    return solve3((frame.u1, frame.u2, frame.n), p)


def test_families_never_cross():
    robot = make_robot("triangle")
    for scene in corpus("triangle", range(3)):
        for name, segs in plane_families(robot, scene):
            assert not family_crossings([ps.seg for ps in segs]), name


def test_cover_trichotomy_on_double_contacts():
    robot = make_robot("triangle")
    checked = 0
    for scene in corpus("triangle", range(4)):
        for system, triples in vertex_systems(robot, scene):
            for f1 in system.subs:
                for p1, p2 in ((0, 1), (1, 2), (2, 0), (1, 0)):
                    for fam in system.families(p1, f1, p2):
                        for ps in fam.segs:
                            (z0, s0), (z1, s1) = ps.seg
                            z, s = (z0 + z1) / 2, (s0 + s1) / 2
                            a, b = slice_at(f1, z)
                            w = sub(b, a)
                            lam = (z - f1.apex[2]) / (f1.side_z - f1.apex[2])
                            point = add(a, scale(w, s / lam)) + (z,)
                            v = sub(frame_to_world(system.frame, point), robot.vertices[p1])
                            f2 = system.subs[ps.sub]
                            assert cover(robot, (p1, f1), (p2, f2), z, system.frame) == ps.side
                            if is_free(robot, scene, v):
                                # the reverse test is undefined when the lines meet inside f2(z)
                                try:
                                    other = cover(robot, (p2, f2), (p1, f1), z, system.frame)
                                except UndefinedCover:
                                    other = None
                                assert other is None
                                checked += 1
    assert checked > 0


@pytest.mark.parametrize("robot_tag", ["square", "cube"])
def test_illegal_side_is_really_illegal(robot_tag):
    robot = make_robot(robot_tag)
    sampled = 0
    for scene in corpus(robot_tag, range(2)):
        model = contact_model(robot, scene)
        for o1 in model.specs:
            if o1 not in model.adjacency or o1.rdim == 0 or (o1.rdim == 1 and o1.odim != 1):
                continue
            for chart in charts(robot, scene, o1):
                if not chart_valid(robot, chart):
                    continue
                (lo, hi), = chart.strips
                for feat, segs in chart_families(robot, chart, model).items():
                    for ps in segs:
                        if ps.side is None:
                            continue
                        (x0, y0), (x1, y1) = ps.seg
                        x, y = (x0 + x1) / 2, (y0 + y1) / 2
                        y2 = (y + hi) / 2 if ps.side == "above" else (y + lo) / 2
                        if y2 == y:
                            continue
                        v = add(add(chart.p0, scale(chart.h, x)), scale(chart.v, y2))
                        assert not is_free(robot, scene, v)
                        sampled += 1
    assert sampled > 0


def test_vvv_candidates_contain_brute_force():
    robot = make_robot("triangle")
    cfg = GenConfig(plant_robot="triangle", vertex_bias=Fraction(9, 10))
    for seed in range(3):
        scene = random_scene(5 + seed, seed, cfg)
        cands = vvv_candidates(robot, scene)
        for t in brute_force_triples(robot, scene, classes={"VVV"}):
            assert t.specs in cands


def test_structured_is_thread_independent():
    robot = make_robot("square")
    scene = corpus("square", [5])[0]
    assert structured_triples(robot, scene) == structured_triples(robot, scene, threads=4)


def test_pp_segment_rejects_parallel_edge():
    robot = make_robot("square")
    scene = corpus("square", [1])[0]
    seg = next(o for o in scene.obstacles if o.kind != "point" and o.edges)
    o1 = ContactSpec(1, 0, seg.id, 1, 0)
    o2 = ContactSpec(1, 2, seg.id, 1, 0)
    with pytest.raises(IncompatiblePair):
        pp_segment_generic(robot, scene, o1, o2)


def test_explain_mentions_the_plane():
    robot = make_robot("square")
    scene = corpus("square", [2])[0]
    model = contact_model(robot, scene)
    spec = next(s for s in model.specs if s.rdim == 0 and s in model.adjacency)
    text = explain(robot, scene, spec)
    assert text.startswith(f"plane {spec.label}")
    assert "candidates" in text
