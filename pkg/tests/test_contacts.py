from collections import Counter

import pytest

from freespace.constructions import GenConfig, random_scene
from freespace.contacts import (
    ContactSpec, NoLine, Unclassifiable, brute_force_triples, classify_triple, contact_model,
    contact_surface, enumerate_specs, is_free, parse_spec_label, solve_triple,
    third_contacts_on_line, verify_in_workspace,
)
from freespace.geometry import pt
from freespace.scene import make_obstacle, make_robot, make_scene


def test_spec_label_round_trip():
    s = ContactSpec(1, 2, 7, 1, 0)
    assert parse_spec_label(s.label) == s
    assert s.kind == "edge" and s.degree == "generic"


def test_enumerate_specs_is_generic_only():
    scene = random_scene(3, 1)
    robot = make_robot("square")
    specs = enumerate_specs(robot, scene)
    assert all(s.rdim + s.odim == 2 for s in specs)
    assert specs == sorted(specs, key=lambda s: s.key)


def test_vertex_contact_surface_is_translated_face():
    robot = make_robot("square")
    tri = make_obstacle(0, "triangle", [(0, 5, 0), (2, 6, 1), (1, 7, 3)])
    surf = contact_surface(robot, make_scene([tri]), ContactSpec(0, 2, 0, 2, 0))
    corner = robot.vertices[2]
    moved = sorted(tuple(a - b for a, b in zip(p, corner)) for p in tri.vertices)
    assert sorted(surf.polygon) == moved


def test_freeness_against_a_box():
    robot = make_robot("cube")
    box = make_obstacle(0, "solid", [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)])
    scene = make_scene([box])
    assert is_free(robot, scene, pt(5, 0, 0))
    assert not is_free(robot, scene, pt("-1/2", 0, "-1/2"))
    assert not is_free(robot, scene, pt(0, 0, 0))
    assert is_free(robot, scene, pt(1, 0, 0))      # face to face contact is legal


def test_flat_robot_never_blocked_by_a_point():
    robot = make_robot("square")
    scene = make_scene([make_obstacle(0, "point", [("1/2", 0, "1/2")])])
    assert is_free(robot, scene, pt(0, 0, 0))


@pytest.mark.parametrize("robot_tag", ["square", "triangle", "hexagon"])
def test_brute_force_triples_are_real_contacts(robot_tag):
    robot = make_robot(robot_tag)
    scene = random_scene(5, 4, GenConfig(plant_robot=robot_tag))
    found = brute_force_triples(robot, scene)
    assert found
    for t in found:
        assert verify_in_workspace(robot, scene, t)
        assert is_free(robot, scene, t.v)
        assert solve_triple(robot, scene, *t.specs) == t.v
        assert t.tag == classify_triple(robot, t.specs)


def test_brute_force_thread_count_does_not_matter():
    robot = make_robot("square")
    scene = random_scene(6, 9, GenConfig(plant_robot="square"))
    assert brute_force_triples(robot, scene) == brute_force_triples(robot, scene, threads=3)


def test_classifier_tags():
    sq, cube = make_robot("square"), make_robot("cube")
    v = lambda i: ContactSpec(0, i, 0, 2, 0)
    e = lambda i: ContactSpec(1, i, 0, 1, 0)
    f = lambda i: ContactSpec(2, i, 0, 0, 0)
    assert classify_triple(sq, (v(0), v(1), v(2))) == "VVV"
    assert classify_triple(sq, (e(0), e(2), v(1))) == "PAR_EDGE"
    assert classify_triple(sq, (e(0), e(1), v(1))) == "EDGE_PP"
    assert classify_triple(sq, (f(0), v(1), v(2))) == "FACE"
    assert classify_triple(cube, (f(0), f(1), v(0))) == "LINE_PAIR"
    tags = Counter()
    for a in range(12):
        for b in range(a + 1, 12):
            for c in range(b + 1, 12):
                tags[classify_triple(cube, (e(a), e(b), e(c)))] += 1
    assert set(tags) == {"PAR_EDGE", "EEE_NONPAR"}


def test_face_triple_without_transverse_edge_is_unclassifiable():
    cube = make_robot("cube")
    f0 = ContactSpec(2, 0, 0, 0, 0)
    inside = [e for e in range(12) if set(cube.edges[e]) <= set(cube.faces[0])]
    others = [e for e in range(12) if not set(cube.edges[e]) & set(cube.faces[0])]
    # two edges not parallel to face 0 and no vertex contact leaves no class
    specs = (f0, ContactSpec(1, others[0], 0, 1, 0), ContactSpec(1, others[1], 0, 1, 1))
    try:
        tag = classify_triple(cube, specs)
    except Unclassifiable:
        tag = None
    assert tag in (None, "PAR_EDGE", "LINE_PAIR")
    assert inside


def test_third_contacts_match_brute_force():
    robot = make_robot("square")
    scene = random_scene(6, 2, GenConfig(plant_robot="square"))
    model = contact_model(robot, scene)
    for t in brute_force_triples(robot, scene):
        a, b, c = t.specs
        try:
            hits = third_contacts_on_line(robot, scene, a, b, model)
        except NoLine:
            continue
        assert (c, t.v) in hits
        for s3, v in hits:
            assert is_free(robot, scene, v)
