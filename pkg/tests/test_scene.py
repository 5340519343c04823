import json
from fractions import Fraction

import pytest

from freespace.constructions import GenConfig, random_scene
from freespace.scene import (
    DegenerateInput, InvariantViolation, NonConvex, NotFullyParallel, ParseError, check_general_position,
    dumps_scene, loads_scene, make_obstacle, make_robot, make_scene, perturb_scene, validate_scene,
)


def test_builtin_robots():
    sq = make_robot("square")
    assert sq.is_square and sq.is_flat and len(sq.edges) == 4
    assert make_robot("triangle").is_triangle
    hexa = make_robot("hexagon")
    assert hexa.is_fully_parallel
    assert all(hexa.pair_lengths(e) == (1, 3) for e in range(6))
    cube = make_robot("cube")
    assert (len(cube.vertices), len(cube.edges), len(cube.faces)) == (8, 12, 6)


def test_robot_rejections():
    with pytest.raises(NonConvex):
        make_robot("polygon", [(0, 0, 0), (2, 0, 0), (1, 0, 1), (1, 0, 3), (0, 0, 2)])
    with pytest.raises(DegenerateInput):
        make_robot("polygon", [(0, 0, 0), (1, 0, 0), (2, 0, 0)])
    with pytest.raises(NotFullyParallel):
        make_robot("fully_parallel", [(0, 0, 0), (1, 0, 0), (0, 0, 1)])
    with pytest.raises(DegenerateInput):
        make_robot("octopus")


def test_obstacle_kinds_must_match_dimension():
    assert make_obstacle(0, "segment", [(0, 0, 0), (1, 2, 3)]).count(1) == 1
    tet = make_obstacle(1, "solid", [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert (tet.count(0), tet.count(1), tet.count(2)) == (4, 6, 4)
    with pytest.raises(DegenerateInput):
        make_obstacle(2, "triangle", [(0, 0, 0), (1, 1, 1), (2, 2, 2)])


def test_json_round_trip_is_stable():
    s = random_scene(5, 3)
    text = dumps_scene(s)
    again = loads_scene(text)
    assert again.obstacles == s.obstacles
    assert dumps_scene(again) == text


def test_parse_errors_carry_locus():
    bad = {"version": 1, "robot": None, "metadata": {},
           "obstacles": [{"id": 0, "kind": "point", "points": [["1/2", "0.5", "0"]]}]}
    with pytest.raises(ParseError) as info:
        loads_scene(json.dumps(bad))
    assert "$.obstacles[0].points[0][1]" in str(info.value)
    with pytest.raises(ParseError):
        loads_scene("{not json")


def test_intersecting_obstacles_rejected():
    a = make_obstacle(0, "segment", [(0, 0, 0), (2, 0, 0)])
    b = make_obstacle(1, "segment", [(1, -1, 0), (1, 1, 0)])
    c = make_obstacle(2, "point", [(5, 5, 5)])
    scene = make_scene([a, b, c])
    assert validate_scene(scene) == [(0, 1)]
    with pytest.raises(InvariantViolation):
        loads_scene(dumps_scene(scene))


def test_gp_detects_face_parallel_to_robot():
    robot = make_robot("square")
    seg = make_obstacle(0, "segment", [(0, 0, 0), (1, 2, 3)])
    flat = make_obstacle(1, "triangle", [(5, 0, 0), (6, 0, 0), (5, 0, 1)])  # parallel to the robot
    codes = {v.code for v in check_general_position(robot, make_scene([seg, flat]))}
    assert "V3" in codes


def test_random_scene_is_generic_and_deterministic():
    cfg = GenConfig(plant_robot="square")
    a, b = random_scene(6, 11, cfg), random_scene(6, 11, cfg)
    assert dumps_scene(a) == dumps_scene(b)
    assert not validate_scene(a)
    assert not check_general_position(make_robot("square"), a)


def test_perturb_keeps_kinds():
    s = random_scene(4, 2)
    p = perturb_scene(s, 7, Fraction(1, 10**6))
    assert [o.kind for o in p.obstacles] == [o.kind for o in s.obstacles]
    assert perturb_scene(s, 7, 0) is s
