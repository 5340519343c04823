import pytest

from freespace.constructions import (
    GenConfig, GenerationFailed, fig1_crossings, fig1_pairings, fig1_scene, quadratic_predicted,
    quadratic_scene, random_scene, random_segments,
)
from freespace.contacts import brute_force_triples
from freespace.envelopes import family_crossings
from freespace.scene import dumps_scene, make_robot, validate_scene


def test_random_scene_size_and_determinism():
    s = random_scene(7, 3)
    assert s.k == 7
    assert dumps_scene(s) == dumps_scene(random_scene(7, 3))
    assert dumps_scene(s) != dumps_scene(random_scene(7, 4))
    assert random_scene(0, 1).k == 0


def test_planted_triples_exist():
    robot = make_robot("square")
    scene = random_scene(8, 0, GenConfig(plant_robot="square", plants=2))
    assert len(brute_force_triples(robot, scene)) >= 2


def test_generation_gives_up_cleanly():
    cfg = GenConfig(spread=0, length=1, retries=1)
    with pytest.raises(GenerationFailed):
        random_scene(30, 0, cfg)


def test_quadratic_scene_small():
    robot = make_robot("square")
    scene = quadratic_scene(2)
    assert not validate_scene(scene)
    found = {t.v for t in brute_force_triples(robot, scene)}
    assert len(found) >= 4
    assert set(quadratic_predicted(2)) <= found


def test_fig1_small():
    m = 3
    scene = fig1_scene(m)
    assert not validate_scene(scene)
    triples = brute_force_triples(make_robot("triangle"), scene)
    assert fig1_crossings(m) == m - 1
    assert len(fig1_pairings(triples, m)) == 2 * fig1_crossings(m) * m


def test_random_segment_modes():
    crossing = random_segments(10, 1)
    assert len(crossing) == 10
    assert not family_crossings(random_segments(10, 1, noncrossing=True))
    with pytest.raises(GenerationFailed):
        random_segments(200, 0, noncrossing=True, span=4)
