import math

import numpy as np
import pytest
from conftest import make_level
from scenegen import angle_error, match_report, random_scene

from simsim import geometry, perception, render
from simsim.geometry import CircleShape, OrientedRect
from simsim.perception import PerceptionError, SceneTemplate
from simsim.physics import Kind


def perceive_level(body):
    return perception.perceive(render.rasterize(make_level("bird red\n" + body)))


def test_aligned_block():
    rec = perceive_level("pig 700 60 10\nblock wood rect 400 200 40 20 0\n")
    (block,) = [o for o in rec.objects if o.kind == "block"]
    r = block.shape
    assert isinstance(r, OrientedRect)
    assert math.dist(r.center, (400, 200)) <= 0.5
    assert abs(2 * r.half_w - 40) <= 1 and abs(2 * r.half_h - 20) <= 1


def test_rotated_block():
    rec = perceive_level("pig 700 60 10\nblock stone rect 400 200 40 20 30\n")
    (block,) = [o for o in rec.objects if o.kind == "block"]
    assert math.degrees(angle_error(block.shape.angle, math.radians(30), math.pi / 2)) <= 3


def test_pig_circle():
    rec = perceive_level("pig 400 200 12\n")
    (pig,) = rec.objects
    assert isinstance(pig.shape, CircleShape)
    assert abs(pig.shape.radius - 12) <= 1
    assert pig.kind == "pig"


def test_slingshot_ground_and_queue():
    s = make_level("bird yellow\nbird red\nbird black\npig 400 60 10\n")
    rec = perception.perceive(render.rasterize(s))
    assert rec.slingshot == pytest.approx((100, 60))
    assert rec.ground_y == 40
    assert [b.value for b in rec.bird_queue] == ["yellow", "red", "black"]


def test_no_slingshot_raises():
    g = render.PixelGrid.blank(20, 10)
    with pytest.raises(PerceptionError):
        perception.perceive(g)


def test_tiny_blobs_dropped():
    s = make_level("bird red\npig 400 60 10\nblock ice rect 600 200 2 2 0\n")
    rec = perception.perceive(render.rasterize(s))
    assert all(o.material != "ice" for o in rec.objects)
    assert rec.notes


def test_to_scene_all_inactive_and_counts(bundled_levels):
    level = bundled_levels[0]
    rec = perception.perceive(render.rasterize(level))
    scene = perception.to_scene(rec)
    assert len(scene.bodies) == len(level.bodies)
    assert all(not b.active for b in scene.bodies)
    assert scene.bird_queue == level.bird_queue


def test_to_scene_uses_template_not_truth():
    s = make_level("bird red\npig 400 60 10\nscore pig 1\n")
    template = SceneTemplate(gravity=(0.0, -50.0), launch_speed=120.0)
    scene = perception.to_scene(perception.perceive(render.rasterize(s)), template)
    assert scene.gravity == (0.0, -50.0) and scene.launch_speed == 120.0
    assert scene.scoring.pig_points == 5000


def test_to_scene_pure():
    rec = perceive_level("pig 400 60 10\nblock wood rect 300 60 10 40 0\n")
    a, b = perception.to_scene(rec), perception.to_scene(rec)
    assert [x.state_tuple() for x in a.bodies] == [x.state_tuple() for x in b.bodies]


def test_round_trip_small_sample():
    for seed in range(5):
        scene, placed = random_scene(seed)
        rec = perception.perceive(render.rasterize(scene))
        for truth, obj, d in match_report(placed, rec):
            assert obj is not None and d <= 1.5
            assert type(obj.shape) is type(truth)


def test_locality_of_detection_errors():
    scene, placed = random_scene(42)
    grid = render.rasterize(scene)
    full = perception.perceive(grid)
    # erase the first block and see what else changes
    victim = next(b for b in scene.bodies if b.kind is Kind.BLOCK)
    cut = scene.clone()
    cut.body(victim.id).alive = False
    partial = perception.perceive(render.rasterize(cut))
    assert len(partial.objects) == len(full.objects) - 1
    remaining = list(partial.objects)
    for obj in full.objects:
        match = [o for o in remaining if math.dist(o.shape.center, obj.shape.center) < 1e-9]
        if not match:
            continue
        other = match[0]
        if isinstance(obj.shape, CircleShape) or obj.material != victim.material.name:
            assert other.shape == obj.shape
        else:
            for a, b in ((other.shape.half_w, obj.shape.half_w), (other.shape.half_h, obj.shape.half_h)):
                assert abs(a - b) <= perception.EQUALIZE_TOL * b


def test_corner_reach_separates_disc_from_square():
    data = np.zeros((60, 60), dtype=np.uint8)
    render.paint_circle(data, 60, 30, 30, 7, 2)
    ps = geometry.flood_fill_components(render.PixelGrid(60, 60, data), 2)[0]
    hull = geometry.convex_hull(perception.outline_points(ps, 60))
    centers = np.array([(c + 0.5, 60 - r - 0.5) for c, r in ps.pixels])
    assert perception.corner_reach(centers, geometry.min_area_rect(hull)) < perception.CORNER_REACH_LIMIT
    data[:] = 0
    render.paint_rect(data, 60, 30, 30, 7, 7, 0.4, 2)
    ps = geometry.flood_fill_components(render.PixelGrid(60, 60, data), 2)[0]
    hull = geometry.convex_hull(perception.outline_points(ps, 60))
    centers = np.array([(c + 0.5, 60 - r - 0.5) for c, r in ps.pixels])
    assert perception.corner_reach(centers, geometry.min_area_rect(hull)) > perception.CORNER_REACH_LIMIT
