import math
import random

import pytest

from simsim import physics
from simsim.geometry import CircleShape, OrientedRect, Point2
from simsim.physics import MATERIALS, Body, Kind, Material, PhysicsConfig, Space, ground_body

ELASTIC = Material("elastic", 0.001, 1.0, 0.0, math.inf, 0, math.inf)


def space_with(*bodies, gravity=(0.0, -100.0), ground=-1e4, **cfg):
    return Space(bodies=[ground_body(0, ground), *bodies], gravity=gravity, physics=PhysicsConfig(**cfg))


def disc(id, x, y, r=5.0, material=MATERIALS["wood"], active=True, kind=Kind.BLOCK):
    return Body(id, kind, material, CircleShape(Point2(x, y), r), active=active)


def box(id, x, y, w, h, angle=0.0, material=MATERIALS["wood"], active=False):
    return Body(id, Kind.BLOCK, material, OrientedRect(Point2(x, y), w / 2, h / 2, angle), active=active)


def test_free_fall_closed_form():
    b = disc(1, 0.0, 0.0)
    s = space_with(b)
    n, dt, g = 100, 0.01, 100.0
    for _ in range(n):
        physics.step(s, dt)
    assert b.y == pytest.approx(-g * dt * dt * n * (n + 1) / 2, abs=1e-9)
    assert b.y == pytest.approx(-50.5, abs=1e-9)


def test_held_block_never_moves():
    b = box(1, 50, 300, 20, 10)
    s = space_with(b, ground=0.0)
    before = b.state_tuple()
    for _ in range(900):
        physics.step(s)
    assert b.state_tuple() == before
    assert not b.active


def test_elastic_head_on_exchange():
    a = disc(1, 0.0, 0.0, material=ELASTIC)
    b = disc(2, 10.5, 0.0, material=ELASTIC)
    a.vx, b.vx = 30.0, -10.0
    s = space_with(a, b, gravity=(0.0, 0.0), bounce_threshold=0.0)
    for _ in range(60):
        physics.step(s)
        if a.vx < 0:
            break
    assert a.vx == pytest.approx(-10.0, abs=1e-9)
    assert b.vx == pytest.approx(30.0, abs=1e-9)
    assert a.vy == pytest.approx(0.0, abs=1e-9) and b.vy == pytest.approx(0.0, abs=1e-9)


def test_frictionless_momentum_conserved():
    a = disc(1, 0.0, 0.0, r=6, material=ELASTIC)
    b = disc(2, 15.0, 3.0, r=4, material=ELASTIC)
    a.vx, b.vx = 40.0, -20.0
    s = space_with(a, b, gravity=(0.0, 0.0))
    p0 = (a.mass * a.vx + b.mass * b.vx, a.mass * a.vy + b.mass * b.vy)
    for _ in range(60):
        physics.step(s)
    p1 = (a.mass * a.vx + b.mass * b.vx, a.mass * a.vy + b.mass * b.vy)
    scale = abs(a.mass * 40.0) + abs(b.mass * 20.0)
    assert abs(p1[0] - p0[0]) <= 1e-9 * scale and abs(p1[1] - p0[1]) <= 1e-9 * scale


def collision_scene(seed):
    """Two bodies on a collision course in zero gravity."""
    rng = random.Random(seed)
    mats = [MATERIALS[m] for m in ("ice", "wood", "stone")]

    def make(id, x, y):
        if rng.random() < 0.5:
            return disc(id, x, y, rng.uniform(4, 10), rng.choice(mats))
        return box(id, x, y, rng.uniform(8, 30), rng.uniform(6, 20), rng.uniform(-1, 1),
                   rng.choice(mats), active=True)

    a, b = make(1, 0.0, rng.uniform(-5, 5)), make(2, 50.0, rng.uniform(-5, 5))
    a.vx, a.vy, a.w = rng.uniform(20, 80), rng.uniform(-10, 10), rng.uniform(-1, 1)
    b.vx, b.vy = rng.uniform(-80, -20), rng.uniform(-10, 10)
    # indestructible so the pair keeps interacting
    for body in (a, b):
        body.material = Material(body.material.name, body.material.density, body.material.restitution,
                                 body.material.friction, math.inf, 0, math.inf)
    return space_with(a, b, gravity=(0.0, 0.0))


@pytest.mark.parametrize("seed", range(20))
def test_energy_non_increasing(seed):
    s = collision_scene(seed)
    e0 = physics.mechanical_energy(s)
    prev = e0
    for _ in range(120):
        physics.step(s)
        e = physics.mechanical_energy(s)
        assert e <= prev + 1e-6 * e0
        prev = e


def test_dropped_disc_never_gains_energy():
    b = disc(1, 50.0, 80.0, r=6)
    s = space_with(b, ground=0.0)
    e0 = physics.mechanical_energy(s)
    for _ in range(300):
        physics.step(s)
        # positional projection on landing can lift a resting body by a hair
        # between consecutive steps, but never above the starting energy
        assert physics.mechanical_energy(s) <= e0 * (1 + 1e-6)


def test_activation_spreads_on_contact():
    block = box(1, 100.0, 20.0, 20, 20)
    ball = disc(2, 60.0, 20.0, r=5)
    ball.vx = 100.0
    s = space_with(block, ball, gravity=(0.0, 0.0), ground=-100.0)
    activated = []
    for _ in range(60):
        activated += physics.step(s).activated
    assert activated == [1]
    assert block.active and block.vx > 0


def test_activation_is_monotone():
    level = [box(1, 100, 10, 40, 20), box(2, 100, 30, 20, 20, material=MATERIALS["ice"])]
    ball = disc(3, 40, 25, r=5)
    ball.vx = 150.0
    s = space_with(*level, ball, ground=0.0)
    seen = set()
    for _ in range(300):
        physics.step(s)
        now = {b.id for b in s.bodies if b.active}
        assert seen <= now
        seen = now


def test_no_tunneling_through_thin_wall():
    wall = box(1, 200.0, 50.0, 6, 100)
    ball = disc(2, 100.0, 50.0, r=5, material=MATERIALS["bird"], kind=Kind.BIRD)
    ball.vx = 170.0
    s = space_with(wall, ball, gravity=(0.0, 0.0), ground=0.0)
    touched = False
    for _ in range(120):
        ev = physics.step(s)
        touched |= any(1 in pair[:2] for pair in ev.collisions) or wall.active
    assert touched


def test_damage_destroys_struck_block():
    block = box(1, 100.0, 20.0, 20, 40, material=MATERIALS["wood"])
    bullet = disc(2, 60.0, 20.0, r=7, material=MATERIALS["bird"], kind=Kind.BIRD)
    bullet.vx = 170.0
    s = space_with(block, bullet, gravity=(0.0, 0.0), ground=-100.0)
    destroyed = []
    for _ in range(60):
        destroyed += physics.step(s).destroyed
    assert destroyed == [1]
    assert not block.alive and block.damage == block.material.health


def test_determinism_bit_identical():
    def run():
        s = collision_scene(5)
        for _ in range(100):
            physics.step(s)
        return physics.state_digest(s), [b.state_tuple() for b in s.bodies]

    assert run() == run()


def test_settled_flags():
    s = space_with(box(1, 0, 10, 10, 10))
    assert physics.is_settled(s)
    falling = disc(2, 0, 500)
    s = space_with(falling)
    physics.step(s)
    assert not physics.is_settled(s)


def test_collapsed_stack_settles_within_horizon():
    bodies = [box(1, 100, 50, 10, 100, material=MATERIALS["wood"], active=True),
              box(2, 130, 105, 80, 10, material=MATERIALS["stone"])]
    s = space_with(*bodies, ground=0.0)
    bodies[0].w = 0.5
    for i in range(900):
        physics.step(s)
        if physics.is_settled(s):
            break
    assert physics.is_settled(s) and i < 900


def test_two_grounds_rejected():
    s = Space(bodies=[ground_body(0, 0.0), ground_body(1, 10.0)])
    with pytest.raises(physics.ContractViolation):
        physics.step(s)


def test_nonpositive_dt_rejected():
    with pytest.raises(ValueError):
        physics.step(space_with(), 0.0)


# -- radial impulse ------------------------------------------------------------

def test_radial_falloff_ratio():
    r = 40.0
    bodies = [disc(i + 1, 100 + d, 100, active=False) for i, d in enumerate((r / 4, r / 2, 3 * r / 4))]
    s = space_with(*bodies, ground=0.0)
    ev = physics.apply_radial_impulse(s, (100, 100), r, 300.0)
    mags = [j for _, _, j in ev.collisions]
    assert mags == pytest.approx([225.0, 150.0, 75.0])
    assert mags[0] / mags[2] == pytest.approx(3.0) and mags[1] / mags[2] == pytest.approx(2.0)
    assert sorted(ev.activated) == [1, 2, 3]
    for b in bodies:
        assert b.vx > 0 and b.vy == 0


def test_radial_boundary_gets_nothing():
    b = disc(1, 140.0, 100.0, active=False)
    s = space_with(b, ground=0.0)
    ev = physics.apply_radial_impulse(s, (100, 100), 40.0, 300.0)
    assert not ev.collisions and not b.active and b.vx == 0


def test_radial_center_pushes_up():
    b = disc(1, 100.0, 100.0, material=Material("tough", 0.001, 0.2, 0.5, 1e9, 0, 1e9), active=False)
    s = space_with(b, ground=0.0)
    physics.apply_radial_impulse(s, (100, 100), 40.0, 300.0)
    assert b.vx == 0 and b.vy == pytest.approx(300.0 * b.inv_mass)
