"""Game rules on top of the physics engine: levels, birds, shots, scoring."""

from __future__ import annotations

import copy
import enum
import hashlib
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

from . import physics
from .geometry import CircleShape, OrientedRect, Point2
from .physics import MATERIALS, Body, Kind, Space, StepEvents

DEFAULT_SPEED = 170.0
DEFAULT_GRAVITY = (0.0, -100.0)
BLOCK_MATERIALS = ("wood", "ice", "stone")
EGG_RADIUS = 4.0


class LevelError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NoBirdsLeft(RuntimeError):
    pass


class InvalidTap(RuntimeError):
    pass


class Unreachable(ValueError):
    pass


class OutOfSector(ValueError):
    pass


class BirdType(enum.Enum):
    RED = "red"
    YELLOW = "yellow"
    BLUE = "blue"
    BLACK = "black"
    WHITE = "white"

    @property
    def has_ability(self) -> bool:
        return self is not BirdType.RED


BIRD_RADIUS = {
    BirdType.RED: 7.0,
    BirdType.YELLOW: 7.0,
    BirdType.BLUE: 5.0,
    BirdType.BLACK: 9.0,
    BirdType.WHITE: 9.0,
}


@dataclass(frozen=True)
class Abilities:
    boost_factor: float = 1.6
    split_count: int = 3
    split_spread: float = 0.15
    blast_radius: float = 40.0
    blast_strength: float = 3000.0
    egg_speed: float = 300.0
    egg_kick: float = 200.0


@dataclass(frozen=True)
class ScoreConfig:
    pig_points: int = 5000
    block_points: dict = field(default_factory=lambda: {"wood": 500, "ice": 500, "stone": 500})
    unused_bird_points: int = 10000

    def __post_init__(self):
        if self.pig_points < 0 or self.unused_bird_points < 0 or any(v < 0 for v in self.block_points.values()):
            raise ValueError("score values must be non-negative")

    def __hash__(self):
        return hash((self.pig_points, tuple(sorted(self.block_points.items())), self.unused_bird_points))


@dataclass(frozen=True)
class Shot:
    angle: float
    tap_time: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.angle <= math.pi / 2:
            raise ValueError(f"shot angle {self.angle} outside [0, pi/2]")
        if self.tap_time is not None and self.tap_time <= 0.0:
            raise ValueError("tap_time must be positive")


class Status(enum.Enum):
    ONGOING = "ongoing"
    WON = "won"
    LOST = "lost"
    TIMEOUT = "timeout"


@dataclass
class Scene(Space):
    slingshot: Point2 = Point2(100.0, 60.0)
    launch_speed: float = DEFAULT_SPEED
    bird_queue: list = field(default_factory=list)
    scoring: ScoreConfig = field(default_factory=ScoreConfig)
    abilities: Abilities = field(default_factory=Abilities)
    # (step, body id, points) for every scored destruction
    score_events: list = field(default_factory=list)
    name: str = ""

    def clone(self) -> "Scene":
        new = copy.copy(self)
        new.bodies = [b.copy() for b in self.bodies]
        new.bird_queue = list(self.bird_queue)
        new.score_events = list(self.score_events)
        new.warm_impulses = dict(self.warm_impulses)
        return new

    @property
    def pigs(self) -> list[Body]:
        return [b for b in self.bodies if b.kind is Kind.PIG]

    @property
    def alive_pigs(self) -> list[Body]:
        return [b for b in self.bodies if b.kind is Kind.PIG and b.alive]

    @property
    def score(self) -> int:
        return current_score(self)


def _num(tok: str, line: int) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise LevelError(f"expected a number, got {tok!r}", line) from None
    if not math.isfinite(value):
        raise LevelError(f"non-finite number {tok!r}", line)
    return value


def _bird(tok: str, line: int) -> BirdType:
    try:
        return BirdType(tok.lower())
    except ValueError:
        raise LevelError(f"unknown bird type {tok!r}", line) from None


def _material(tok: str, line: int) -> str:
    if tok not in BLOCK_MATERIALS:
        raise LevelError(f"unknown material {tok!r}", line)
    return tok


def _parse_score(args: list[str], line: int) -> ScoreConfig:
    pig, bird = 5000, 10000
    blocks = {"wood": 500, "ice": 500, "stone": 500}
    i = 0
    try:
        while i < len(args):
            key = args[i]
            if key == "pig":
                pig = int(args[i + 1])
                i += 2
            elif key == "bird":
                bird = int(args[i + 1])
                i += 2
            elif key == "block":
                blocks[_material(args[i + 1], line)] = int(args[i + 2])
                i += 3
            else:
                raise LevelError(f"unknown score key {key!r}", line)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, LevelError):
            raise
        raise LevelError("malformed score directive", line) from None
    return ScoreConfig(pig, blocks, bird)


def load_level(text: str, name: str = "") -> Scene:
    """Parse the line-oriented level format into a fresh, all-inactive Scene."""
    singles: dict[str, tuple] = {}
    objects: list[tuple[int, str, list[str]]] = []
    queue: list[BirdType] = []
    scoring = ScoreConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        if head in ("gravity", "slingshot"):
            if len(args) != 2:
                raise LevelError(f"{head} takes two numbers", lineno)
            value = (_num(args[0], lineno), _num(args[1], lineno))
        elif head in ("speed", "ground"):
            if len(args) != 1:
                raise LevelError(f"{head} takes one number", lineno)
            value = (_num(args[0], lineno),)
        elif head == "score":
            scoring = _parse_score(args, lineno)
            continue
        elif head == "bird":
            if len(args) != 1:
                raise LevelError("bird takes one type", lineno)
            queue.append(_bird(args[0], lineno))
            continue
        elif head in ("block", "pig"):
            objects.append((lineno, head, args))
            continue
        else:
            raise LevelError(f"unknown directive {head!r}", lineno)
        if head in singles:
            raise LevelError(f"duplicate {head} directive", lineno)
        singles[head] = value

    for key in ("gravity", "slingshot", "speed"):
        if key not in singles:
            raise LevelError(f"missing {key} directive")
    if "ground" not in singles:
        raise LevelError("level has no ground")
    if not queue:
        raise LevelError("level has no birds")

    bodies = [physics.ground_body(0, singles["ground"][0])]
    for lineno, head, args in objects:
        bid = len(bodies)
        if head == "pig":
            if len(args) != 3:
                raise LevelError("pig takes cx cy r", lineno)
            cx, cy, r = (_num(a, lineno) for a in args)
            bodies.append(Body(bid, Kind.PIG, MATERIALS["pig"], CircleShape(Point2(cx, cy), r)))
            continue
        if len(args) < 2:
            raise LevelError("block needs a material and a shape", lineno)
        mat = MATERIALS[_material(args[0], lineno)]
        if args[1] == "rect":
            if len(args) != 7:
                raise LevelError("block rect takes cx cy w h angle_deg", lineno)
            cx, cy, w, h, deg = (_num(a, lineno) for a in args[2:])
            shape = OrientedRect(Point2(cx, cy), w / 2, h / 2, math.radians(deg))
        elif args[1] == "circle":
            if len(args) != 5:
                raise LevelError("block circle takes cx cy r", lineno)
            cx, cy, r = (_num(a, lineno) for a in args[2:])
            shape = CircleShape(Point2(cx, cy), r)
        else:
            raise LevelError(f"unknown block shape {args[1]!r}", lineno)
        if min(getattr(shape, "radius", 1.0), getattr(shape, "half_w", 1.0), getattr(shape, "half_h", 1.0)) <= 0:
            raise LevelError("block dimensions must be positive", lineno)
        bodies.append(Body(bid, Kind.BLOCK, mat, shape))

    if not any(b.kind is Kind.PIG for b in bodies):
        raise LevelError("level has no pigs")

    return Scene(
        bodies=bodies,
        gravity=singles["gravity"],
        slingshot=Point2(*singles["slingshot"]),
        launch_speed=singles["speed"][0],
        bird_queue=queue,
        scoring=scoring,
        name=name,
    )


def load_level_file(path) -> Scene:
    path = Path(path)
    return load_level(path.read_text(encoding="utf-8"), name=path.stem)


def bird_in_flight(scene: Scene) -> Body | None:
    """The most recently launched bird that has not hit anything yet."""
    for b in reversed(scene.bodies):
        if b.kind is Kind.BIRD and b.alive and not b.touched:
            return b
    return None


def launch(scene: Scene, shot: Shot) -> Body:
    if not scene.bird_queue:
        raise NoBirdsLeft("bird queue is empty")
    bird_type = scene.bird_queue.pop(0)
    shape = CircleShape(scene.slingshot, BIRD_RADIUS[bird_type])
    bird = Body(scene.next_id(), Kind.BIRD, MATERIALS["bird"], shape, bird_type=bird_type, active=True)
    bird.vx = scene.launch_speed * math.cos(shot.angle)
    bird.vy = scene.launch_speed * math.sin(shot.angle)
    scene.bodies.append(bird)
    scene.quiet_frames = 0
    return bird


def tap(scene: Scene) -> StepEvents:
    """Trigger the in-flight bird's special ability."""
    bird = bird_in_flight(scene)
    if bird is None or bird.tapped:
        raise InvalidTap("no untapped bird in flight")
    kind = bird.bird_type
    ab = scene.abilities
    events = StepEvents()
    if kind is BirdType.RED:
        return events
    bird.tapped = True
    if kind is BirdType.YELLOW:
        bird.vx *= ab.boost_factor
        bird.vy *= ab.boost_factor
    elif kind is BirdType.BLUE:
        speed = math.hypot(bird.vx, bird.vy)
        heading = math.atan2(bird.vy, bird.vx)
        scene.bodies.remove(bird)
        mid = (ab.split_count - 1) / 2
        for i in range(ab.split_count):
            theta = heading + (i - mid) * ab.split_spread
            child = Body(scene.next_id(), Kind.BIRD, bird.material,
                         CircleShape(Point2(bird.x, bird.y), bird.radius), bird_type=kind, active=True)
            child.vx, child.vy = speed * math.cos(theta), speed * math.sin(theta)
            child.tapped = True
            scene.bodies.append(child)
            events.activated.append(child.id)
    elif kind is BirdType.BLACK:
        bird.alive = False
        events.extend(physics.apply_radial_impulse(scene, (bird.x, bird.y), ab.blast_radius,
                                                   ab.blast_strength, exclude=(bird.id,)))
        _record_scores(scene, events)
    elif kind is BirdType.WHITE:
        egg = Body(scene.next_id(), Kind.PROJECTILE, MATERIALS["egg"],
                   CircleShape(Point2(bird.x, bird.y), EGG_RADIUS), active=True)
        egg.vy = -ab.egg_speed
        scene.bodies.append(egg)
        bird.vy += ab.egg_kick
        events.activated.append(egg.id)
    return events


def solve_launch_angles(dx: float, dy: float, speed: float, g: float) -> tuple[float, float]:
    """Both launch angles whose drag-free arc passes through (dx, dy)."""
    if dx <= 0:
        raise OutOfSector(f"target must lie ahead of the launch point (dx={dx})")
    if speed <= 0 or g <= 0:
        raise ValueError("speed and g must be positive")
    v2 = speed * speed
    disc = v2 * v2 - g * (g * dx * dx + 2 * dy * v2)
    if disc < 0:
        raise Unreachable(f"target ({dx}, {dy}) out of range at speed {speed}")
    root = math.sqrt(disc)
    low = math.atan((v2 - root) / (g * dx))
    high = math.atan((v2 + root) / (g * dx))
    return low, high


def _points_for(scene: Scene, body: Body) -> int:
    if body.kind is Kind.PIG:
        return scene.scoring.pig_points
    if body.kind is Kind.BLOCK:
        return scene.scoring.block_points.get(body.material.name, 0)
    return 0


def current_score(scene: Scene) -> int:
    total = sum(_points_for(scene, b) for b in scene.bodies if not b.alive)
    if not scene.alive_pigs:
        total += scene.scoring.unused_bird_points * len(scene.bird_queue)
    return total


def score_trace(scene: Scene) -> list[tuple]:
    """Per-event score records; they add up to current_score."""
    trace = list(scene.score_events)
    if not scene.alive_pigs:
        trace.append((scene.steps, None, scene.scoring.unused_bird_points * len(scene.bird_queue)))
    return trace


def _record_scores(scene: Scene, events: StepEvents) -> None:
    for bid in events.destroyed:
        pts = _points_for(scene, scene.body(bid))
        if pts:
            scene.score_events.append((scene.steps, bid, pts))


def advance(scene: Scene, dt: float | None = None) -> StepEvents:
    events = physics.step(scene, dt)
    if events.destroyed:
        _record_scores(scene, events)
    return events


@dataclass
class ShotTrace:
    steps: int
    settled: bool
    trace_hash: int
    tapped: bool
    events: StepEvents


def play_shot(scene: Scene, shot: Shot, horizon: float = 15.0, dt: float | None = None,
              record_rows: list | None = None) -> ShotTrace:
    """Launch, then step until the scene settles or the horizon runs out.

    A requested tap fires on the step nearest to ``shot.tap_time``; taps on
    a bird that has already hit something are dropped.
    """
    dt = scene.physics.dt if dt is None else dt
    launch(scene, shot)
    n_steps = int(round(horizon / dt))
    tap_step = None if shot.tap_time is None else int(round(shot.tap_time / dt))
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<dd", shot.angle, -1.0 if shot.tap_time is None else shot.tap_time))
    total = StepEvents()
    tapped = False
    settled = False
    steps = 0
    for i in range(n_steps):
        if i == tap_step:
            try:
                total.extend(tap(scene))
                tapped = True
            except InvalidTap:
                pass
        ev = advance(scene, dt)
        steps += 1
        if ev.destroyed or ev.activated:
            h.update(struct.pack(f"<q{len(ev.destroyed)}q{len(ev.activated)}q", i, *ev.destroyed, *ev.activated))
        total.destroyed.extend(ev.destroyed)
        total.activated.extend(ev.activated)
        if record_rows is not None:
            record_rows.append((i, scene.time, current_score(scene), len(scene.alive_pigs),
                                ";".join(map(str, ev.destroyed))))
        if physics.is_settled(scene):
            settled = True
            break
    h.update(physics.state_digest(scene).to_bytes(8, "little"))
    return ShotTrace(steps, settled, int.from_bytes(h.digest(), "little"), tapped, total)


def clear_projectiles(scene: Scene) -> None:
    """Spent birds and eggs leave the scene once a shot is over."""
    scene.bodies = [b for b in scene.bodies if b.kind not in (Kind.BIRD, Kind.PROJECTILE)]


def status(scene: Scene, settled: bool) -> Status:
    if not scene.alive_pigs:
        return Status.WON
    if scene.bird_queue:
        return Status.ONGOING
    return Status.LOST if settled else Status.TIMEOUT
