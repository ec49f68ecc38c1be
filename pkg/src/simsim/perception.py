"""Rebuild a simulatable scene from a class-indexed image.

Every solid blob goes through fill -> convex hull -> minimum-area rectangle,
is classified as disc or box from its hull, and boxes of the same material
have their sizes snapped together. The result only ever sees pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry, render
from .geometry import CircleShape, Hull, OrientedRect, Point2, ShapeKind
from .physics import MATERIALS, Body, Kind, PhysicsConfig, ground_body
from .world import DEFAULT_GRAVITY, DEFAULT_SPEED, Abilities, BirdType, ScoreConfig, Scene

MIN_PIXELS = 6
EQUALIZE_TOL = 0.1
CORNER_REACH_LIMIT = 0.86

_MATERIAL_OF_CLASS = {cid: name for name, cid in render.MATERIAL_CLASS.items()}
_BIRD_OF_CLASS = {cid: BirdType(name) for name, cid in render.BIRD_CLASS.items()}


class PerceptionError(RuntimeError):
    pass


@dataclass
class ReconstructedObject:
    shape: object  # OrientedRect | CircleShape
    kind: str  # "block" | "pig"
    material: str
    class_id: int
    hull: Hull
    pixel_count: int


@dataclass
class ReconstructedScene:
    objects: list
    slingshot: Point2
    bird_queue: list
    ground_y: float
    width: int
    height: int
    notes: list = field(default_factory=list)


@dataclass
class SceneTemplate:
    """What the agent assumes about the world it cannot see."""

    gravity: tuple = DEFAULT_GRAVITY
    launch_speed: float = DEFAULT_SPEED
    scoring: ScoreConfig = field(default_factory=ScoreConfig)
    abilities: Abilities = field(default_factory=Abilities)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)


def _arrays(ps: geometry.PixelSet) -> tuple[np.ndarray, np.ndarray]:
    arr = np.array(sorted(ps.pixels, key=lambda p: (p[1], p[0])), dtype=np.int64)
    return arr[:, 0], arr[:, 1]


def outline_points(ps: geometry.PixelSet, height: int) -> list[tuple[float, float]]:
    """World-space corners of the leftmost and rightmost pixel of every row.

    Their hull equals the hull of all pixel squares of the blob.
    """
    cols, rows = _arrays(ps)
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    ends = np.r_[starts[1:], len(rows)] - 1
    lo, hi, rr = cols[starts], cols[ends] + 1, rows[starts]
    xs = np.concatenate([lo, lo, hi, hi]).astype(float)
    ys = (height - np.concatenate([rr, rr + 1, rr, rr + 1])).astype(float)
    return list(zip(xs.tolist(), ys.tolist()))


def _trim_to_area(rect: OrientedRect, pixel_count: int) -> OrientedRect:
    """Shrink both sides equally until the box area matches the pixel count.

    The hull of pixel squares overshoots a tilted edge by a staircase margin of
    roughly constant width; axis-aligned blobs come out unchanged.
    """
    w, h = 2 * rect.half_w, 2 * rect.half_h
    excess = w * h - pixel_count
    if excess <= 0:
        return rect
    s = w + h
    shrink = (s - math.sqrt(s * s - 4 * excess)) / 2
    if not 0 < shrink < h:
        return rect
    return geometry.canonical_rect(rect.center, (w - shrink) / 2, (h - shrink) / 2, rect.angle)


def _centers(ps, height) -> np.ndarray:
    cols, rows = _arrays(ps)
    return np.column_stack([cols + 0.5, height - (rows + 0.5)])


def corner_reach(centers: np.ndarray, rect: OrientedRect) -> float:
    """Farthest pixel center from the box center, over the half diagonal.

    Boxes reach into their corners (about 1), discs stop short (about 0.8).
    """
    hw, hh = max(rect.half_w - 0.5, 0.5), max(rect.half_h - 0.5, 0.5)
    d = np.hypot(centers[:, 0] - rect.center[0], centers[:, 1] - rect.center[1]).max()
    return float(d / math.hypot(hw, hh))


def _enclosing_at(corners: np.ndarray, angle: float) -> OrientedRect:
    c, s = math.cos(angle), math.sin(angle)
    u = corners @ np.array([c, s])
    v = corners @ np.array([-s, c])
    mu, mv = (u.min() + u.max()) / 2, (v.min() + v.max()) / 2
    center = Point2(float(mu * c - mv * s), float(mu * s + mv * c))
    return OrientedRect(center, float(u.max() - u.min()) / 2, float(v.max() - v.min()) / 2, angle)


def _mismatch(rect: OrientedRect, blob: set, height: int) -> int:
    ex = abs(math.cos(rect.angle)) * rect.half_w + abs(math.sin(rect.angle)) * rect.half_h
    ey = abs(math.sin(rect.angle)) * rect.half_w + abs(math.cos(rect.angle)) * rect.half_h
    c0 = int(math.floor(rect.center[0] - ex)) - 1
    r0 = int(math.floor(height - rect.center[1] - ey)) - 1
    w = int(math.ceil(2 * ex)) + 3
    h = int(math.ceil(2 * ey)) + 3
    sub = np.zeros((h, w), dtype=np.uint8)
    # paint into a small window: shift columns by c0 and rows by r0
    render.paint_rect(sub, height - r0, rect.center[0] - c0, rect.center[1], rect.half_w, rect.half_h, rect.angle, 1)
    painted = {(int(c) + c0, int(r) + r0) for r, c in zip(*np.nonzero(sub))}
    return len(painted ^ blob)


def _refine_box(ps, rect: OrientedRect, height: int, span_deg: float = 5.0, step_deg: float = 0.5) -> OrientedRect:
    """Try nearby angles and keep the box that redraws the blob best.

    Hulls of small tilted boxes are mostly staircase, so the hull edges can
    be several degrees off the true sides.
    """
    cols, rows = _arrays(ps)
    xs = np.concatenate([cols, cols + 1, cols, cols + 1]).astype(float)
    ys = (height - np.concatenate([rows, rows, rows + 1, rows + 1])).astype(float)
    corners = np.column_stack([xs, ys])
    blob = set(ps.pixels)
    n = int(round(span_deg / step_deg))
    best, best_key = rect, None
    for k in sorted(range(-n, n + 1), key=abs):
        angle = rect.angle + math.radians(k * step_deg)
        cand = _trim_to_area(_enclosing_at(corners, angle), len(ps))
        key = _mismatch(cand, blob, height)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return geometry.canonical_rect(best.center, best.half_w, best.half_h, best.angle)


def _reconstruct(ps, height, kind, material, reach_limit: float = CORNER_REACH_LIMIT):
    hull = geometry.convex_hull(outline_points(ps, height))
    rect = geometry.min_area_rect(hull)
    if kind == "pig":
        circle = True
    elif rect.half_w / rect.half_h < geometry.CIRCLE_MAX_ASPECT:
        circle = corner_reach(_centers(ps, height), rect) < reach_limit
    else:
        circle = False
    if circle:
        shape = geometry.circle_from_rect(rect)
    else:
        shape = _refine_box(ps, rect, height)
    return ReconstructedObject(shape, kind, material, ps.class_id, hull, len(ps))


def perceive(grid, min_pixels: int = MIN_PIXELS, rel_tol: float = EQUALIZE_TOL) -> ReconstructedScene:
    data = np.asarray(grid.data)
    height, width = data.shape
    notes = []

    ground_rows = np.flatnonzero((data == render.GROUND).any(axis=1))
    if len(ground_rows):
        ground_y = float(height - ground_rows.min())
    else:
        ground_y = 0.0
        notes.append("no ground pixels; assuming ground at the bottom edge")

    slings = geometry.flood_fill_components(grid, render.SLINGSHOT)
    if not slings:
        raise PerceptionError("no slingshot in view")
    sling = max(slings, key=len)
    cols, rows = _arrays(sling)
    slingshot = Point2(float(cols.min() + cols.max() + 1) / 2.0, float(height - rows.min()))

    birds = []
    for cid, bird_type in _BIRD_OF_CLASS.items():
        for ps in geometry.flood_fill_components(grid, cid):
            if len(ps) >= min_pixels:
                cols, _ = _arrays(ps)
                birds.append((float(cols.min() + cols.max() + 1) / 2.0, bird_type))
    bird_queue = [bt for _, bt in sorted(birds, key=lambda xb: xb[0])]

    objects = []
    for cid in sorted(_MATERIAL_OF_CLASS):
        for ps in geometry.flood_fill_components(grid, cid):
            if len(ps) < min_pixels:
                notes.append(f"dropped {len(ps)}-pixel blob of class {cid}")
                continue
            objects.append(_reconstruct(ps, height, "block", _MATERIAL_OF_CLASS[cid]))
    for ps in geometry.flood_fill_components(grid, render.PIG):
        if len(ps) < min_pixels:
            notes.append(f"dropped {len(ps)}-pixel pig blob")
            continue
        objects.append(_reconstruct(ps, height, "pig", "pig"))

    for material in sorted(_MATERIAL_OF_CLASS.values()):
        idx = [i for i, o in enumerate(objects)
               if o.material == material and isinstance(o.shape, OrientedRect)]
        if not idx:
            continue
        snapped = geometry.equalize_dimensions([objects[i].shape for i in idx], rel_tol)
        for i, r in zip(idx, snapped):
            objects[i].shape = r

    return ReconstructedScene(objects, slingshot, bird_queue, ground_y, width, height, notes)


def to_scene(rec: ReconstructedScene, template: SceneTemplate | None = None) -> Scene:
    """The imagined world: every perceived object held in place."""
    template = template or SceneTemplate()
    bodies = [ground_body(0, rec.ground_y)]
    for obj in rec.objects:
        bid = len(bodies)
        if obj.kind == "pig":
            shape = obj.shape if isinstance(obj.shape, CircleShape) else geometry.circle_from_rect(obj.shape)
            bodies.append(Body(bid, Kind.PIG, MATERIALS["pig"], shape))
        else:
            bodies.append(Body(bid, Kind.BLOCK, MATERIALS[obj.material], obj.shape))
    return Scene(
        bodies=bodies,
        gravity=tuple(template.gravity),
        physics=template.physics,
        slingshot=rec.slingshot,
        launch_speed=template.launch_speed,
        bird_queue=list(rec.bird_queue),
        scoring=template.scoring,
        abilities=template.abilities,
        name="imagined",
    )
