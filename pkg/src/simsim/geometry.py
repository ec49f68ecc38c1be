"""Computational-geometry kernels used by perception.

Connected components on class grids, monotone-chain convex hulls,
minimum-area enclosing rectangles by edge iteration, circle/rectangle
classification and dimension equalization across similar objects.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import ndimage

HALF_PI = math.pi / 2

# cross-product tolerance for dropping collinear hull points (px^2)
COLLINEAR_EPS = 1e-9
# perpendicular deviation below which a hull vertex does not count for classification
VERTEX_PRUNE_TOL = 0.5
CIRCLE_VERTEX_THRESHOLD = 8
CIRCLE_MAX_ASPECT = 1.3
MIN_HALF_THICKNESS = 0.5

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class PixelSet:
    """One 4-connected blob of a single class. Pixels are (col, row) pairs."""

    pixels: frozenset
    class_id: int

    def __len__(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class Hull:
    vertices: tuple  # of Point2, counter-clockwise

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class OrientedRect:
    center: Point2
    half_w: float
    half_h: float
    angle: float = 0.0

    @property
    def area(self) -> float:
        return 4.0 * self.half_w * self.half_h

    def corners(self) -> list[Point2]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        out = []
        for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            lx, ly = sx * self.half_w, sy * self.half_h
            out.append(Point2(self.center.x + c * lx - s * ly, self.center.y + s * lx + c * ly))
        return out

    def contains(self, p, tol: float = 0.0) -> bool:
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx, dy = p[0] - self.center.x, p[1] - self.center.y
        lx = c * dx + s * dy
        ly = -s * dx + c * dy
        return abs(lx) <= self.half_w + tol and abs(ly) <= self.half_h + tol


@dataclass(frozen=True)
class CircleShape:
    center: Point2
    radius: float

    @property
    def area(self) -> float:
        return math.pi * self.radius * self.radius


class ShapeKind(enum.Enum):
    RECTANGLE = "rectangle"
    CIRCLE = "circle"


def canonical_rect(center, half_w: float, half_h: float, angle: float) -> OrientedRect:
    """Build a rect with half_w >= half_h and angle in [-pi/2, pi/2)."""
    if half_w < half_h:
        half_w, half_h = half_h, half_w
        angle += HALF_PI
    angle = (angle + HALF_PI) % math.pi - HALF_PI
    if angle >= HALF_PI:  # float wrap at the upper edge
        angle -= math.pi
    return OrientedRect(Point2(float(center[0]), float(center[1])), float(half_w), float(half_h), angle)


def flood_fill_components(grid, class_id: int) -> list[PixelSet]:
    """Maximal 4-connected components of ``class_id`` pixels.

    Components are ordered by (min row, min col) of their pixels.
    """
    data = np.asarray(grid.data)
    mask = data == class_id
    if not mask.any():
        return []
    labels, count = ndimage.label(mask, structure=_FOUR_CONNECTED)
    rows, cols = np.nonzero(labels)
    labs = labels[rows, cols]
    order = np.argsort(labs, kind="stable")
    rows, cols, labs = rows[order], cols[order], labs[order]
    bounds = np.searchsorted(labs, np.arange(1, count + 2))
    comps = []
    for k in range(count):
        lo, hi = bounds[k], bounds[k + 1]
        r, c = rows[lo:hi], cols[lo:hi]
        # stable sort keeps nonzero()'s row-major order inside each label
        key = (int(r[0]), int(c[0]))
        pix = frozenset(zip(c.tolist(), r.tolist()))
        comps.append((key, PixelSet(pix, class_id)))
    comps.sort(key=lambda kc: kc[0])
    return [ps for _, ps in comps]


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence) -> Hull:
    """Andrew's monotone chain. CCW, collinear points dropped,
    starting at the lexicographically smallest point."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if not pts:
        raise ValueError("convex_hull needs at least one point")
    if len(pts) <= 2:
        return Hull(tuple(Point2(*p) for p in pts))

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= COLLINEAR_EPS:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= COLLINEAR_EPS:
            upper.pop()
        upper.append(p)
    verts = lower[:-1] + upper[:-1]
    if len(verts) < 2:  # every point collinear and coincident after pruning
        verts = [pts[0], pts[-1]]
    return Hull(tuple(Point2(*p) for p in verts))


def min_area_rect(hull: Hull, min_half: float = MIN_HALF_THICKNESS) -> OrientedRect:
    """Smallest rectangle among those aligned with some hull edge.

    Half extents below ``min_half`` are clamped so that thin or
    single-pixel detections still yield a solid.
    """
    verts = hull.vertices
    if len(verts) == 1:
        p = verts[0]
        return canonical_rect(p, min_half, min_half, 0.0)

    best = None
    n = len(verts)
    edges = n if n > 2 else 1
    for i in range(edges):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        length = math.hypot(bx - ax, by - ay)
        if length == 0.0:
            continue
        ux, uy = (bx - ax) / length, (by - ay) / length
        lo_u = lo_v = math.inf
        hi_u = hi_v = -math.inf
        for px, py in verts:
            u = px * ux + py * uy
            v = -px * uy + py * ux
            lo_u, hi_u = min(lo_u, u), max(hi_u, u)
            lo_v, hi_v = min(lo_v, v), max(hi_v, v)
        area = (hi_u - lo_u) * (hi_v - lo_v)
        if best is None or area < best[0]:
            best = (area, ux, uy, lo_u, hi_u, lo_v, hi_v)

    _, ux, uy, lo_u, hi_u, lo_v, hi_v = best
    cu, cv = (lo_u + hi_u) / 2, (lo_v + hi_v) / 2
    center = (cu * ux - cv * uy, cu * uy + cv * ux)
    half_w = max((hi_u - lo_u) / 2, min_half)
    half_h = max((hi_v - lo_v) / 2, min_half)
    return canonical_rect(center, half_w, half_h, math.atan2(uy, ux))


def prune_vertices(hull: Hull, tol: float = VERTEX_PRUNE_TOL) -> list[Point2]:
    """Drop hull vertices lying within ``tol`` of the line through their neighbours."""
    verts = list(hull.vertices)
    while len(verts) > 3:
        n = len(verts)
        best_i, best_d = -1, tol
        for i in range(n):
            a, p, b = verts[i - 1], verts[i], verts[(i + 1) % n]
            base = math.hypot(b[0] - a[0], b[1] - a[1])
            if base == 0.0:
                d = 0.0
            else:
                d = abs(_cross(a, b, p)) / base
            if d < best_d:
                best_i, best_d = i, d
        if best_i < 0:
            break
        del verts[best_i]
    return verts


def classify_shape(
    hull: Hull,
    rect: OrientedRect,
    vertex_threshold: int = CIRCLE_VERTEX_THRESHOLD,
    max_aspect: float = CIRCLE_MAX_ASPECT,
    prune_tol: float = VERTEX_PRUNE_TOL,
) -> ShapeKind:
    n = len(prune_vertices(hull, prune_tol))
    if n > vertex_threshold and rect.half_w / rect.half_h < max_aspect:
        return ShapeKind.CIRCLE
    return ShapeKind.RECTANGLE


def circle_from_rect(rect: OrientedRect) -> CircleShape:
    return CircleShape(rect.center, (rect.half_w + rect.half_h) / 2)


def _close(value: float, seed: float, rel_tol: float) -> bool:
    return abs(value - seed) <= rel_tol * abs(seed)


def _equalize_once(rects: list[OrientedRect], rel_tol: float) -> list[OrientedRect]:
    seeds: list[tuple[float, float]] = []
    members: list[list[int]] = []
    for i, r in enumerate(rects):
        for k, (sw, sh) in enumerate(seeds):
            if _close(r.half_w, sw, rel_tol) and _close(r.half_h, sh, rel_tol):
                members[k].append(i)
                break
        else:
            seeds.append((r.half_w, r.half_h))
            members.append([i])
    out = list(rects)
    for group in members:
        mw = statistics.median(rects[i].half_w for i in group)
        mh = statistics.median(rects[i].half_h for i in group)
        for i in group:
            out[i] = canonical_rect(rects[i].center, mw, mh, rects[i].angle)
    return out


def equalize_dimensions(rects: Sequence[OrientedRect], rel_tol: float = 0.1) -> list[OrientedRect]:
    """Snap near-identical rectangle sizes to their cluster median.

    Greedy clustering against each cluster's first member; repeated until
    no cluster changes, which makes the operation idempotent.
    """
    if not 0.0 < rel_tol < 0.5:
        raise ValueError("rel_tol must lie in (0, 0.5)")
    current = list(rects)
    while True:
        nxt = _equalize_once(current, rel_tol)
        if all((a.half_w, a.half_h, a.angle) == (b.half_w, b.half_h, b.angle) for a, b in zip(nxt, current)):
            return nxt
        current = nxt


def cluster_count(rects: Sequence[OrientedRect]) -> int:
    return len({(r.half_w, r.half_h) for r in rects})

