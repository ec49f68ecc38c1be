"""Deterministic fixed-timestep 2D rigid-body engine.

Bodies are discs or oriented boxes plus a single half-plane ground.
Bodies start *inactive*: they are held exactly in place and ignore gravity
until they touch an already active body. Each step runs the same fixed
sequence of phases (integrate, detect, activate, resolve, damage, destroy)
over contacts sorted by body id, so identical states always produce
bit-identical successors.
"""

from __future__ import annotations

import enum
import hashlib
import math
import struct
from dataclasses import dataclass, field

from .geometry import CircleShape, OrientedRect, Point2

INF = math.inf
GROUND_HALF_EXTENT = 1.0e5
# contact points closer than this (per axis) across steps share warm-start impulses
WARM_MATCH = 0.5


class ContractViolation(Exception):
    """The scene handed to the engine breaks a structural precondition."""


class Kind(enum.Enum):
    BLOCK = "block"
    PIG = "pig"
    BIRD = "bird"
    GROUND = "ground"
    PROJECTILE = "projectile"


@dataclass(frozen=True)
class Material:
    name: str
    density: float
    restitution: float
    friction: float
    health: float
    break_score: int = 0
    damage_threshold: float = INF


# Densities keep resting loads of short stacks below the damage thresholds.
MATERIALS = {
    "ice": Material("ice", 0.0005, 0.1, 0.3, 20.0, 500, 5.0),
    "wood": Material("wood", 0.0008, 0.2, 0.5, 50.0, 500, 15.0),
    "stone": Material("stone", 0.0016, 0.1, 0.7, 120.0, 500, 40.0),
    "pig": Material("pig", 0.0008, 0.3, 0.5, 8.0, 5000, 3.0),
    "bird": Material("bird", 0.01, 0.3, 0.5, INF, 0, INF),
    "egg": Material("egg", 0.01, 0.1, 0.5, INF, 0, INF),
    "ground": Material("ground", 0.0, 0.1, 0.8, INF, 0, INF),
}


@dataclass
class PhysicsConfig:
    dt: float = 1.0 / 60.0
    solver_passes: int = 4
    projection: float = 0.8
    # bodies closer than this count as touching (activation through resting contact)
    contact_margin: float = 0.05
    # approach speeds below this do not bounce
    bounce_threshold: float = 4.0
    # fraction of spin a disc loses per step while touching something
    rolling_damping: float = 0.1
    blast_damage_scale: float = 1.0
    v_sleep: float = 0.5
    w_sleep: float = 0.05
    sleep_frames: int = 30


class Body:
    """A rigid disc or box. Position is the shape center."""

    __slots__ = (
        "id", "kind", "material", "bird_type", "is_circle",
        "x", "y", "angle", "half_w", "half_h", "radius",
        "vx", "vy", "w", "mass", "inv_mass", "inv_inertia",
        "damage", "active", "alive", "touched", "tapped",
    )

    def __init__(self, id, kind, material, shape, bird_type=None, active=False):
        self.id = id
        self.kind = kind
        self.material = material
        self.bird_type = bird_type
        self.vx = self.vy = self.w = 0.0
        self.damage = 0.0
        self.active = active
        self.alive = True
        self.touched = False
        self.tapped = False
        if isinstance(shape, CircleShape):
            self.is_circle = True
            self.x, self.y = float(shape.center[0]), float(shape.center[1])
            self.angle = 0.0
            self.radius = float(shape.radius)
            self.half_w = self.half_h = self.radius
            area = math.pi * self.radius ** 2
            mass = material.density * area
            inertia = mass * self.radius ** 2 / 2
        else:
            self.is_circle = False
            self.x, self.y = float(shape.center[0]), float(shape.center[1])
            self.angle = float(shape.angle)
            self.half_w, self.half_h = float(shape.half_w), float(shape.half_h)
            self.radius = math.hypot(self.half_w, self.half_h)
            mass = material.density * 4 * self.half_w * self.half_h
            inertia = mass * (self.half_w ** 2 + self.half_h ** 2) / 3
        if kind is Kind.GROUND or mass <= 0:
            self.mass = INF
            self.inv_mass = self.inv_inertia = 0.0
        else:
            self.mass = mass
            self.inv_mass = 1.0 / mass
            self.inv_inertia = 1.0 / inertia

    @property
    def shape(self):
        if self.is_circle:
            return CircleShape(Point2(self.x, self.y), self.radius)
        return OrientedRect(Point2(self.x, self.y), self.half_w, self.half_h, self.angle)

    @property
    def velocity(self) -> tuple[float, float]:
        return (self.vx, self.vy)

    @property
    def angular_velocity(self) -> float:
        return self.w

    @property
    def position(self) -> Point2:
        return Point2(self.x, self.y)

    @property
    def top(self) -> float:
        """Surface height of a ground body."""
        return self.y + self.half_h

    def copy(self) -> "Body":
        b = Body.__new__(Body)
        for name in Body.__slots__:
            setattr(b, name, getattr(self, name))
        return b

    def state_tuple(self) -> tuple:
        return (self.id, self.x, self.y, self.angle, self.vx, self.vy, self.w,
                self.damage, self.active, self.alive)

    def __repr__(self) -> str:
        return (f"Body(id={self.id}, kind={self.kind.value}, material={self.material.name}, "
                f"pos=({self.x:.2f}, {self.y:.2f}), active={self.active}, alive={self.alive})")


def ground_body(id: int, top: float) -> Body:
    shape = OrientedRect(Point2(0.0, top - GROUND_HALF_EXTENT), GROUND_HALF_EXTENT, GROUND_HALF_EXTENT, 0.0)
    return Body(id, Kind.GROUND, MATERIALS["ground"], shape)


@dataclass
class Contact:
    body_a: int
    body_b: int
    point: Point2
    normal: tuple  # unit, from a to b
    penetration: float


@dataclass
class StepEvents:
    collisions: list = field(default_factory=list)  # (id_a, id_b, normal impulse)
    destroyed: list = field(default_factory=list)
    activated: list = field(default_factory=list)

    def extend(self, other: "StepEvents") -> None:
        self.collisions.extend(other.collisions)
        self.destroyed.extend(other.destroyed)
        self.activated.extend(other.activated)

    def __bool__(self) -> bool:
        return bool(self.collisions or self.destroyed or self.activated)


@dataclass
class Space:
    """Bodies plus the global simulation state the engine mutates."""

    bodies: list = field(default_factory=list)
    gravity: tuple = (0.0, -100.0)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    time: float = 0.0
    steps: int = 0
    quiet_frames: int = 0
    # accumulated contact impulses of the previous step, keyed by body pair
    warm_impulses: dict = field(default_factory=dict)

    def body(self, id: int) -> Body:
        for b in self.bodies:
            if b.id == id:
                return b
        raise KeyError(id)

    @property
    def ground(self) -> Body:
        grounds = [b for b in self.bodies if b.kind is Kind.GROUND]
        if len(grounds) != 1:
            raise ContractViolation(f"expected exactly one ground body, found {len(grounds)}")
        return grounds[0]

    def next_id(self) -> int:
        return max((b.id for b in self.bodies), default=-1) + 1


# -- narrow phase -------------------------------------------------------------
# Each routine returns a list of (nx, ny, px, py, penetration) with the normal
# pointing from the first argument to the second.

def _circle_circle(a, b, margin):
    dx, dy = b.x - a.x, b.y - a.y
    dist = math.hypot(dx, dy)
    sep = dist - a.radius - b.radius
    if sep > margin:
        return None
    if dist == 0.0:
        nx, ny = 0.0, 1.0
    else:
        nx, ny = dx / dist, dy / dist
    return [(nx, ny, a.x + nx * a.radius, a.y + ny * a.radius, max(0.0, -sep))]


def _rect_circle(r, cir, margin):
    """Normal points from the box to the disc."""
    c, s = math.cos(r.angle), math.sin(r.angle)
    dx, dy = cir.x - r.x, cir.y - r.y
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    hw, hh = r.half_w, r.half_h
    qx = min(max(lx, -hw), hw)
    qy = min(max(ly, -hh), hh)
    if qx != lx or qy != ly:
        ex, ey = lx - qx, ly - qy
        dist = math.hypot(ex, ey)
        sep = dist - cir.radius
        if sep > margin:
            return None
        lnx, lny = ex / dist, ey / dist
        pen = max(0.0, -sep)
        plx, ply = qx, qy
    else:
        # center inside the box: leave through the nearest face
        fx, fy = hw - abs(lx), hh - abs(ly)
        if fx <= fy:
            lnx, lny = (1.0 if lx >= 0 else -1.0), 0.0
            plx, ply = lnx * hw, ly
            pen = fx + cir.radius
        else:
            lnx, lny = 0.0, (1.0 if ly >= 0 else -1.0)
            plx, ply = lx, lny * hh
            pen = fy + cir.radius
    nx, ny = c * lnx - s * lny, s * lnx + c * lny
    px, py = r.x + c * plx - s * ply, r.y + s * plx + c * ply
    return [(nx, ny, px, py, pen)]


def _box_faces(b):
    c, s = math.cos(b.angle), math.sin(b.angle)
    hw, hh = b.half_w, b.half_h
    # (normal x, normal y, extent along normal, half length along the face)
    return ((c, s, hw, hh), (-c, -s, hw, hh), (-s, c, hh, hw), (s, -c, hh, hw))


def _box_vertices(b):
    c, s = math.cos(b.angle), math.sin(b.angle)
    hw, hh = b.half_w, b.half_h
    ux, uy, vx, vy = c * hw, s * hw, -s * hh, c * hh
    return ((b.x + ux + vx, b.y + uy + vy), (b.x - ux + vx, b.y - uy + vy),
            (b.x - ux - vx, b.y - uy - vy), (b.x + ux - vx, b.y + uy - vy))


def _max_separation(a, faces_a, verts_b):
    best, best_face = -INF, None
    for face in faces_a:
        nx, ny, ext, _ = face
        m = INF
        for vx, vy in verts_b:
            d = nx * (vx - a.x) + ny * (vy - a.y)
            if d < m:
                m = d
        sep = m - ext
        if sep > best:
            best, best_face = sep, face
    return best, best_face


def _clip(p1, p2, tx, ty, offset):
    """Keep the part of segment p1-p2 with t.p <= offset."""
    d1 = tx * p1[0] + ty * p1[1] - offset
    d2 = tx * p2[0] + ty * p2[1] - offset
    out = []
    if d1 <= 0:
        out.append(p1)
    if d2 <= 0:
        out.append(p2)
    if d1 * d2 < 0:
        k = d1 / (d1 - d2)
        out.append((p1[0] + k * (p2[0] - p1[0]), p1[1] + k * (p2[1] - p1[1])))
    return out


def _rect_rect(a, b, margin):
    faces_a, faces_b = _box_faces(a), _box_faces(b)
    verts_a, verts_b = _box_vertices(a), _box_vertices(b)
    sep_a, face_a = _max_separation(a, faces_a, verts_b)
    if sep_a > margin:
        return None
    sep_b, face_b = _max_separation(b, faces_b, verts_a)
    if sep_b > margin:
        return None
    if sep_b > 0.98 * sep_a + 0.001:
        ref, face, inc_faces, flip = b, face_b, faces_a, True
        inc = a
    else:
        ref, face, inc_faces, flip = a, face_a, faces_b, False
        inc = b
    nx, ny, ext, half_len = face
    # incident face: the one most anti-parallel to the reference normal
    inc_face = min(inc_faces, key=lambda f: f[0] * nx + f[1] * ny)
    fnx, fny, fext, flen = inc_face
    ftx, fty = -fny, fnx
    cx, cy = inc.x + fnx * fext, inc.y + fny * fext
    p1 = (cx + ftx * flen, cy + fty * flen)
    p2 = (cx - ftx * flen, cy - fty * flen)
    tx, ty = -ny, nx
    rc = tx * ref.x + ty * ref.y
    pts = _clip(p1, p2, tx, ty, rc + half_len)
    if len(pts) >= 2:
        pts = _clip(pts[0], pts[1], -tx, -ty, -rc + half_len)
    elif pts:
        p = pts[0]
        if -tx * p[0] - ty * p[1] > -rc + half_len:
            pts = []
    out = []
    for px, py in pts:
        sep = nx * (px - ref.x) + ny * (py - ref.y) - ext
        if sep <= margin:
            if flip:
                out.append((-nx, -ny, px, py, max(0.0, -sep)))
            else:
                out.append((nx, ny, px, py, max(0.0, -sep)))
    return out or None


def _ground_contacts(g, b, margin):
    top = g.y + g.half_h
    if b.is_circle:
        sep = b.y - b.radius - top
        if sep > margin:
            return None
        return [(0.0, 1.0, b.x, b.y - b.radius, max(0.0, -sep))]
    out = []
    for vx, vy in _box_vertices(b):
        sep = vy - top
        if sep <= margin:
            out.append((sep, vx, vy))
    if not out:
        return None
    out.sort()
    return [(0.0, 1.0, vx, vy, max(0.0, -sep)) for sep, vx, vy in out[:2]]


def collide(a: Body, b: Body, margin: float = 0.0):
    """Contact points between two bodies (normal from a to b), or None."""
    if a.kind is Kind.GROUND:
        return _ground_contacts(a, b, margin)
    if b.kind is Kind.GROUND:
        res = _ground_contacts(b, a, margin)
        return None if res is None else [(-nx, -ny, px, py, pen) for nx, ny, px, py, pen in res]
    if a.is_circle and b.is_circle:
        return _circle_circle(a, b, margin)
    if a.is_circle:
        res = _rect_circle(b, a, margin)
        return None if res is None else [(-nx, -ny, px, py, pen) for nx, ny, px, py, pen in res]
    if b.is_circle:
        return _rect_circle(a, b, margin)
    return _rect_rect(a, b, margin)


def _aabb(b):
    if b.kind is Kind.GROUND:
        return (-INF, -INF, INF, b.y + b.half_h)
    if b.is_circle:
        r = b.radius
        return (b.x - r, b.y - r, b.x + r, b.y + r)
    c, s = abs(math.cos(b.angle)), abs(math.sin(b.angle))
    ex = c * b.half_w + s * b.half_h
    ey = s * b.half_w + c * b.half_h
    return (b.x - ex, b.y - ey, b.x + ex, b.y + ey)


def _is_projectile(b) -> bool:
    return b.kind is Kind.BIRD or b.kind is Kind.PROJECTILE


def detect_contacts(space: Space) -> list[tuple[Body, Body, list]]:
    """Contact manifolds for every pair that involves an active body,
    ordered by (min id, max id)."""
    margin = space.physics.contact_margin
    live = sorted((b for b in space.bodies if b.alive), key=lambda b: b.id)
    boxes = {b.id: _aabb(b) for b in live}
    pairs = []
    for i, a in enumerate(live):
        ba = boxes[a.id]
        for b in live[i + 1:]:
            if not (a.active or b.active):
                continue
            if _is_projectile(a) and _is_projectile(b):
                continue
            bb = boxes[b.id]
            if ba[0] > bb[2] + margin or bb[0] > ba[2] + margin or ba[1] > bb[3] + margin or bb[1] > ba[3] + margin:
                continue
            pts = collide(a, b, margin)
            if pts:
                pairs.append((a, b, pts))
    return pairs


def contacts(space: Space) -> list[Contact]:
    """Flattened view of the current contacts (diagnostics and tests)."""
    out = []
    for a, b, pts in detect_contacts(space):
        for nx, ny, px, py, pen in pts:
            out.append(Contact(a.id, b.id, Point2(px, py), (nx, ny), pen))
    return out


def _threshold(b: Body) -> float:
    if b.kind is Kind.GROUND:
        return INF
    return b.material.damage_threshold


def _apply(a, b, row, px, py):
    rax, ray, rbx, rby = row[4], row[5], row[6], row[7]
    ima, imb = a.inv_mass, b.inv_mass
    a.vx -= px * ima
    a.vy -= py * ima
    a.w -= a.inv_inertia * (rax * py - ray * px)
    b.vx += px * imb
    b.vy += py * imb
    b.w += b.inv_inertia * (rbx * py - rby * px)


def _rel_velocity(a, b, row):
    rax, ray, rbx, rby = row[4], row[5], row[6], row[7]
    return (b.vx - b.w * rby - a.vx + a.w * ray,
            b.vy + b.w * rbx - a.vy - a.w * rax)


def _solve_friction(a, b, mu, row):
    kt = row[9]
    if kt <= 0.0:
        return
    dvx, dvy = _rel_velocity(a, b, row)
    vt = dvx * row[2] + dvy * row[3]
    limit = mu * row[11]
    jt = row[12]
    new_jt = min(max(jt - vt / kt, -limit), limit)
    row[12] = new_jt
    dj = new_jt - jt
    _apply(a, b, row, dj * row[2], dj * row[3])


def _solve_normal(a, b, row):
    dvx, dvy = _rel_velocity(a, b, row)
    vn = dvx * row[0] + dvy * row[1]
    jn = row[11]
    new_jn = max(jn + (row[10] - vn) / row[8], 0.0)
    row[11] = new_jn
    dj = new_jn - jn
    _apply(a, b, row, dj * row[0], dj * row[1])


def _solve_block(a, b, rows) -> bool:
    """Solve both normal impulses of a two-point manifold together
    (2x2 mixed LCP by case enumeration). False if the system is ill-conditioned."""
    r1, r2 = rows
    nx, ny = r1[0], r1[1]
    ima, imb, iia, iib = a.inv_mass, b.inv_mass, a.inv_inertia, b.inv_inertia
    rn1a = r1[4] * ny - r1[5] * nx
    rn1b = r1[6] * ny - r1[7] * nx
    rn2a = r2[4] * ny - r2[5] * nx
    rn2b = r2[6] * ny - r2[7] * nx
    k11, k22 = r1[8], r2[8]
    k12 = ima + imb + iia * rn1a * rn2a + iib * rn1b * rn2b
    det = k11 * k22 - k12 * k12
    if not k11 * k11 < 1000.0 * det:
        return False
    a1, a2 = r1[11], r2[11]
    v1 = _rel_velocity(a, b, r1)
    v2 = _rel_velocity(a, b, r2)
    b1 = v1[0] * nx + v1[1] * ny - r1[10] - (k11 * a1 + k12 * a2)
    b2 = v2[0] * nx + v2[1] * ny - r2[10] - (k12 * a1 + k22 * a2)
    x1 = -(k22 * b1 - k12 * b2) / det
    x2 = -(k11 * b2 - k12 * b1) / det
    if not (x1 >= 0.0 and x2 >= 0.0):
        x1, x2 = -b1 / k11, 0.0
        if not (x1 >= 0.0 and k12 * x1 + b2 >= 0.0):
            x1, x2 = 0.0, -b2 / k22
            if not (x2 >= 0.0 and k12 * x2 + b1 >= 0.0):
                x1 = x2 = 0.0
                if not (b1 >= 0.0 and b2 >= 0.0):
                    return False
    d1, d2 = x1 - a1, x2 - a2
    r1[11], r2[11] = x1, x2
    _apply(a, b, r1, d1 * nx, d1 * ny)
    _apply(a, b, r2, d2 * nx, d2 * ny)
    return True


def step(space: Space, dt: float | None = None) -> StepEvents:
    cfg = space.physics
    if dt is None:
        dt = cfg.dt
    if dt <= 0:
        raise ValueError("dt must be positive")
    space.ground  # structural check: exactly one ground
    gx, gy = space.gravity
    events = StepEvents()

    # (1) integrate active bodies, semi-implicit Euler
    for b in space.bodies:
        if b.alive and b.active and b.inv_mass > 0.0:
            b.vx += gx * dt
            b.vy += gy * dt
            b.x += b.vx * dt
            b.y += b.vy * dt
            b.angle += b.w * dt

    # (2) detect
    manifolds = detect_contacts(space)

    # (3) activation spreads from active bodies to held ones
    for a, b, _ in manifolds:
        if a.active != b.active:
            held = b if a.active else a
            if held.kind is not Kind.GROUND and not held.active:
                held.active = True
                events.activated.append(held.id)

    # (4) resolve
    solver = []
    for a, b, pts in manifolds:
        if not (a.active or a.kind is Kind.GROUND) or not (b.active or b.kind is Kind.GROUND):
            continue
        e = min(a.material.restitution, b.material.restitution)
        mu = math.sqrt(a.material.friction * b.material.friction)
        ima, imb, iia, iib = a.inv_mass, b.inv_mass, a.inv_inertia, b.inv_inertia
        if ima + imb == 0.0:
            continue
        rows = []
        for nx, ny, px, py, pen in pts:
            rax, ray = px - a.x, py - a.y
            rbx, rby = px - b.x, py - b.y
            rna = rax * ny - ray * nx
            rnb = rbx * ny - rby * nx
            kn = ima + imb + iia * rna * rna + iib * rnb * rnb
            tx, ty = -ny, nx
            rta = rax * ty - ray * tx
            rtb = rbx * ty - rby * tx
            kt = ima + imb + iia * rta * rta + iib * rtb * rtb
            dvx = b.vx - b.w * rby - a.vx + a.w * ray
            dvy = b.vy + b.w * rbx - a.vy - a.w * rax
            vn0 = dvx * nx + dvy * ny
            target = -e * vn0 if vn0 < -cfg.bounce_threshold else 0.0
            rows.append([nx, ny, tx, ty, rax, ray, rbx, rby, kn, kt, target, 0.0, 0.0, pen, px, py])
        solver.append((a, b, mu, rows))

    # warm start from last step's impulses at matching contact points
    warm = space.warm_impulses
    for a, b, mu, rows in solver:
        old = warm.get((a.id, b.id))
        if not old:
            continue
        for row in rows:
            for ox, oy, jn, jt in old:
                if abs(ox - row[14]) < WARM_MATCH and abs(oy - row[15]) < WARM_MATCH:
                    row[11], row[12] = jn, jt
                    _apply(a, b, row, jn * row[0] + jt * row[2], jn * row[1] + jt * row[3])
                    break

    for _ in range(cfg.solver_passes):
        for a, b, mu, rows in solver:
            if mu > 0.0:
                for row in rows:
                    _solve_friction(a, b, mu, row)
            if len(rows) == 2 and _solve_block(a, b, rows):
                continue
            for row in rows:
                _solve_normal(a, b, row)

    # positional projection, point by point, tracking the pose change so far
    start = {}
    for a, b, mu, rows in solver:
        for body in (a, b):
            if body.id not in start:
                start[body.id] = (body.x, body.y, body.angle)
    for a, b, mu, rows in solver:
        ima, imb, iia, iib = a.inv_mass, b.inv_mass, a.inv_inertia, b.inv_inertia
        for row in rows:
            pen = row[13]
            if pen <= 0.0:
                continue
            nx, ny, rax, ray, rbx, rby = row[0], row[1], row[4], row[5], row[6], row[7]
            sa, sb = start[a.id], start[b.id]
            dta, dtb = a.angle - sa[2], b.angle - sb[2]
            moved = ((b.x - sb[0] - dtb * rby - a.x + sa[0] + dta * ray) * nx
                     + (b.y - sb[1] + dtb * rbx - a.y + sa[1] - dta * rax) * ny)
            remaining = pen - moved
            if remaining <= 0.0:
                continue
            lam = cfg.projection * remaining / row[8]
            px, py = lam * nx, lam * ny
            a.x -= px * ima
            a.y -= py * ima
            a.angle -= iia * (rax * py - ray * px)
            b.x += px * imb
            b.y += py * imb
            b.angle += iib * (rbx * py - rby * px)

    for a, b, mu, rows in solver:
        damp = 1.0 - cfg.rolling_damping
        if a.is_circle:
            a.w *= damp
        if b.is_circle:
            b.w *= damp

    # (5) damage, (6) destruction
    space.warm_impulses = {(a.id, b.id): [(r[14], r[15], r[11], r[12]) for r in rows]
                           for a, b, mu, rows in solver}

    for a, b, mu, rows in solver:
        impulse = sum(row[11] for row in rows)
        events.collisions.append((a.id, b.id, impulse))
        for body in (a, b):
            if _is_projectile(body):
                body.touched = True
            body_thr = _threshold(body)
            if impulse > body_thr:
                body.damage += impulse - body_thr
    for b in space.bodies:
        if b.alive and b.damage >= b.material.health:
            b.damage = b.material.health
            b.alive = False
            events.destroyed.append(b.id)

    space.time += dt
    space.steps += 1
    _update_quiet(space)
    return events


def _update_quiet(space: Space) -> None:
    cfg = space.physics
    v2 = cfg.v_sleep * cfg.v_sleep
    for b in space.bodies:
        if b.alive and b.active and (b.vx * b.vx + b.vy * b.vy >= v2 or abs(b.w) >= cfg.w_sleep):
            space.quiet_frames = 0
            return
    space.quiet_frames += 1


def is_settled(space: Space) -> bool:
    if not any(b.alive and b.active for b in space.bodies):
        return True
    return space.quiet_frames >= space.physics.sleep_frames


def apply_radial_impulse(space: Space, center, radius: float, strength: float, exclude=()) -> StepEvents:
    """Push every live body near ``center`` outward with linear falloff.

    A body sitting exactly on the center is pushed straight up.
    """
    if radius <= 0 or strength <= 0:
        raise ValueError("radius and strength must be positive")
    cx, cy = center[0], center[1]
    events = StepEvents()
    for b in sorted(space.bodies, key=lambda b: b.id):
        if not b.alive or b.kind is Kind.GROUND or b.id in exclude:
            continue
        dx, dy = b.x - cx, b.y - cy
        d = math.hypot(dx, dy)
        if d >= radius:
            continue
        j = strength * (1.0 - d / radius)
        ux, uy = (dx / d, dy / d) if d > 0.0 else (0.0, 1.0)
        b.vx += j * ux * b.inv_mass
        b.vy += j * uy * b.inv_mass
        if not b.active:
            b.active = True
            events.activated.append(b.id)
        events.collisions.append((b.id, b.id, j))
        b.damage += space.physics.blast_damage_scale * j
        if b.damage >= b.material.health:
            b.damage = b.material.health
            b.alive = False
            events.destroyed.append(b.id)
    return events


def kinetic_energy(space: Space) -> float:
    total = 0.0
    for b in space.bodies:
        if b.alive and b.inv_mass > 0.0:
            total += 0.5 * b.mass * (b.vx * b.vx + b.vy * b.vy) + 0.5 * b.w * b.w / b.inv_inertia
    return total


def mechanical_energy(space: Space) -> float:
    """Kinetic plus gravitational potential energy of live dynamic bodies."""
    gx, gy = space.gravity
    pot = 0.0
    for b in space.bodies:
        if b.alive and b.inv_mass > 0.0:
            pot -= b.mass * (gx * b.x + gy * b.y)
    return kinetic_energy(space) + pot


def state_digest(space: Space) -> int:
    """64-bit hash over every body's full dynamic state."""
    h = hashlib.blake2b(digest_size=8)
    for b in sorted(space.bodies, key=lambda b: b.id):
        h.update(struct.pack("<q6d d??", b.id, b.x, b.y, b.angle, b.vx, b.vy, b.w, b.damage, b.active, b.alive))
    h.update(struct.pack("<dq", space.time, space.steps))
    return int.from_bytes(h.digest(), "little")
