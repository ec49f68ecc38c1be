"""Rasterize scenes into class-indexed grids and read/write them as PGM/PPM.

World coordinates are y-up with one unit per pixel; images are row-down.
A pixel is painted when its center (col + 0.5, row + 0.5) falls inside a
shape, so axis-aligned integer boxes cover exactly w*h pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .physics import Kind

DEFAULT_WIDTH = 840
DEFAULT_HEIGHT = 480

BACKGROUND = 0
GROUND = 1
SLINGSHOT = 11
EGG = 12
MATERIAL_CLASS = {"wood": 2, "ice": 3, "stone": 4}
PIG = 5
BIRD_CLASS = {"red": 6, "yellow": 7, "blue": 8, "black": 9, "white": 10}

SLINGSHOT_HALF_WIDTH = 3.0
QUEUE_GAP = 18.0
QUEUE_OFFSET = 14.0


class ImageFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PaletteEntry:
    class_id: int
    kind: str
    material: str
    rgb: tuple


class Palette:
    def __init__(self, entries):
        self.entries = {e.class_id: e for e in entries}
        rgbs = [e.rgb for e in entries]
        if len(set(rgbs)) != len(rgbs) or len(self.entries) != len(entries):
            raise ValueError("palette must be bijective")
        self._by_rgb = {e.rgb: e.class_id for e in entries}

    def __contains__(self, class_id) -> bool:
        return class_id in self.entries

    def __getitem__(self, class_id) -> PaletteEntry:
        return self.entries[class_id]

    def class_of_rgb(self, rgb) -> int:
        return self._by_rgb[tuple(rgb)]

    def lut(self) -> np.ndarray:
        table = np.zeros((256, 3), dtype=np.uint8)
        for cid, e in self.entries.items():
            table[cid] = e.rgb
        return table


DEFAULT_PALETTE = Palette([
    PaletteEntry(BACKGROUND, "background", "", (200, 230, 255)),
    PaletteEntry(GROUND, "ground", "", (90, 140, 60)),
    PaletteEntry(2, "block", "wood", (170, 110, 50)),
    PaletteEntry(3, "block", "ice", (150, 220, 250)),
    PaletteEntry(4, "block", "stone", (120, 120, 130)),
    PaletteEntry(PIG, "pig", "pig", (80, 200, 60)),
    PaletteEntry(6, "bird", "red", (220, 30, 30)),
    PaletteEntry(7, "bird", "yellow", (250, 220, 0)),
    PaletteEntry(8, "bird", "blue", (40, 90, 230)),
    PaletteEntry(9, "bird", "black", (20, 20, 20)),
    PaletteEntry(10, "bird", "white", (250, 250, 250)),
    PaletteEntry(SLINGSHOT, "slingshot", "", (110, 60, 20)),
    PaletteEntry(EGG, "egg", "", (240, 240, 200)),
])


@dataclass
class PixelGrid:
    width: int
    height: int
    data: np.ndarray  # (height, width) uint8, row 0 at the top

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if self.data.shape != (self.height, self.width):
            raise ValueError(f"data shape {self.data.shape} does not match {self.height}x{self.width}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelGrid):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(self.data, other.data)

    def count(self, class_id: int) -> int:
        return int(np.count_nonzero(self.data == class_id))

    @classmethod
    def blank(cls, width: int, height: int) -> "PixelGrid":
        return cls(width, height, np.zeros((height, width), dtype=np.uint8))


def body_class(body) -> int:
    if body.kind is Kind.GROUND:
        return GROUND
    if body.kind is Kind.PIG:
        return PIG
    if body.kind is Kind.BIRD:
        return BIRD_CLASS[body.bird_type.value]
    if body.kind is Kind.PROJECTILE:
        return EGG
    return MATERIAL_CLASS[body.material.name]


def _window(data, height, x0, y0, x1, y1):
    """Pixel index ranges and world-space center coordinates covering a world box."""
    width = data.shape[1]
    c0 = max(int(math.floor(x0 - 0.5)), 0)
    c1 = min(int(math.ceil(x1 + 0.5)), width)
    r0 = max(int(math.floor(height - y1 - 0.5)), 0)
    r1 = min(int(math.ceil(height - y0 + 0.5)), height)
    if c0 >= c1 or r0 >= r1:
        return None
    xs = np.arange(c0, c1) + 0.5
    ys = height - (np.arange(r0, r1) + 0.5)
    return r0, r1, c0, c1, xs[None, :], ys[:, None]


def paint_circle(data, height, cx, cy, r, class_id):
    win = _window(data, height, cx - r, cy - r, cx + r, cy + r)
    if win is None:
        return
    r0, r1, c0, c1, xs, ys = win
    mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
    data[r0:r1, c0:c1][mask] = class_id


def paint_rect(data, height, cx, cy, hw, hh, angle, class_id):
    c, s = math.cos(angle), math.sin(angle)
    ex = abs(c) * hw + abs(s) * hh
    ey = abs(s) * hw + abs(c) * hh
    win = _window(data, height, cx - ex, cy - ey, cx + ex, cy + ey)
    if win is None:
        return
    r0, r1, c0, c1, xs, ys = win
    dx, dy = xs - cx, ys - cy
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    mask = (np.abs(lx) <= hw) & (np.abs(ly) <= hh)
    data[r0:r1, c0:c1][mask] = class_id


def queue_positions(scene) -> list[tuple[float, float, float]]:
    """Where waiting birds sit: left of the slingshot, next bird leftmost."""
    from .world import BIRD_RADIUS

    gy = scene.ground.top
    sx = scene.slingshot[0]
    n = len(scene.bird_queue)
    out = []
    for i, bt in enumerate(scene.bird_queue):
        r = BIRD_RADIUS[bt]
        out.append((sx - QUEUE_OFFSET - QUEUE_GAP * (n - 1 - i), gy + r, r))
    return out


def rasterize(scene, width: int = DEFAULT_WIDTH, height: int = DEFAULT_HEIGHT) -> PixelGrid:
    if width <= 0 or height <= 0:
        raise ValueError("viewport must be non-empty")
    data = np.zeros((height, width), dtype=np.uint8)
    gy = scene.ground.top
    centers = height - (np.arange(height) + 0.5)
    data[centers <= gy, :] = GROUND

    sx, sy = scene.slingshot
    if sy > gy:
        paint_rect(data, height, sx, (sy + gy) / 2, SLINGSHOT_HALF_WIDTH, (sy - gy) / 2, 0.0, SLINGSHOT)
    for (qx, qy, r), bt in zip(queue_positions(scene), scene.bird_queue):
        paint_circle(data, height, qx, qy, r, BIRD_CLASS[bt.value])

    for b in sorted(scene.bodies, key=lambda b: b.id):
        if not b.alive or b.kind is Kind.GROUND:
            continue
        cid = body_class(b)
        if b.is_circle:
            paint_circle(data, height, b.x, b.y, b.radius, cid)
        else:
            paint_rect(data, height, b.x, b.y, b.half_w, b.half_h, b.angle, cid)
    return PixelGrid(width, height, data)


# -- netpbm I/O ------------------------------------------------------------------

def _write_netpbm(path, magic: bytes, width: int, height: int, payload: bytes) -> None:
    header = magic + b"\n%d %d\n255\n" % (width, height)
    Path(path).write_bytes(header + payload)


def _read_netpbm(path, magic: bytes):
    raw = Path(path).read_bytes()
    pos = 0
    tokens = []
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace() and raw[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated header")
        tokens.append(raw[start:pos])
    if tokens[0] != magic:
        raise ImageFormatError(f"{path}: expected {magic.decode()} image, got {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError(f"{path}: malformed header") from None
    if width <= 0 or height <= 0 or maxval != 255:
        raise ImageFormatError(f"{path}: unsupported dimensions or maxval")
    pos += 1  # single whitespace byte ends the header
    return width, height, raw[pos:]


def write_classmap(grid: PixelGrid, path) -> None:
    """Binary PGM whose gray levels are the class ids."""
    _write_netpbm(path, b"P5", grid.width, grid.height, grid.data.tobytes())


def read_classmap(path, palette: Palette = DEFAULT_PALETTE) -> PixelGrid:
    width, height, body = _read_netpbm(path, b"P5")
    if len(body) != width * height:
        raise ImageFormatError(f"{path}: expected {width * height} pixel bytes, got {len(body)}")
    data = np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy()
    unknown = sorted(set(np.unique(data).tolist()) - set(palette.entries))
    if unknown:
        raise ImageFormatError(f"{path}: unknown class ids {unknown}")
    return PixelGrid(width, height, data)


def write_image(grid: PixelGrid, palette: Palette, path) -> None:
    """Binary PPM colored through the palette."""
    unknown = sorted(set(np.unique(grid.data).tolist()) - set(palette.entries))
    if unknown:
        raise ImageFormatError(f"grid holds class ids missing from the palette: {unknown}")
    rgb = palette.lut()[grid.data]
    _write_netpbm(path, b"P6", grid.width, grid.height, rgb.tobytes())


def read_image(path, palette: Palette = DEFAULT_PALETTE) -> PixelGrid:
    width, height, body = _read_netpbm(path, b"P6")
    if len(body) != width * height * 3:
        raise ImageFormatError(f"{path}: expected {width * height * 3} pixel bytes, got {len(body)}")
    rgb = np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)
    packed = (rgb[..., 0].astype(np.uint32) << 16) | (rgb[..., 1].astype(np.uint32) << 8) | rgb[..., 2]
    data = np.zeros((height, width), dtype=np.uint8)
    seen = np.zeros((height, width), dtype=bool)
    for cid, e in palette.entries.items():
        key = (e.rgb[0] << 16) | (e.rgb[1] << 8) | e.rgb[2]
        hit = packed == key
        data[hit] = cid
        seen |= hit
    if not seen.all():
        raise ImageFormatError(f"{path}: colors outside the palette")
    return PixelGrid(width, height, data)
