"""Membership-testable planar sets: a union/difference scene of primitives or a raster mask.

Primitives are closed (boundary points are members). A ``PlanarSet`` may carry
a clip window, the finite observable part of a possibly unbounded set; points
outside the window are never members.

Disk measures are estimated by counting sample points: cell centers for masks,
and for scenes a lattice of ``cells_per_radius`` cells per radius placed so the
disk center sits on a cell corner.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .errors import InvalidRatio, ResolutionTooCoarse
from .geometry import Point

DEFAULT_CELLS_PER_RADIUS = 24
DEFAULT_RASTER_CAP = 10**8


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def contains_xy(self, x, y):
        dx = x - self.center.x
        dy = y - self.center.y
        return dx * dx + dy * dy <= self.radius * self.radius

    def anchors(self) -> list[Point]:
        return [self.center]

    def scaled(self, k: float) -> Disk:
        return Disk(self.center * k, self.radius * k)

    def transformed(self, c: float, s: float, t: Point) -> Disk:
        return Disk(_rot(self.center, c, s) + t, self.radius)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned closed rectangle ``min <= p <= max``."""

    min: Point
    max: Point

    def __post_init__(self) -> None:
        if not (self.max.x > self.min.x and self.max.y > self.min.y):
            raise ValueError("rectangle must have positive extent")

    def contains_xy(self, x, y):
        return (x >= self.min.x) & (x <= self.max.x) & (y >= self.min.y) & (y <= self.max.y)

    def anchors(self) -> list[Point]:
        return [Point((self.min.x + self.max.x) / 2, (self.min.y + self.max.y) / 2)]

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    @property
    def corners(self) -> list[Point]:
        return [self.min, Point(self.max.x, self.min.y), self.max, Point(self.min.x, self.max.y)]

    def scaled(self, k: float) -> Rect:
        if k <= 0:
            raise ValueError("rectangles scale by positive factors only")
        return Rect(self.min * k, self.max * k)

    def transformed(self, c: float, s: float, t: Point) -> Rect:
        if s != 0 or c != 1:
            raise ValueError("axis-aligned rectangles only admit translations")
        return Rect(self.min + t, self.max + t)


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane ``normal . p <= offset``."""

    normal: Point
    offset: float

    def __post_init__(self) -> None:
        if self.normal.x == 0 and self.normal.y == 0:
            raise ValueError("half-plane normal must be nonzero")

    def contains_xy(self, x, y):
        return self.normal.x * x + self.normal.y * y <= self.offset

    def anchors(self) -> list[Point]:
        return []

    def scaled(self, k: float) -> HalfPlane:
        return HalfPlane(self.normal, self.offset * k)

    def transformed(self, c: float, s: float, t: Point) -> HalfPlane:
        n = _rot(self.normal, c, s)
        return HalfPlane(n, self.offset + n.x * t.x + n.y * t.y)


@dataclass(frozen=True)
class PointRow:
    """``count`` closed dots of radius ``dot_radius`` at ``start + k*step``."""

    start: Point
    step: Point
    count: int
    dot_radius: float

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("point_row count must be positive")
        if not self.dot_radius > 0:
            raise ValueError("dot_radius must be positive")
        if self.step.x == 0 and self.step.y == 0:
            raise ValueError("point_row step must be nonzero")

    def contains_xy(self, x, y):
        sx, sy = self.step.x, self.step.y
        dx = x - self.start.x
        dy = y - self.start.y
        k = np.clip(np.rint((dx * sx + dy * sy) / (sx * sx + sy * sy)), 0, self.count - 1)
        ex = dx - k * sx
        ey = dy - k * sy
        return ex * ex + ey * ey <= self.dot_radius * self.dot_radius

    def anchors(self) -> list[Point]:
        return [Point(self.start.x + k * self.step.x, self.start.y + k * self.step.y) for k in range(self.count)]

    def scaled(self, k: float) -> PointRow:
        return PointRow(self.start * k, self.step * k, self.count, self.dot_radius * k)

    def transformed(self, c: float, s: float, t: Point) -> PointRow:
        return PointRow(_rot(self.start, c, s) + t, _rot(self.step, c, s), self.count, self.dot_radius)


Primitive = Union[Disk, Rect, HalfPlane, PointRow]


def _rot(p: Point, c: float, s: float) -> Point:
    return Point(c * p.x - s * p.y, s * p.x + c * p.y)


def _any(prims: Iterable[Primitive], x, y):
    out = np.zeros(np.broadcast(x, y).shape, dtype=bool)
    for prim in prims:
        out |= prim.contains_xy(x, y)
    return out


@dataclass(frozen=True)
class Scene:
    primitives: tuple[Primitive, ...]
    subtract: tuple[Primitive, ...] = ()

    def contains_xy(self, x, y):
        inside = _any(self.primitives, x, y)
        if self.subtract:
            inside &= ~_any(self.subtract, x, y)
        return inside

    def anchors(self) -> list[Point]:
        return [a for prim in self.primitives for a in prim.anchors()]

    def scaled(self, k: float) -> Scene:
        """The scene k*S."""
        return Scene(tuple(p.scaled(k) for p in self.primitives), tuple(p.scaled(k) for p in self.subtract))

    def transformed(self, angle: float, translation: Point) -> Scene:
        c, s = math.cos(angle), math.sin(angle)
        return Scene(
            tuple(p.transformed(c, s, translation) for p in self.primitives),
            tuple(p.transformed(c, s, translation) for p in self.subtract),
        )


@dataclass(frozen=True, eq=False)
class RasterMask:
    """Boolean grid; ``bits[j, i]`` is the cell centered at ``origin + (i*cell, j*cell)``.

    Row ``j`` grows with ``y``.
    """

    origin: Point
    cell: float
    bits: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.cell > 0:
            raise ValueError("cell size must be positive")
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError("mask must be a non-empty 2-D grid")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def measure(self) -> float:
        return int(self.bits.sum()) * self.cell * self.cell

    @property
    def extent(self) -> Rect:
        h = self.cell
        return Rect(
            Point(self.origin.x - h / 2, self.origin.y - h / 2),
            Point(self.origin.x + (self.width - 0.5) * h, self.origin.y + (self.height - 0.5) * h),
        )

    def cell_index(self, x, y):
        i = np.floor((np.asarray(x) - self.origin.x) / self.cell + 0.5).astype(np.int64)
        j = np.floor((np.asarray(y) - self.origin.y) / self.cell + 0.5).astype(np.int64)
        return i, j

    def bit(self, i, j):
        i = np.asarray(i)
        j = np.asarray(j)
        ok = (i >= 0) & (i < self.width) & (j >= 0) & (j < self.height)
        out = np.zeros(np.broadcast(i, j).shape, dtype=bool)
        out[ok] = self.bits[np.broadcast_to(j, ok.shape)[ok], np.broadcast_to(i, ok.shape)[ok]]
        return out

    def contains_xy(self, x, y):
        i, j = self.cell_index(x, y)
        return self.bit(i, j)

    def cell_center(self, i, j):
        return self.origin.x + np.asarray(i) * self.cell, self.origin.y + np.asarray(j) * self.cell

    def digest(self) -> str:
        return hashlib.sha256(np.packbits(self.bits).tobytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class PlanarSet:
    """Exactly one of ``scene`` or ``mask``, optionally clipped to ``window``."""

    scene: Scene | None = None
    mask: RasterMask | None = None
    window: Rect | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if (self.scene is None) == (self.mask is None):
            raise ValueError("a PlanarSet holds exactly one of scene or mask")

    def contains_xy(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        rep = self.scene if self.scene is not None else self.mask
        inside = rep.contains_xy(x, y)
        if self.window is not None:
            inside = inside & self.window.contains_xy(x, y)
        return np.asarray(inside, dtype=bool)

    @property
    def extent(self) -> Rect | None:
        """Bounding rectangle of everything that can be a member, if known."""
        if self.mask is not None:
            ext = self.mask.extent
            if self.window is None:
                return ext
            lo = Point(max(ext.min.x, self.window.min.x), max(ext.min.y, self.window.min.y))
            hi = Point(min(ext.max.x, self.window.max.x), min(ext.max.y, self.window.max.y))
            return Rect(lo, hi) if hi.x > lo.x and hi.y > lo.y else None
        return self.window

    def anchors(self) -> list[Point]:
        return self.scene.anchors() if self.scene is not None else []

    def descriptor(self) -> dict:
        """JSON-able description used for provenance hashing."""
        from .io import scene_to_dict, rect_to_dict

        if self.scene is not None:
            d = scene_to_dict(self.scene)
        else:
            m = self.mask
            d = {"mask": {"origin": m.origin.as_list(), "cell": m.cell, "width": m.width,
                          "height": m.height, "sha256": m.digest()}}
        if self.window is not None:
            d["window"] = rect_to_dict(self.window)
        return d


def contains(s: PlanarSet, p: Point) -> bool:
    return bool(s.contains_xy(p.x, p.y))


@lru_cache(maxsize=32)
def _unit_disk_offsets(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Half-integer lattice points strictly inside the disk of radius n, scaled by 1/n."""
    k = np.arange(-n, n) + 0.5
    X, Y = np.meshgrid(k, k)
    keep = X * X + Y * Y < n * n
    ox, oy = X[keep] / n, Y[keep] / n
    ox.setflags(write=False)
    oy.setflags(write=False)
    return ox, oy


def disk_samples(center: Point, radius: float, cells_per_radius: int = DEFAULT_CELLS_PER_RADIUS):
    """Sample points of the disk and the cell side they represent."""
    ox, oy = _unit_disk_offsets(int(cells_per_radius))
    return center.x + radius * ox, center.y + radius * oy, radius / cells_per_radius


def _mask_disk_cells(mask: RasterMask, center: Point, radius: float):
    """Cell indices of every (virtual) cell whose center lies strictly inside the disk."""
    h = mask.cell
    i0 = math.ceil((center.x - radius - mask.origin.x) / h)
    i1 = math.floor((center.x + radius - mask.origin.x) / h)
    j0 = math.ceil((center.y - radius - mask.origin.y) / h)
    j1 = math.floor((center.y + radius - mask.origin.y) / h)
    if i1 < i0 or j1 < j0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    I, J = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1))
    cx, cy = mask.cell_center(I, J)
    keep = (cx - center.x) ** 2 + (cy - center.y) ** 2 < radius * radius
    return I[keep], J[keep]


def _disk_counts(s: PlanarSet, center: Point, radius: float, cells_per_radius: int):
    """(member samples, total samples, cell side) over the disk."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    if s.mask is not None:
        I, J = _mask_disk_cells(s.mask, center, radius)
        cx, cy = s.mask.cell_center(I, J)
        members = s.mask.bit(I, J)
        if s.window is not None:
            members &= s.window.contains_xy(cx, cy)
        return int(members.sum()), int(I.size), s.mask.cell
    x, y, h = disk_samples(center, radius, cells_per_radius)
    return int(s.contains_xy(x, y).sum()), int(x.size), h


def measure_in_disk(s: PlanarSet, center: Point, radius: float,
                    cells_per_radius: int = DEFAULT_CELLS_PER_RADIUS) -> float:
    """Estimate of mu(B(center, radius) intersected with S): member cell count times cell area."""
    members, _, h = _disk_counts(s, center, radius, cells_per_radius)
    return members * h * h


def density(s: PlanarSet, center: Point, radius: float,
            cells_per_radius: int = DEFAULT_CELLS_PER_RADIUS) -> float:
    """Fraction of the disk's sample points that are members.

    Numerator and denominator use the same samples, so a set covering the disk
    has density exactly 1. A disk smaller than one mask cell falls back to the
    membership of its center.
    """
    members, total, _ = _disk_counts(s, center, radius, cells_per_radius)
    if total == 0:
        return 1.0 if contains(s, center) else 0.0
    return members / total


def density_many(s: PlanarSet, cx: np.ndarray, cy: np.ndarray, radius: float,
                 cells_per_radius: int = DEFAULT_CELLS_PER_RADIUS, chunk: int = 1 << 22) -> np.ndarray:
    """``density`` at many centers for a scene; masks fall back to a loop."""
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    if s.mask is not None:
        return np.array([density(s, Point(x, y), radius, cells_per_radius) for x, y in zip(cx, cy)])
    ox, oy = _unit_disk_offsets(int(cells_per_radius))
    out = np.empty(cx.size)
    per = max(1, chunk // ox.size)
    for start in range(0, cx.size, per):
        sl = slice(start, start + per)
        X = cx[sl, None] + radius * ox[None, :]
        Y = cy[sl, None] + radius * oy[None, :]
        out[sl] = s.contains_xy(X, Y).sum(axis=1) / ox.size
    return out


def scale_membership(s: PlanarSet, p: Point, R: float) -> bool:
    """p in R*S, i.e. p/R in S."""
    if not R > 0:
        raise ValueError("scale factor must be positive")
    return contains(s, Point(p.x / R, p.y / R))


def s_r_contains(s: PlanarSet, p: Point, R: float) -> bool:
    """p in S_R = S intersected with R*S."""
    if not R > 1:
        raise InvalidRatio(f"R must exceed 1, got {R}")
    return contains(s, p) and scale_membership(s, p, R)


def s_r_contains_xy(s: PlanarSet, x, y, R: float, center: Point = Point(0.0, 0.0)):
    """Vectorized S_R membership with the scaling taken about ``center``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx = center.x + (x - center.x) / R
    sy = center.y + (y - center.y) / R
    return s.contains_xy(x, y) & s.contains_xy(sx, sy)


def _cells_along(length: float, h: float) -> int:
    return max(0, math.ceil(length / h - 1e-9))


def rasterize(scene: Scene, window: Rect, h: float, cap: int = DEFAULT_RASTER_CAP) -> RasterMask:
    """Sample ``scene`` at the centers of an ``h``-grid anchored at the window's min corner."""
    if not h > 0:
        raise ValueError("cell size must be positive")
    width = _cells_along(window.width, h)
    height = _cells_along(window.height, h)
    if width * height == 0:
        raise ResolutionTooCoarse("raster would have no cells")
    if width * height > cap:
        raise ResolutionTooCoarse(f"CapExceeded: {width}x{height} cells exceeds cap {cap}")
    origin = Point(window.min.x + h / 2, window.min.y + h / 2)
    xs = origin.x + np.arange(width) * h
    bits = np.empty((height, width), dtype=bool)
    rows = max(1, (1 << 22) // width)
    for j0 in range(0, height, rows):
        j1 = min(height, j0 + rows)
        ys = origin.y + np.arange(j0, j1) * h
        bits[j0:j1] = scene.contains_xy(xs[None, :], ys[:, None])
    return RasterMask(origin, h, bits)
