"""Anchor data for the constructions: a dense point A with radius eps, a far point O,
the frame putting O at the origin and A on the positive x-axis, and the scale R.

Every scan has a fixed order, so identical inputs give identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, NamedTuple

import numpy as np

from .errors import CoincidentPoints, InputError, NoAdmissibleR, NoDensityPoint, NoFarPoint
from .geometry import Point
from .planar import (
    DEFAULT_CELLS_PER_RADIUS,
    Disk,
    PlanarSet,
    Rect,
    _mask_disk_cells,
    contains,
    density,
    density_many,
    disk_samples,
    s_r_contains_xy,
)


def _default_R_schedule() -> tuple[float, ...]:
    return tuple(float(2**k) for k in range(7, 21))


@dataclass(frozen=True)
class LocatorConfig:
    C: float = 100.0
    density_threshold: float = 0.9
    epsilon_schedule: tuple[float, ...] = (0.5, 0.25, 0.1, 0.05)
    sample_grid_step: float = 0.5
    trapezoid_threshold: float = 8.0 / 9.0
    R_schedule: tuple[float, ...] = field(default_factory=_default_R_schedule)
    # full-density proxy at O: density >= full_density at eps * min(delta_fractions)
    full_density: float = 0.99
    delta_fractions: tuple[float, ...] = (1.0, 0.25, 0.0625)
    cells_per_radius: int = DEFAULT_CELLS_PER_RADIUS
    candidate_cap: int = 4096
    scan_cells_per_epsilon: int = 100

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon_schedule", tuple(float(e) for e in self.epsilon_schedule))
        object.__setattr__(self, "R_schedule", tuple(float(r) for r in self.R_schedule))
        object.__setattr__(self, "delta_fractions", tuple(float(r) for r in self.delta_fractions))
        if not self.C > 0:
            raise ValueError("C must be positive")
        for name in ("density_threshold", "trapezoid_threshold", "full_density"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        eps = self.epsilon_schedule
        if not eps or any(not 0 < e < 1 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilon_schedule must be a nonempty decreasing list in (0, 1)")
        Rs = self.R_schedule
        if not Rs or any(r <= 100 for r in Rs) or any(a >= b for a, b in zip(Rs, Rs[1:])):
            raise ValueError("R_schedule must be a nonempty increasing list of values above 100")
        if not self.delta_fractions or any(not 0 < f <= 1 for f in self.delta_fractions):
            raise ValueError("delta_fractions must be a nonempty list in (0, 1]")
        if not self.sample_grid_step > 0:
            raise ValueError("sample_grid_step must be positive")
        for name in ("cells_per_radius", "candidate_cap", "scan_cells_per_epsilon"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def finest_delta_fraction(self) -> float:
        return min(self.delta_fractions)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> LocatorConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"locator: unknown field(s) {sorted(unknown)}")
        kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise InputError(f"locator: {exc}") from None


@dataclass(frozen=True)
class Frame:
    """Isometry q -> rotation(q - origin) sending ``origin`` to (0, 0) and A to (d, 0).

    ``cos``/``sin`` are the direction of A as seen from the origin point.
    """

    origin: Point
    cos: float
    sin: float

    @property
    def translation(self) -> Point:
        return Point(-self.origin.x, -self.origin.y)

    @property
    def rotation(self) -> float:
        return -math.atan2(self.sin, self.cos)

    def apply_xy(self, x, y):
        dx = x - self.origin.x
        dy = y - self.origin.y
        return self.cos * dx + self.sin * dy, self.cos * dy - self.sin * dx

    def invert_xy(self, x, y):
        return self.origin.x + (self.cos * x - self.sin * y), self.origin.y + (self.sin * x + self.cos * y)

    def apply(self, p: Point) -> Point:
        x, y = self.apply_xy(p.x, p.y)
        return Point(x, y)

    def invert(self, p: Point) -> Point:
        x, y = self.invert_xy(p.x, p.y)
        return Point(x, y)

    def to_dict(self) -> dict[str, Any]:
        return {"translation": self.translation.as_list(), "rotation": self.rotation}


def build_frame(O: Point, A: Point) -> Frame:
    d = math.hypot(A.x - O.x, A.y - O.y)
    if d == 0:
        raise CoincidentPoints("O and A coincide")
    return Frame(O, (A.x - O.x) / d, (A.y - O.y) / d)


@dataclass(frozen=True)
class SearchContext:
    A: Point
    epsilon: float
    O: Point
    d: float
    frame: Frame
    C: float
    chosen_R: float | None = None
    density_at_A: float = float("nan")
    density_at_O: float = float("nan")
    O_full_density: bool = False

    @property
    def B(self) -> Disk:
        return Disk(self.A, self.epsilon)

    @property
    def B_prime(self) -> Disk:
        return Disk(self.A, self.epsilon / 2)

    @property
    def D(self) -> Disk:
        return Disk(self.O, self.C)

    def validate(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.d > self.C / self.epsilon + self.epsilon:
            raise ValueError("far point too close: need d > C/eps + eps")
        if not self.d - self.epsilon > self.C:
            raise ValueError("disks B and D intersect")

    def summary(self) -> dict[str, Any]:
        return {
            "A": self.A.as_list(),
            "epsilon": self.epsilon,
            "O": self.O.as_list(),
            "d": self.d,
            "C": self.C,
            "R": self.chosen_R,
            "frame": self.frame.to_dict(),
            "density_at_A": self.density_at_A,
            "density_at_O": self.density_at_O,
        }


class DensityPoint(NamedTuple):
    A: Point
    epsilon: float
    density: float


class FarPoint(NamedTuple):
    O: Point
    density: float
    full_density: bool


def _require_extent(s: PlanarSet) -> Rect:
    ext = s.extent
    if ext is None:
        raise InputError("the set has no window; give the scene a 'window' to bound the search")
    return ext


def _lexsort_xy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.lexsort((y, x))


def _candidates(s: PlanarSet, cfg: LocatorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Candidate density points: a lattice (or strided mask cells) plus scene anchors."""
    ext = _require_extent(s)
    if s.mask is not None:
        m = s.mask
        stride = max(1, math.ceil(math.sqrt(m.width * m.height / cfg.candidate_cap)))
        J, I = np.nonzero(m.bits[::stride, ::stride])
        x, y = m.cell_center(I * stride, J * stride)
    else:
        step = cfg.sample_grid_step
        while True:
            nx = math.floor(ext.width / step + 0.5)
            ny = math.floor(ext.height / step + 0.5)
            if max(nx, 1) * max(ny, 1) <= cfg.candidate_cap:
                break
            step *= 2
        xs = ext.min.x + step / 2 + step * np.arange(max(nx, 1))
        ys = ext.min.y + step / 2 + step * np.arange(max(ny, 1))
        X, Y = np.meshgrid(xs[xs <= ext.max.x], ys[ys <= ext.max.y])
        x, y = X.ravel(), Y.ravel()
        anchors = [a for a in s.anchors() if ext.contains_xy(a.x, a.y)]
        if anchors:
            x = np.concatenate([x, [a.x for a in anchors]])
            y = np.concatenate([y, [a.y for a in anchors]])
    keep = s.contains_xy(x, y)
    x, y = x[keep], y[keep]
    pts = np.unique(np.stack([x, y], axis=1), axis=0) if x.size else np.empty((0, 2))
    order = _lexsort_xy(pts[:, 0], pts[:, 1])
    return pts[order, 0], pts[order, 1]


def find_density_point(s: PlanarSet, cfg: LocatorConfig = LocatorConfig()) -> DensityPoint:
    """First scheduled eps for which some candidate A in S has density > threshold.

    Among qualifying candidates the densest wins, ties going to the
    lexicographically smallest (x, y).
    """
    cx, cy = _candidates(s, cfg)
    best_seen: dict[float, float] = {}
    for eps in cfg.epsilon_schedule:
        if cx.size == 0:
            break
        dens = density_many(s, cx, cy, eps, cfg.cells_per_radius)
        k = int(np.argmax(dens))
        best_seen[eps] = float(dens[k])
        if dens[k] > cfg.density_threshold:
            A = Point(cx[k], cy[k])
            value = density(s, A, eps, cfg.cells_per_radius)
            # re-evaluate through the scalar path rather than trusting the batch
            if value > cfg.density_threshold and contains(s, A):
                return DensityPoint(A, eps, value)
    raise NoDensityPoint(
        "no candidate reached the density threshold at any scheduled epsilon",
        {"candidates": int(cx.size), "best_density": best_seen, "threshold": cfg.density_threshold},
    )


def _ring_lattice(x0: float, y0: float, step: float, ext: Rect, A: Point, rho0: float, rho1: float):
    """Lattice points x0 + i*step, y0 + j*step inside ``ext`` with rho0 <= |p - A| < rho1."""
    j_lo = math.ceil((max(ext.min.y, A.y - rho1) - y0) / step)
    j_hi = math.floor((min(ext.max.y, A.y + rho1) - y0) / step)
    if j_hi < j_lo:
        return np.empty(0), np.empty(0)
    ys = y0 + step * np.arange(j_lo, j_hi + 1)
    dy2 = (ys - A.y) ** 2
    outer = np.sqrt(np.maximum(rho1 * rho1 - dy2, 0.0))
    inner = np.sqrt(np.maximum(rho0 * rho0 - dy2, 0.0))
    pieces_y, pieces_lo, pieces_hi = [], [], []
    for lo, hi in ((A.x - outer, A.x - inner), (A.x + inner, A.x + outer)):
        pieces_y.append(ys)
        pieces_lo.append(np.ceil((np.maximum(lo, ext.min.x) - x0) / step))
        pieces_hi.append(np.floor((np.minimum(hi, ext.max.x) - x0) / step))
    ry = np.concatenate(pieces_y)
    klo = np.concatenate(pieces_lo).astype(np.int64)
    khi = np.concatenate(pieces_hi).astype(np.int64)
    counts = np.maximum(khi - klo + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0), np.empty(0)
    starts = np.repeat(klo, counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    px = x0 + step * (starts + offsets)
    py = np.repeat(ry, counts)
    d = np.hypot(px - A.x, py - A.y)
    keep = (d >= rho0) & (d < rho1)
    pts = np.unique(np.stack([px[keep], py[keep]], axis=1), axis=0)
    return pts[:, 0], pts[:, 1]


def find_far_point(s: PlanarSet, A: Point, epsilon: float, cfg: LocatorConfig = LocatorConfig(),
                   require_full_density: bool = False) -> FarPoint:
    """Nearest member O with |O - A| > C/eps + eps, scanning outward in rings.

    Points passing the full-density proxy are preferred. With
    ``require_full_density`` only those qualify; otherwise, if none shows up
    before twice the required distance, the nearest member is used.
    """
    ext = _require_extent(s)
    need = cfg.C / epsilon + epsilon
    rho_max = max(math.hypot(c.x - A.x, c.y - A.y) for c in ext.corners)
    delta = epsilon * cfg.finest_delta_fraction
    diag: dict[str, Any] = {"required_distance": need, "window_reach": rho_max,
                            "members_seen": 0, "best_density": 0.0, "delta": delta,
                            "full_density": cfg.full_density}
    if rho_max <= need:
        raise NoFarPoint("window does not reach the required distance C/eps + eps", diag)

    if s.mask is not None:
        x0, y0, step = s.mask.origin.x, s.mask.origin.y, s.mask.cell
    else:
        step = cfg.sample_grid_step
        x0, y0 = ext.min.x + step / 2, ext.min.y + step / 2
    anchors = np.array([[a.x, a.y] for a in s.anchors()]).reshape(-1, 2)
    if anchors.size:
        anchor_d = np.hypot(anchors[:, 0] - A.x, anchors[:, 1] - A.y)

    width = max(4 * step, need / 64)
    fallback: FarPoint | None = None
    rho0 = need
    while rho0 < rho_max:
        rho1 = rho0 + width
        px, py = _ring_lattice(x0, y0, step, ext, A, rho0, rho1)
        if anchors.size:
            sel = (anchor_d >= rho0) & (anchor_d < rho1)
            px = np.concatenate([px, anchors[sel, 0]])
            py = np.concatenate([py, anchors[sel, 1]])
        dist = np.hypot(px - A.x, py - A.y)
        keep = (dist > need) & s.contains_xy(px, py)
        px, py, dist = px[keep], py[keep], dist[keep]
        if px.size:
            order = np.lexsort((py, px, dist))
            px, py = px[order], py[order]
            diag["members_seen"] += int(px.size)
            for start in range(0, px.size, 256):
                dens = density_many(s, px[start:start + 256], py[start:start + 256], delta, cfg.cells_per_radius)
                diag["best_density"] = max(diag["best_density"], float(dens.max()))
                if fallback is None:
                    fallback = FarPoint(Point(px[start], py[start]), float(dens[0]), bool(dens[0] >= cfg.full_density))
                hit = np.nonzero(dens >= cfg.full_density)[0]
                if hit.size:
                    k = start + int(hit[0])
                    return FarPoint(Point(px[k], py[k]), float(dens[hit[0]]), True)
        rho0 = rho1
        if not require_full_density and fallback is not None and rho0 > 2 * need:
            return fallback
    if not require_full_density and fallback is not None:
        return fallback
    raise NoFarPoint("window exhausted without a suitable far point", diag)


def disk_sample_points(s: PlanarSet, center: Point, radius: float, cells_per_radius: int):
    """Sample points of an open disk: virtual cell centers for masks, a lattice for scenes."""
    if s.mask is not None:
        I, J = _mask_disk_cells(s.mask, center, radius)
        return s.mask.cell_center(I, J)
    x, y, _ = disk_samples(center, radius, cells_per_radius)
    return x, y


def s_r_fraction(s: PlanarSet, ctx: SearchContext, R: float, cells_per_radius: int) -> float:
    """Estimated mu(B intersected with S_R) / mu(B), scaling about O."""
    x, y = disk_sample_points(s, ctx.A, ctx.epsilon, cells_per_radius)
    if x.size == 0:
        return 0.0
    return float(s_r_contains_xy(s, x, y, R, center=ctx.O).sum()) / x.size


def choose_R(s: PlanarSet, ctx: SearchContext, cfg: LocatorConfig = LocatorConfig()) -> float:
    """First R in the schedule with mu(B intersected with S_R)/mu(B) above the trapezoid threshold."""
    seen = {}
    for R in cfg.R_schedule:
        frac = s_r_fraction(s, ctx, R, cfg.cells_per_radius)
        seen[R] = frac
        if frac > cfg.trapezoid_threshold:
            return R
    raise NoAdmissibleR("no scheduled R gives S_R enough density in B",
                        {"fractions": {str(k): v for k, v in seen.items()},
                         "threshold": cfg.trapezoid_threshold})
