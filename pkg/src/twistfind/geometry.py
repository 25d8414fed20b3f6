"""Planar primitives and the predicates used to certify constructed shapes.

Areas, dot and cross products are evaluated exactly on the stored binary64
coordinates (via ``fractions.Fraction``) and rounded once, so the only error in
a reported area is the representation error of the vertices themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import Degenerate, OriginNotRepresentable, SelfIntersecting

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Point:
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> Point:
        return Point(self.x / k, self.y / k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_list(self) -> list[float]:
        return [self.x, self.y]


ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True)
class PolarPoint:
    """Polar coordinates; ``theta`` is normalized into [0, 2*pi) on construction."""

    r: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"polar radius must be positive, got {self.r}")
        if not math.isfinite(self.theta):
            raise ValueError("polar angle must be finite")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class Tolerance:
    """``abs_tol`` is in length (or area) units, ``rel_tol`` is dimensionless.

    Angle-like tests (parallelism, perpendicularity) compare a normalized
    sine/cosine against ``rel_tol``.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("abs_tol and rel_tol cannot both be zero")

    def close(self, a: float, b: float) -> bool:
        return abs(a - b) <= self.abs_tol + self.rel_tol * max(abs(a), abs(b))

    def to_dict(self) -> dict[str, float]:
        return {"abs_tol": self.abs_tol, "rel_tol": self.rel_tol}


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class Triangle:
    a: Point
    b: Point
    c: Point

    @property
    def vertices(self) -> tuple[Point, Point, Point]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class Quadrilateral:
    """Four vertices in boundary order."""

    v0: Point
    v1: Point
    v2: Point
    v3: Point

    @property
    def vertices(self) -> tuple[Point, Point, Point, Point]:
        return (self.v0, self.v1, self.v2, self.v3)


def normalize_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod of a tiny negative angle can round up to exactly 2*pi
    if t >= TWO_PI:
        t = 0.0
    return t


def distance(p: Point, q: Point) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def to_polar(p: Point) -> PolarPoint:
    if p.x == 0.0 and p.y == 0.0:
        raise OriginNotRepresentable("the origin has no polar angle")
    return PolarPoint(math.hypot(p.x, p.y), math.atan2(p.y, p.x))


def from_polar(q: PolarPoint) -> Point:
    return Point(q.r * math.cos(q.theta), q.r * math.sin(q.theta))


def _exact_cross(o: Point, a: Point, b: Point) -> Fraction:
    """(a - o) x (b - o), exact."""
    ox, oy = Fraction(o.x), Fraction(o.y)
    return (Fraction(a.x) - ox) * (Fraction(b.y) - oy) - (Fraction(a.y) - oy) * (Fraction(b.x) - ox)


def _exact_dot(o: Point, a: Point, b: Point) -> Fraction:
    """(a - o) . (b - o), exact."""
    ox, oy = Fraction(o.x), Fraction(o.y)
    return (Fraction(a.x) - ox) * (Fraction(b.x) - ox) + (Fraction(a.y) - oy) * (Fraction(b.y) - oy)


def _exact_edge_cross(a0: Point, a1: Point, b0: Point, b1: Point) -> Fraction:
    """(a1 - a0) x (b1 - b0), exact."""
    ux = Fraction(a1.x) - Fraction(a0.x)
    uy = Fraction(a1.y) - Fraction(a0.y)
    vx = Fraction(b1.x) - Fraction(b0.x)
    vy = Fraction(b1.y) - Fraction(b0.y)
    return ux * vy - uy * vx


def shoelace_area(vertices: Sequence[Point]) -> float:
    """Unsigned polygon area, exact shoelace sum rounded once."""
    n = len(vertices)
    total = Fraction(0)
    for i in range(n):
        p, q = vertices[i], vertices[(i + 1) % n]
        total += Fraction(p.x) * Fraction(q.y) - Fraction(q.x) * Fraction(p.y)
    return float(abs(total) / 2)


def triangle_area(t: Triangle) -> float:
    return shoelace_area(t.vertices)


def _orientation(o: Point, a: Point, b: Point) -> int:
    c = _exact_cross(o, a, b)
    return (c > 0) - (c < 0)


def _segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    # proper crossings only; touching and collinear overlap count as degenerate
    d1 = _orientation(q1, q2, p1)
    d2 = _orientation(q1, q2, p2)
    d3 = _orientation(p1, p2, q1)
    d4 = _orientation(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def is_self_intersecting(q: Quadrilateral) -> bool:
    v = q.vertices
    return _segments_cross(v[0], v[1], v[2], v[3]) or _segments_cross(v[1], v[2], v[3], v[0])


def quad_area(q: Quadrilateral) -> float:
    if is_self_intersecting(q):
        raise SelfIntersecting("quadrilateral boundary crosses itself")
    return shoelace_area(q.vertices)


def _check_index(index: int, n: int) -> None:
    if not 0 <= index < n:
        raise IndexError(f"vertex index {index} out of range for {n} vertices")


def is_isosceles(t: Triangle, apex: int, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    _check_index(apex, 3)
    v = t.vertices
    top = v[apex]
    left, right = v[(apex + 1) % 3], v[(apex + 2) % 3]
    return tol.close(distance(top, left), distance(top, right))


def right_angle_cosine(t: Triangle, corner: int) -> float:
    """|cos| of the interior angle at ``corner``; zero for an exact right angle."""
    _check_index(corner, 3)
    v = t.vertices
    c = v[corner]
    a, b = v[(corner + 1) % 3], v[(corner + 2) % 3]
    la, lb = distance(c, a), distance(c, b)
    if la == 0 or lb == 0:
        return 1.0
    return abs(float(_exact_dot(c, a, b))) / (la * lb)


def is_right_angled(t: Triangle, corner: int, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Right angle at ``corner``: |u.v| <= rel_tol * |u| * |v|."""
    if triangle_area(t) < tol.abs_tol:
        raise Degenerate("triangle area below abs_tol")
    return right_angle_cosine(t, corner) <= tol.rel_tol


def _sine_between(a0: Point, a1: Point, b0: Point, b1: Point) -> float:
    la, lb = distance(a0, a1), distance(b0, b1)
    if la == 0 or lb == 0:
        return 0.0
    return abs(float(_exact_edge_cross(a0, a1, b0, b1))) / (la * lb)


def is_isosceles_trapezoid(q: Quadrilateral, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """One pair of opposite sides parallel with distinct lengths, legs of equal length.

    Parallelograms are excluded. Near-degenerate candidates (a vertex collinear
    with its neighbours, or a zero-length side) return False instead of raising.
    """
    if is_self_intersecting(q):
        raise SelfIntersecting("quadrilateral boundary crosses itself")
    v = q.vertices
    sides = [(v[i], v[(i + 1) % 4]) for i in range(4)]
    lengths = [distance(a, b) for a, b in sides]
    if min(lengths) <= tol.abs_tol:
        return False
    for i in range(4):
        prev_side, next_side = sides[i - 1], sides[i]
        if _sine_between(*prev_side, *next_side) <= tol.rel_tol:
            return False

    parallel = [_sine_between(*sides[i], *sides[i + 2]) <= tol.rel_tol for i in (0, 1)]
    if parallel[0] == parallel[1]:
        return False
    bases = (0, 2) if parallel[0] else (1, 3)
    legs = (1, 3) if parallel[0] else (0, 2)
    if tol.close(lengths[bases[0]], lengths[bases[1]]):
        return False
    return tol.close(lengths[legs[0]], lengths[legs[1]])


def side_lengths(vertices: Sequence[Point]) -> list[float]:
    n = len(vertices)
    return [distance(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
