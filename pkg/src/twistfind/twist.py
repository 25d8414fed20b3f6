"""Radius-dependent rotations ("twist maps") and the unit-area constructions built on them.

A twist map fixes every circle about the origin and rotates it by an angle that
depends only on the radius. With ``sin(angle(r)) = 2*area/r**2`` the triangle
``(0, p, f(p))`` has the prescribed area for every admissible ``p``, and the map
is area preserving because it moves points along circles.

The rotation is evaluated from ``sin`` and ``cos`` of the angle directly, so no
arcsin/cos round trip enters the vertex coordinates. Scalar and array paths
share ``_rotate`` and give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, InvalidRatio
from .geometry import ORIGIN, Point, Quadrilateral, Triangle

# r_min = sqrt(2 * effective_area) * (1 + DOMAIN_GUARD)
DOMAIN_GUARD = 1e-12


@dataclass(frozen=True)
class TwistParams:
    area: float = 1.0
    ratio: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.area) and self.area > 0):
            raise ValueError(f"target area must be positive, got {self.area}")
        if self.ratio is not None and not (math.isfinite(self.ratio) and self.ratio > 1):
            raise InvalidRatio(f"ratio R must exceed 1, got {self.ratio}")


@dataclass(frozen=True)
class AngleFunction:
    """``phi`` (triangles) or ``psi`` (trapezoids, needs ``params.ratio``).

    Both have the form ``arcsin(2 * k / r**2)``; ``k`` is the area for ``phi``
    and ``area * R**2 / (R**2 - 1)`` for ``psi``.
    """

    kind: Literal["phi", "psi"]
    params: TwistParams = TwistParams()

    def __post_init__(self) -> None:
        if self.kind not in ("phi", "psi"):
            raise ValueError(f"unknown angle function {self.kind!r}")
        if self.kind == "psi" and self.params.ratio is None:
            raise InvalidRatio("psi needs a ratio R > 1")

    @property
    def effective_area(self) -> float:
        a = self.params.area
        if self.kind == "phi":
            return a
        R2 = self.params.ratio**2
        return a * R2 / (R2 - 1.0)

    @property
    def r_min(self) -> float:
        return math.sqrt(2.0 * self.effective_area) * (1.0 + DOMAIN_GUARD)

    def check(self, r: float) -> None:
        if not (r > self.r_min):
            raise DomainError(f"radius {r!r} not above {self.kind} domain bound {self.r_min!r}")

    def sin(self, r: float) -> float:
        self.check(r)
        return 2.0 * self.effective_area / (r * r)

    def __call__(self, r: float) -> float:
        return math.asin(self.sin(r))


def phi_function(area: float = 1.0) -> AngleFunction:
    return AngleFunction("phi", TwistParams(area))


def psi_function(params: TwistParams) -> AngleFunction:
    return AngleFunction("psi", params)


def phi(r: float, area: float = 1.0) -> float:
    """arcsin(2*area/r**2), defined for r > sqrt(2*area)."""
    return phi_function(area)(r)


def psi(r: float, params: TwistParams) -> float:
    """arcsin(R**2/(R**2-1) * 2*area/r**2)."""
    if params.ratio is None:
        raise InvalidRatio("psi needs a ratio R > 1")
    return psi_function(params)(r)


def _rotate(x, y, k, sign=1.0):
    """Rotate (x, y) about the origin by +-arcsin(2k/r^2). Works on floats and arrays."""
    s = sign * (2.0 * k) / (x * x + y * y)
    c = np.sqrt((1.0 - s) * (1.0 + s))
    return x * c - y * s, x * s + y * c


def _radius(p: Point) -> float:
    return math.hypot(p.x, p.y)


def twist_f(p: Point, angle_fn: AngleFunction | None = None) -> Point:
    """Rotate ``p`` about the origin by ``angle_fn(|p|)``; the radius is kept."""
    fn = angle_fn or phi_function()
    fn.check(_radius(p))
    x, y = _rotate(p.x, p.y, fn.effective_area)
    return Point(float(x), float(y))


def twist_f_inverse(p: Point, angle_fn: AngleFunction | None = None) -> Point:
    fn = angle_fn or phi_function()
    fn.check(_radius(p))
    x, y = _rotate(p.x, p.y, fn.effective_area, sign=-1.0)
    return Point(float(x), float(y))


def twist_arrays(x: np.ndarray, y: np.ndarray, angle_fn: AngleFunction) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``twist_f``; raises DomainError if any point is inside the domain bound."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size and not np.all(np.hypot(x, y) > angle_fn.r_min):
        raise DomainError(f"points inside {angle_fn.kind} domain bound {angle_fn.r_min!r}")
    return _rotate(x, y, angle_fn.effective_area)


def midpoint_arrays(x: np.ndarray, y: np.ndarray, area: float) -> tuple[np.ndarray, np.ndarray]:
    fx, fy = twist_arrays(x, y, phi_function(area))
    return (x + fx) / 2.0, (y + fy) / 2.0


def midpoint_g(p: Point, area: float = 1.0) -> Point:
    """(p + f(p)) / 2; equals radius r*cos(phi/2) at angle theta + phi/2."""
    f = twist_f(p, phi_function(area))
    return Point((p.x + f.x) / 2.0, (p.y + f.y) / 2.0)


def jacobian_g(r: float, area: float = 1.0) -> float:
    """Jacobian determinant of ``midpoint_g`` at radius ``r``.

    cos^2(phi/2) + area * sin(phi) / sqrt(r^4 - 4 area^2). For area 1 this is the
    familiar cos^2(phi/2) + sin(phi)/sqrt(r^4 - 4).
    """
    fn = phi_function(area)
    s = fn.sin(r)
    c = math.sqrt((1.0 - s) * (1.0 + s))
    r2 = r * r
    root = math.sqrt((r2 - 2.0 * area) * (r2 + 2.0 * area))
    return (1.0 + c) / 2.0 + area * s / root


def chord_length(r: float, area: float = 1.0) -> float:
    """|p - f(p)| = 2 r sin(phi/2), evaluated without cancellation."""
    s = phi_function(area).sin(r)
    c = math.sqrt((1.0 - s) * (1.0 + s))
    return 2.0 * r * s / math.sqrt(2.0 * (1.0 + c))


def isosceles_vertices(p: Point, area: float = 1.0) -> Triangle:
    """(O, p, f(p)): isosceles at O, area ``area``."""
    return Triangle(ORIGIN, p, twist_f(p, phi_function(area)))


def right_vertices(p: Point, area: float = 1.0) -> Triangle:
    """(O, p, g(p)) with g taken at doubled area, so the triangle has area ``area``.

    The right angle sits at the third vertex.
    """
    return Triangle(ORIGIN, p, midpoint_g(p, 2.0 * area))


def trapezoid_vertices(p: Point, params: TwistParams) -> Quadrilateral:
    """(p, f(p), f(p)/R, p/R) under psi; an isosceles trapezoid of area ``params.area``."""
    if params.ratio is None:
        raise InvalidRatio("trapezoid construction needs a ratio R > 1")
    R = params.ratio
    f = twist_f(p, psi_function(params))
    return Quadrilateral(p, f, Point(f.x / R, f.y / R), Point(p.x / R, p.y / R))
