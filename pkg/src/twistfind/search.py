"""The three constructions end to end: locate anchors, scan B' for a point whose
twisted image also lands in the set, and emit a certificate that is re-checked
using only ``geometry`` predicates.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Literal

import numpy as np

from .errors import ContainmentViolated, DomainError, HypothesisNotMet, ImageNeverLands, InputError
from .geometry import (
    DEFAULT_TOLERANCE,
    Point,
    Quadrilateral,
    Tolerance,
    Triangle,
    is_isosceles,
    is_isosceles_trapezoid,
    is_right_angled,
    shoelace_area,
    side_lengths,
    is_self_intersecting,
)
from .locator import (
    LocatorConfig,
    SearchContext,
    build_frame,
    choose_R,
    disk_sample_points,
    find_density_point,
    find_far_point,
    s_r_fraction,
)
from .planar import PlanarSet, density
from .twist import (
    TwistParams,
    isosceles_vertices,
    midpoint_arrays,
    phi_function,
    psi_function,
    right_vertices,
    trapezoid_vertices,
    twist_arrays,
)

Kind = Literal["isosceles_triangle", "right_triangle", "isosceles_trapezoid"]
KINDS: tuple[str, ...] = ("isosceles_triangle", "right_triangle", "isosceles_trapezoid")
SHAPE_TO_KIND = {"isosceles": "isosceles_triangle", "right": "right_triangle", "trapezoid": "isosceles_trapezoid"}


@dataclass(frozen=True)
class ShapeCertificate:
    kind: str
    vertices: tuple[Point, ...]
    target_area: float
    measured_area: float
    side_lengths: tuple[float, ...]
    tolerance: Tolerance
    context: dict[str, Any]
    config_hash: str
    provenance: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "vertices": [v.as_list() for v in self.vertices],
            "target_area": self.target_area,
            "measured_area": self.measured_area,
            "side_lengths": list(self.side_lengths),
            "tolerance": self.tolerance.to_dict(),
            "context": self.context,
            "config_hash": self.config_hash,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ShapeCertificate:
        try:
            tol = d["tolerance"]
            return cls(
                kind=d["kind"],
                vertices=tuple(Point(x, y) for x, y in d["vertices"]),
                target_area=float(d["target_area"]),
                measured_area=float(d["measured_area"]),
                side_lengths=tuple(float(v) for v in d["side_lengths"]),
                tolerance=Tolerance(float(tol["abs_tol"]), float(tol["rel_tol"])),
                context=dict(d["context"]),
                config_hash=str(d["config_hash"]),
                provenance=dict(d.get("provenance", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"certificate: {exc}") from None


@dataclass(frozen=True)
class Failure:
    kind: str
    message: str
    diagnostics: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SearchOutcome:
    certificate: ShapeCertificate | None = None
    failure: Failure | None = None

    def __post_init__(self) -> None:
        if (self.certificate is None) == (self.failure is None):
            raise ValueError("exactly one of certificate or failure must be set")

    @property
    def ok(self) -> bool:
        return self.certificate is not None

    def failure_dict(self) -> dict[str, Any]:
        assert self.failure is not None
        return {"failure": self.failure.kind, "message": self.failure.message,
                "diagnostics": self.failure.diagnostics}


@dataclass(frozen=True)
class Verification:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _area_ok(measured: float, target: float, tol: Tolerance) -> bool:
    return abs(measured - target) <= tol.abs_tol + tol.rel_tol * abs(target)


def verify_certificate(cert: ShapeCertificate, s: PlanarSet) -> Verification:
    """Recheck membership, area and the shape predicate from the raw vertices."""
    reasons: list[str] = []
    expected = 4 if cert.kind == "isosceles_trapezoid" else 3
    if cert.kind not in KINDS:
        return Verification(False, (f"unknown kind {cert.kind!r}",))
    if len(cert.vertices) != expected:
        return Verification(False, (f"expected {expected} vertices, got {len(cert.vertices)}",))
    tol = cert.tolerance
    v = cert.vertices

    if not all(bool(s.contains_xy(p.x, p.y)) for p in v):
        reasons.append("membership")

    if cert.kind == "isosceles_trapezoid" and is_self_intersecting(Quadrilateral(*v)):
        return Verification(False, tuple(reasons + ["self-intersecting"]))
    area = shoelace_area(v)
    if not (_area_ok(area, cert.target_area, tol) and _area_ok(cert.measured_area, area, tol)):
        reasons.append("area mismatch")

    lengths = side_lengths(v)
    if len(cert.side_lengths) != len(lengths) or not all(
        tol.close(a, b) for a, b in zip(lengths, cert.side_lengths)
    ):
        reasons.append("side lengths")

    if cert.kind == "isosceles_triangle":
        shape_ok = any(is_isosceles(Triangle(*v), k, tol) for k in range(3))
    elif cert.kind == "right_triangle":
        t = Triangle(*v)
        shape_ok = area >= tol.abs_tol and any(is_right_angled(t, k, tol) for k in range(3))
    else:
        shape_ok = is_isosceles_trapezoid(Quadrilateral(*v), tol)
    if not shape_ok:
        reasons.append(f"not an {cert.kind.replace('_', ' ')}")
    return Verification(not reasons, tuple(reasons))


def config_hash(kind: str, area: float, cfg: LocatorConfig, tol: Tolerance, s: PlanarSet) -> str:
    payload = {"kind": kind, "area": area, "locator": cfg.to_dict(), "tolerance": tol.to_dict(),
               "set": s.descriptor()}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _check_constants(kind: str, area: float, cfg: LocatorConfig) -> float:
    """Effective area of the twist used, after checking C keeps f(B') inside B."""
    if not (math.isfinite(area) and area > 0):
        raise InputError(f"area must be positive, got {area}")
    if kind == "isosceles_trapezoid":
        R = min(cfg.R_schedule)
        eff = area * R * R / (R * R - 1)
    else:
        eff = area
    # chord < pi*eff/r and r > C/eps, so the image stays within eps/2 of p iff C > 2*pi*eff
    if not cfg.C > 2 * math.pi * eff:
        raise InputError(f"C={cfg.C} too small for area {area}: need C > 2*pi*{eff:g}")
    if kind == "right_triangle" and not cfg.C * cfg.C * math.sin(math.pi / 4) > 4 * area:
        raise InputError(f"C={cfg.C} too small for the Jacobian bound at area {area}")
    return eff


def _scan_points(s: PlanarSet, ctx: SearchContext, cfg: LocatorConfig):
    """Points of B' ordered by distance to A, then lexicographically."""
    A, half = ctx.A, ctx.epsilon / 2
    if s.mask is not None:
        x, y = disk_sample_points(s, A, half, cfg.cells_per_radius)
    else:
        h = ctx.epsilon / cfg.scan_cells_per_epsilon
        n = math.ceil(half / h)
        k = np.arange(-n, n + 1) * h
        X, Y = np.meshgrid(k, k)
        keep = X * X + Y * Y < half * half
        x, y = A.x + X[keep], A.y + Y[keep]
    order = np.lexsort((y, x, np.hypot(x - A.x, y - A.y)))
    return x[order], y[order]


def _frame_vertices(kind: str, px, py, area: float, R: float | None):
    """In-frame vertices (excluding O) for arrays of in-frame scan points; image is index 1."""
    if kind == "isosceles_triangle":
        fx, fy = twist_arrays(px, py, phi_function(area))
        return [(px, py), (fx, fy)]
    if kind == "right_triangle":
        gx, gy = midpoint_arrays(px, py, 2.0 * area)
        return [(px, py), (gx, gy)]
    fx, fy = twist_arrays(px, py, psi_function(TwistParams(area, R)))
    return [(px, py), (fx, fy), (fx / R, fy / R), (px / R, py / R)]


def _scalar_shape(kind: str, p: Point, area: float, R: float | None):
    if kind == "isosceles_triangle":
        return isosceles_vertices(p, area).vertices
    if kind == "right_triangle":
        return right_vertices(p, area).vertices
    return trapezoid_vertices(p, TwistParams(area, R)).vertices


def _missing_bound(kind: str) -> float:
    return 1.0 / 9.0 if kind == "right_triangle" else 1.0 / 8.0


def _run(kind: str, s: PlanarSet, area: float, cfg: LocatorConfig, tol: Tolerance) -> SearchOutcome:
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    _check_constants(kind, area, cfg)
    trapezoid = kind == "isosceles_trapezoid"
    try:
        dp = find_density_point(s, cfg)
        fp = find_far_point(s, dp.A, dp.epsilon, cfg, require_full_density=trapezoid)
        frame = build_frame(fp.O, dp.A)
        d = math.hypot(dp.A.x - fp.O.x, dp.A.y - fp.O.y)
        ctx = SearchContext(dp.A, dp.epsilon, fp.O, d, frame, cfg.C, None, dp.density, fp.density,
                            fp.full_density)
        ctx.validate()
        if trapezoid:
            ctx = replace(ctx, chosen_R=choose_R(s, ctx, cfg))
        return _scan(kind, s, area, cfg, tol, ctx)
    except HypothesisNotMet as exc:
        return SearchOutcome(failure=Failure(exc.kind, str(exc), exc.diagnostics))
    except DomainError as exc:
        return SearchOutcome(failure=Failure("DomainError", str(exc)))


def _scan(kind: str, s: PlanarSet, area: float, cfg: LocatorConfig, tol: Tolerance,
          ctx: SearchContext) -> SearchOutcome:
    R = ctx.chosen_R
    frame = ctx.frame
    qx, qy = _scan_points(s, ctx, cfg)
    px, py = frame.apply_xy(qx, qy)
    world = [frame.invert_xy(x, y) for x, y in _frame_vertices(kind, px, py, area, R)]

    image_x, image_y = world[1]
    reach = np.hypot(image_x - ctx.A.x, image_y - ctx.A.y)
    if reach.size and not np.all(reach < ctx.epsilon):
        raise ContainmentViolated(f"image left B: max |f(p) - A| = {reach.max()!r}, eps = {ctx.epsilon!r}")

    hits = np.ones(qx.size, dtype=bool)
    for wx, wy in world:
        hits &= s.contains_xy(wx, wy)

    chash = config_hash(kind, area, cfg, tol, s)
    provenance = {
        "window": s.descriptor().get("window"),
        "density_threshold": cfg.density_threshold,
        "full_density_proxy": {"delta": ctx.epsilon * cfg.finest_delta_fraction,
                               "threshold": cfg.full_density, "met_at_O": ctx.O_full_density},
        "trapezoid_threshold": cfg.trapezoid_threshold if kind == "isosceles_trapezoid" else None,
    }
    for k in np.nonzero(hits)[0]:
        p = Point(px[k], py[k])
        in_frame = _scalar_shape(kind, p, area, R)
        verts = tuple(frame.invert(v) for v in in_frame)
        measured = shoelace_area(verts)
        cert = ShapeCertificate(
            kind=kind,
            vertices=verts,
            target_area=area,
            measured_area=measured,
            side_lengths=tuple(side_lengths(verts)),
            tolerance=tol,
            context=ctx.summary(),
            config_hash=chash,
            provenance=provenance,
        )
        if verify_certificate(cert, s):
            return SearchOutcome(certificate=cert)

    if kind == "isosceles_trapezoid":
        present = s_r_fraction(s, ctx, R, cfg.cells_per_radius)
    else:
        present = density(s, ctx.A, ctx.epsilon, cfg.cells_per_radius)
    mu_B = math.pi * ctx.epsilon**2
    diagnostics = {
        "scanned": int(qx.size),
        "image_hits": int(hits.sum()),
        "mu_B": mu_B,
        "mu_B_minus_S_estimate": (1.0 - present) * mu_B,
        "contradiction_bound": _missing_bound(kind) * mu_B,
        "context": ctx.summary(),
    }
    raise ImageNeverLands("no scanned point of B' has its image in the set", diagnostics)


def find_isosceles_triangle(s: PlanarSet, area: float = 1.0, cfg: LocatorConfig = LocatorConfig(),
                            tol: Tolerance = DEFAULT_TOLERANCE) -> SearchOutcome:
    """Vertices (O, p, f(p)) with p in B' and f(p) in B, all in the set."""
    return _run("isosceles_triangle", s, area, cfg, tol)


def find_right_triangle(s: PlanarSet, area: float = 1.0, cfg: LocatorConfig = LocatorConfig(),
                        tol: Tolerance = DEFAULT_TOLERANCE) -> SearchOutcome:
    """Vertices (O, p, g(p)); the right angle is at g(p)."""
    return _run("right_triangle", s, area, cfg, tol)


def find_isosceles_trapezoid(s: PlanarSet, area: float = 1.0, cfg: LocatorConfig = LocatorConfig(),
                             tol: Tolerance = DEFAULT_TOLERANCE) -> SearchOutcome:
    """Vertices (p, f(p), f(p)/R, p/R) with scaling about O, p and f(p) in S_R."""
    return _run("isosceles_trapezoid", s, area, cfg, tol)


def find_shape(shape: str, s: PlanarSet, area: float = 1.0, cfg: LocatorConfig = LocatorConfig(),
               tol: Tolerance = DEFAULT_TOLERANCE) -> SearchOutcome:
    kind = SHAPE_TO_KIND.get(shape, shape)
    return _run(kind, s, area, cfg, tol)
