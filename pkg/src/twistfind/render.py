"""Deterministic SVG figures: the set, the disks B, B' and D, and a certificate's shape.

Output depends only on the inputs; numbers are printed with fixed precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .geometry import Point
from .planar import PlanarSet, Rect
from .search import ShapeCertificate

LAYERS = ("set", "disks", "vertices", "edges", "axes")

VERTEX_LABELS = {
    "isosceles_triangle": ("O", "p", "f(p)"),
    "right_triangle": ("O", "p", "g(p)"),
    "isosceles_trapezoid": ("p", "f(p)", "R⁻¹f(p)", "R⁻¹p"),
}
ANGLE_LABELS = {"isosceles_triangle": "φ(r)", "right_triangle": "φ(r)/2",
                "isosceles_trapezoid": "ψ(r)"}


@dataclass(frozen=True)
class PlotSpec:
    viewport: Rect | None = None
    width_px: int = 800
    stroke: float = 1.0
    layers: frozenset[str] = field(default_factory=lambda: frozenset(LAYERS))
    set_resolution: int = 200

    def __post_init__(self) -> None:
        unknown = set(self.layers) - set(LAYERS)
        if unknown:
            raise ValueError(f"unknown layer(s) {sorted(unknown)}")
        if self.width_px < 1 or self.set_resolution < 1:
            raise ValueError("width_px and set_resolution must be positive")


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def default_viewport(s: PlanarSet, cert: ShapeCertificate | None) -> Rect:
    if cert is None:
        ext = s.extent
        if ext is None:
            raise ValueError("no viewport given and the set has no window")
        return ext
    ctx = cert.context
    A, O = Point(*ctx["A"]), Point(*ctx["O"])
    eps, C = ctx["epsilon"], ctx["C"]
    xs = [A.x - eps, A.x + eps, O.x - C, O.x + C] + [v.x for v in cert.vertices]
    ys = [A.y - eps, A.y + eps, O.y - C, O.y + C] + [v.y for v in cert.vertices]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    pad = 0.05 * max(w, h)
    return Rect(Point(min(xs) - pad, min(ys) - pad), Point(max(xs) + pad, max(ys) + pad))


class _Canvas:
    def __init__(self, view: Rect, width_px: int):
        self.view = view
        self.scale = width_px / view.width
        self.width = width_px
        self.height = max(1, round(view.height * self.scale))

    def xy(self, p: Point) -> tuple[str, str]:
        return _fmt((p.x - self.view.min.x) * self.scale), _fmt((self.view.max.y - p.y) * self.scale)

    def length(self, r: float) -> str:
        return _fmt(r * self.scale)


def _set_layer(s: PlanarSet, cv: _Canvas, resolution: int) -> list[str]:
    """Member cells of a resolution-wide sampling grid, merged into horizontal runs."""
    v = cv.view
    nx = resolution
    ny = max(1, round(resolution * v.height / v.width))
    hx, hy = v.width / nx, v.height / ny
    xs = v.min.x + (np.arange(nx) + 0.5) * hx
    ys = v.max.y - (np.arange(ny) + 0.5) * hy
    inside = s.contains_xy(xs[None, :], ys[:, None])
    out = ['<g id="set" fill="#c9d6e8" stroke="none">']
    for j in range(ny):
        row = np.concatenate([[False], inside[j], [False]])
        edges = np.flatnonzero(row[1:] != row[:-1])
        for a, b in zip(edges[::2], edges[1::2]):
            out.append(
                f'<rect x="{_fmt(a * hx * cv.scale)}" y="{_fmt(j * hy * cv.scale)}" '
                f'width="{_fmt((b - a) * hx * cv.scale)}" height="{_fmt(hy * cv.scale)}"/>'
            )
    out.append("</g>")
    return out


def _label(cv: _Canvas, p: Point, text: str, dx: int = 6, dy: int = -6) -> str:
    x, y = cv.xy(p)
    return (f'<text x="{x}" y="{y}" dx="{dx}" dy="{dy}" font-family="serif" '
            f'font-size="14">{escape(text)}</text>')


def render_svg(s: PlanarSet, cert: ShapeCertificate | None = None, spec: PlotSpec = PlotSpec()) -> str:
    view = spec.viewport or default_viewport(s, cert)
    if not (view.width > 0 and view.height > 0):
        raise ValueError("viewport must have positive area")
    cv = _Canvas(view, spec.width_px)
    sw = _fmt(spec.stroke)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cv.width}" height="{cv.height}" '
        f'viewBox="0 0 {cv.width} {cv.height}">',
        f'<rect id="background" x="0" y="0" width="{cv.width}" height="{cv.height}" fill="white"/>',
    ]
    if "set" in spec.layers:
        parts += _set_layer(s, cv, spec.set_resolution)

    ctx = cert.context if cert is not None else None
    if ctx is not None:
        A, O = Point(*ctx["A"]), Point(*ctx["O"])
        eps, C = ctx["epsilon"], ctx["C"]
        if "disks" in spec.layers:
            parts.append(f'<g id="disks" fill="none" stroke="black" stroke-width="{sw}">')
            for name, center, radius, dash in (("D", O, C, ""), ("B", A, eps, ""),
                                               ("B′", A, eps / 2, ' stroke-dasharray="4 3"')):
                x, y = cv.xy(center)
                parts.append(f'<circle class="disk" cx="{x}" cy="{y}" r="{cv.length(radius)}"{dash}/>')
                edge = Point(center.x + radius / math.sqrt(2), center.y + radius / math.sqrt(2))
                parts.append(_label(cv, edge, name))
            parts.append("</g>")
        if "axes" in spec.layers:
            (x0, y0), (x1, y1) = cv.xy(O), cv.xy(A)
            parts.append(f'<g id="axes" stroke="#555" stroke-width="{sw}">')
            parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
            mid = Point((O.x + A.x) / 2, (O.y + A.y) / 2)
            parts.append(_label(cv, mid, "d", 0, 14))
            parts.append("</g>")
        if "edges" in spec.layers:
            verts = cert.vertices
            parts.append(f'<g id="edges" fill="none" stroke="#b03030" stroke-width="{sw}">')
            for i, a in enumerate(verts):
                b = verts[(i + 1) % len(verts)]
                (ax, ay), (bx, by) = cv.xy(a), cv.xy(b)
                parts.append(f'<path class="shape-edge" d="M {ax} {ay} L {bx} {by}"/>')
            parts.append("</g>")
        if "vertices" in spec.layers:
            parts.append('<g id="vertices" fill="black">')
            labels = VERTEX_LABELS.get(cert.kind, ())
            named = list(zip(cert.vertices, labels))
            if cert.kind == "isosceles_trapezoid":
                named.append((O, "O"))
            named.append((A, "A"))
            for p, text in named:
                x, y = cv.xy(p)
                parts.append(f'<circle class="vertex" cx="{x}" cy="{y}" r="2"/>')
                parts.append(_label(cv, p, text))
            p0 = cert.vertices[1] if cert.kind != "isosceles_trapezoid" else cert.vertices[0]
            direction = math.atan2(p0.y - O.y, p0.x - O.x)
            reach = 0.15 * math.hypot(p0.x - O.x, p0.y - O.y)
            spot = Point(O.x + reach * math.cos(direction), O.y + reach * math.sin(direction))
            parts.append(_label(cv, spot, ANGLE_LABELS.get(cert.kind, ""), 4, -10))
            parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
