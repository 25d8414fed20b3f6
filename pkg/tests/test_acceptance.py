"""Acceptance suite: one group of checks per criterion, each at its stated tolerance.

The summary hook in conftest prints one PASS/FAIL line per criterion.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

import twistfind.search as search_mod
from twistfind import FIXTURES, fixture_path, load_fixture
from twistfind.cli import main
from twistfind.geometry import (
    ORIGIN,
    Point,
    PolarPoint,
    Quadrilateral,
    Triangle,
    from_polar,
    is_isosceles_trapezoid,
    quad_area,
    triangle_area,
)
from twistfind.planar import Disk, Rect, Scene, rasterize
from twistfind.search import (
    find_isosceles_trapezoid,
    find_isosceles_triangle,
    find_right_triangle,
    verify_certificate,
)
from twistfind.twist import (
    TwistParams,
    chord_length,
    jacobian_g,
    midpoint_g,
    phi,
    psi_function,
    twist_f,
)

SQ2 = math.sqrt(2)
R_LO = SQ2 * (1 + 1e-6)
R_HI = 1e4
FINDERS = {
    "isosceles_triangle": find_isosceles_triangle,
    "right_triangle": find_right_triangle,
    "isosceles_trapezoid": find_isosceles_trapezoid,
}
SHAPES = {"isosceles_triangle": "isosceles", "right_triangle": "right", "isosceles_trapezoid": "trapezoid"}
# "annulus-complement": the plane (windowed) with a disk-shaped hole, bundled as disk_minus_disk
THEOREM_FIXTURES = ("fullplane", "halfplane", "strip", "disk_minus_disk")


def _grid(n, lo, hi, seed):
    """n deterministic (r, theta) samples, r uniform on (lo, hi), theta uniform on [0, 2pi)."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(lo, hi, n)
    t = rng.uniform(0, 2 * math.pi, n)
    return [(float(a), float(b)) for a, b in zip(r, t)]


def _failures(items, limit=5):
    return f"{len(items)} failing samples, e.g. {items[:limit]}"


# 1 ------------------------------------------------------------------------------------


@pytest.mark.criterion(1, "isosceles area identity: area 1 within 1e-9 rel, equal sides within 1e-12*r, < 5 s")
def test_c1_isosceles_area_identity():
    start = time.perf_counter()
    bad_area, bad_side = [], []
    for r, theta in _grid(10_000, R_LO, R_HI, seed=1):
        p = from_polar(PolarPoint(r, theta))
        f = twist_f(p)
        area = triangle_area(Triangle(ORIGIN, p, f))
        if not abs(area - 1) <= 1e-9:
            bad_area.append((r, area))
        if not abs(math.hypot(p.x, p.y) - math.hypot(f.x, f.y)) <= 1e-12 * r:
            bad_side.append(r)
    elapsed = time.perf_counter() - start
    assert not bad_side, _failures(bad_side)
    assert not bad_area, _failures(bad_area)
    assert elapsed < 5, f"took {elapsed:.2f} s"


# 2 ------------------------------------------------------------------------------------


def _angle_deviation_at(c: Point, a: Point, b: Point) -> float:
    """|angle(a - c, b - c) - pi/2| from exact dot and cross products of the float vertices."""
    F = Fraction
    ux, uy = F(a.x) - F(c.x), F(a.y) - F(c.y)
    vx, vy = F(b.x) - F(c.x), F(b.y) - F(c.y)
    dot = ux * vx + uy * vy
    cross = ux * vy - uy * vx
    return abs(math.atan2(float(dot), abs(float(cross))))


@pytest.mark.criterion(2, "right-triangle identity: right angle at g(p) within 1e-9 rad, area within 1e-9 rel")
def test_c2_right_triangle_identity():
    area = 1.0
    bad_angle, bad_area = [], []
    # same sampling with the doubled-area domain bound sqrt(2 * 2 * area)
    for r, theta in _grid(10_000, math.sqrt(4 * area) * (1 + 1e-6), R_HI, seed=1):
        p = from_polar(PolarPoint(r, theta))
        g = midpoint_g(p, 2 * area)
        dev = _angle_deviation_at(g, ORIGIN, p)
        if not dev <= 1e-9:
            bad_angle.append((r, dev))
        a = triangle_area(Triangle(ORIGIN, p, g))
        if not abs(a - area) <= 1e-9 * area:
            bad_area.append((r, a))
    assert not bad_angle, _failures(bad_angle)
    assert not bad_area, _failures(bad_area)


# 3 ------------------------------------------------------------------------------------


C3 = "trapezoid identity: predicate and area 1 within 1e-9 rel for R in {2, 128, 1e4}; worked case within 1e-12"


@pytest.mark.criterion(3, C3)
def test_c3_worked_trapezoid():
    from twistfind.twist import trapezoid_vertices

    q = trapezoid_vertices(Point(2, 0), TwistParams(1, 2))
    # exact shoelace sum: 8/3 + 0 - 2/3 + 0 = 2
    assert abs(quad_area(q) - 1) <= 1e-12
    assert is_isosceles_trapezoid(q)


@pytest.mark.criterion(3, C3)
@pytest.mark.parametrize("R", [2.0, 128.0, 1e4])
def test_c3_trapezoid_identity(R):
    params = TwistParams(1.0, R)
    fn = psi_function(params)
    bad_shape, bad_area = [], []
    for r, theta in _grid(1000, fn.r_min * (1 + 1e-6), R_HI, seed=3):
        p = from_polar(PolarPoint(r, theta))
        f = twist_f(p, fn)
        q = Quadrilateral(p, f, Point(f.x / R, f.y / R), Point(p.x / R, p.y / R))
        if not is_isosceles_trapezoid(q):
            bad_shape.append(r)
        a = quad_area(q)
        if not abs(a - 1) <= 1e-9:
            bad_area.append((r, a))
    assert not bad_shape, _failures(bad_shape)
    assert not bad_area, _failures(bad_area)


# 4 ------------------------------------------------------------------------------------


def _fd_jacobian(fn, p: Point, step: float) -> float:
    fxp, fxm = fn(Point(p.x + step, p.y)), fn(Point(p.x - step, p.y))
    fyp, fym = fn(Point(p.x, p.y + step)), fn(Point(p.x, p.y - step))
    a = (fxp.x - fxm.x) / (2 * step)
    c = (fxp.y - fxm.y) / (2 * step)
    b = (fyp.x - fym.x) / (2 * step)
    d = (fyp.y - fym.y) / (2 * step)
    return a * d - b * c


def _jacobian_points(seed):
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(1.5), math.log(R_HI), 1000))
    t = rng.uniform(0, 2 * math.pi, 1000)
    return [from_polar(PolarPoint(float(a), float(b))) for a, b in zip(r, t)]


C4 = "Jacobian oracles: J_f = 1 and J_g = closed form within 1e-6; J_g > 4/5 when phi < pi/4"


@pytest.mark.criterion(4, C4)
def test_c4_jacobian_f():
    bad = []
    for p in _jacobian_points(4):
        r = math.hypot(p.x, p.y)
        j = _fd_jacobian(twist_f, p, 1e-5 * r)
        if not abs(j - 1) <= 1e-6:
            bad.append((r, j))
    assert not bad, _failures(bad)


@pytest.mark.criterion(4, C4)
def test_c4_jacobian_g():
    bad = []
    for p in _jacobian_points(5):
        r = math.hypot(p.x, p.y)
        j = _fd_jacobian(midpoint_g, p, 1e-5 * r)
        if not abs(j - jacobian_g(r)) <= 1e-6:
            bad.append((r, j, jacobian_g(r)))
    assert not bad, _failures(bad)


@pytest.mark.criterion(4, C4)
def test_c4_jacobian_g_bound():
    rng = np.random.default_rng(6)
    r_quarter = math.sqrt(2 / math.sin(math.pi / 4))
    rs = np.concatenate([rng.uniform(r_quarter * (1 + 1e-12), 10, 5000), rng.uniform(10, R_HI, 5000)])
    checked = 0
    for r in rs:
        if phi(r) < math.pi / 4:
            checked += 1
            assert jacobian_g(r) > 4 / 5, r
    assert checked > 9000


# 5 ------------------------------------------------------------------------------------


C5 = "chord bound chord_length(r, 1) < pi/r; containment |f(p) - A| < eps on every search run"


@pytest.mark.criterion(5, C5)
def test_c5_chord_bound():
    bad = [r for r, _ in _grid(10_000, R_LO, R_HI, seed=7) if not chord_length(r, 1.0) < math.pi / r]
    assert not bad, _failures(bad)


@pytest.mark.criterion(5, C5)
@pytest.mark.parametrize("kind", list(FINDERS))
def test_c5_containment_inline(kind, monkeypatch):
    """Every search run computes all images of B' and checks them against B before use."""
    seen = []
    real = search_mod._frame_vertices

    def spy(kind_, px, py, area, R):
        out = real(kind_, px, py, area, R)
        seen.append(out[1])
        return out

    monkeypatch.setattr(search_mod, "_frame_vertices", spy)
    s = load_fixture("strip")
    out = FINDERS[kind](s)
    assert out.ok
    assert len(seen) == 1
    ctx = out.certificate.context
    d, eps = ctx["d"], ctx["epsilon"]
    ix, iy = seen[0]
    # in-frame A is (d, 0)
    assert np.all(np.hypot(ix - d, iy) < eps)


# 6 ------------------------------------------------------------------------------------


@pytest.mark.criterion(6, "theorem runs verify on fullplane, half-plane, strip, annulus-complement; each < 30 s")
@pytest.mark.parametrize("name", THEOREM_FIXTURES)
@pytest.mark.parametrize("kind", list(FINDERS))
def test_c6_end_to_end(name, kind):
    s = load_fixture(name)
    start = time.perf_counter()
    out = FINDERS[kind](s)
    elapsed = time.perf_counter() - start
    assert out.ok, out.failure
    assert verify_certificate(out.certificate, s).ok
    assert out.certificate.kind == kind
    assert elapsed < 30, f"{elapsed:.1f} s"


# 7 ------------------------------------------------------------------------------------


@pytest.mark.criterion(7, "counterexample: trapezoid search exits 2 with no certificate; isosceles search succeeds")
def test_c7_counterexample(tmp_path, capsys):
    path = str(fixture_path("counterexample"))
    out = tmp_path / "trap.json"
    assert main(["find", "--shape", "trapezoid", "--area", "1", "--out", str(out), path]) == 2
    assert not out.exists()
    report = json.loads(capsys.readouterr().out)
    assert "kind" not in report and report["failure"] in ("NoFarPoint", "NoAdmissibleR")

    tri = tmp_path / "tri.json"
    assert main(["find", "--shape", "isosceles", "--area", "1", "--out", str(tri), path]) == 0
    capsys.readouterr()
    assert main(["verify", "--cert", str(tri), path]) == 0


# 8 ------------------------------------------------------------------------------------


@pytest.mark.criterion(8, "raster convergence: unit-disk error ratio per halving in [1.5, 3] over h = 0.1, 0.05, 0.01")
def test_c8_raster_convergence():
    disk = Scene((Disk(Point(0, 0), 1),))
    window = Rect(Point(-1, -1), Point(1, 1))
    hs = (0.1, 0.05, 0.01)
    errors = [abs(rasterize(disk, window, h).measure - math.pi) for h in hs]
    ratios = []
    for (h0, e0), (h1, e1) in zip(zip(hs, errors), zip(hs[1:], errors[1:])):
        halvings = math.log2(h0 / h1)
        ratios.append((e0 / e1) ** (1 / halvings))
    assert all(1.5 <= q <= 3 for q in ratios), f"errors {errors}, per-halving ratios {ratios}"


# 9 ------------------------------------------------------------------------------------


@pytest.mark.criterion(9, "determinism: repeated runs give byte-identical certificate JSON and SVG")
@pytest.mark.parametrize("name", FIXTURES)
def test_c9_determinism(name, tmp_path, capsys):
    path = str(fixture_path(name))
    for kind, shape in SHAPES.items():
        blobs = []
        for run in range(2):
            cert = tmp_path / f"{shape}{run}.json"
            svg = tmp_path / f"{shape}{run}.svg"
            code = main(["find", "--shape", shape, "--out", str(cert), path])
            stdout = capsys.readouterr().out
            if code == 0:
                assert main(["plot", "--cert", str(cert), "--out", str(svg), path]) == 0
                blobs.append((cert.read_bytes(), svg.read_bytes()))
            else:
                assert code == 2
                assert main(["plot", "--out", str(svg), path]) == 0
                blobs.append((stdout.encode(), svg.read_bytes()))
        assert blobs[0] == blobs[1], (name, kind)
