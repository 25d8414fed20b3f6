import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistfind import load_fixture
from twistfind.errors import InvalidRatio, ResolutionTooCoarse
from twistfind.geometry import Point
from twistfind.io import load_mask, load_scene, read_mask_bits, write_mask
from twistfind.planar import (
    Disk,
    HalfPlane,
    PlanarSet,
    PointRow,
    RasterMask,
    Rect,
    Scene,
    contains,
    density,
    measure_in_disk,
    rasterize,
    s_r_contains,
    s_r_contains_xy,
    scale_membership,
)

BIG = Rect(Point(-1e9, -1e9), Point(1e9, 1e9))


def scene_set(*prims, subtract=(), window=None):
    return PlanarSet(scene=Scene(tuple(prims), tuple(subtract)), window=window)


UNIT_DISK = scene_set(Disk(Point(0, 0), 1))
FULL = scene_set(BIG)
# an empty union is not expressible; a disk subtracted from itself is empty
EMPTY = scene_set(Disk(Point(0, 0), 1), subtract=[Disk(Point(0, 0), 1)])
ANNULUS = scene_set(Disk(Point(0, 0), 10), subtract=[Disk(Point(0, 0), 1)])


def test_contains_examples():
    assert contains(UNIT_DISK, Point(0.5, 0))
    assert not contains(UNIT_DISK, Point(2, 0))
    ce = load_fixture("counterexample")
    assert contains(ce, Point(3, 0))
    assert not contains(ce, Point(3, 0.2))
    assert contains(ce, Point(0.1, 0))  # boundary of the closed disk


def test_primitives_closed_on_boundary():
    assert contains(scene_set(Rect(Point(0, 0), Point(1, 1))), Point(1, 1))
    assert contains(scene_set(HalfPlane(Point(-1, 0), 0)), Point(0, 5))
    assert contains(scene_set(PointRow(Point(0, 0), Point(1, 0), 3, 0.25)), Point(2.25, 0))
    assert not contains(scene_set(PointRow(Point(0, 0), Point(1, 0), 3, 0.25)), Point(3, 0))


def test_window_clips_membership():
    s = scene_set(BIG, window=Rect(Point(-1, -1), Point(1, 1)))
    assert contains(s, Point(1, 1))
    assert not contains(s, Point(1.01, 0))


def test_primitive_invariants():
    with pytest.raises(ValueError):
        Disk(Point(0, 0), 0)
    with pytest.raises(ValueError):
        Rect(Point(0, 0), Point(0, 1))
    with pytest.raises(ValueError):
        PlanarSet()


def test_measure_examples():
    assert measure_in_disk(FULL, Point(0, 0), 1) == pytest.approx(math.pi, rel=0.02)
    assert measure_in_disk(EMPTY, Point(0, 0), 1) == 0
    half = scene_set(HalfPlane(Point(-1, 0), 0))
    assert measure_in_disk(half, Point(0, 0), 1) == pytest.approx(math.pi / 2, rel=0.02)


def test_half_plane_monte_carlo_oracle():
    # oracle: uniform points in the disk, fraction in the half-plane n.p <= c
    rng = np.random.default_rng(3)
    n = 400_000
    rad = np.sqrt(rng.uniform(0, 1, n))
    ang = rng.uniform(0, 2 * math.pi, n)
    x, y = rad * np.cos(ang), rad * np.sin(ang)
    for c in (-0.5, 0.0, 0.3):
        nx, ny = 0.6, 0.8
        mc = np.mean(nx * x + ny * y <= c)
        s = scene_set(HalfPlane(Point(nx, ny), c))
        assert density(s, Point(0, 0), 1) == pytest.approx(mc, abs=0.01)


def test_density_examples():
    assert density(FULL, Point(3, 4), 0.5) == 1
    assert density(EMPTY, Point(0, 0), 1) == 0
    half = scene_set(HalfPlane(Point(1, 0), 0))
    assert density(half, Point(0, 0), 1) == pytest.approx(0.5, abs=0.02)


def test_mask_density_and_measure():
    mask = rasterize(Scene((Disk(Point(0, 0), 1),)), Rect(Point(-2, -2), Point(2, 2)), 0.01)
    s = PlanarSet(mask=mask)
    assert density(s, Point(0, 0), 0.5) == 1
    assert measure_in_disk(s, Point(0, 0), 2) == pytest.approx(math.pi, rel=0.005)
    # disk smaller than a cell falls back to center membership
    assert density(s, Point(0, 0), 1e-4) == 1
    assert density(s, Point(1.9, 1.9), 1e-4) == 0


@settings(max_examples=100)
@given(
    cx=st.floats(-5, 5), cy=st.floats(-5, 5), radius=st.floats(0.05, 5),
    r_small=st.floats(0.5, 3), extra=st.floats(0.0, 2),
)
def test_density_monotone_in_subset(cx, cy, radius, r_small, extra):
    sub = scene_set(Disk(Point(0, 0), r_small))
    sup = scene_set(Disk(Point(0, 0), r_small + extra), Rect(Point(0, 0), Point(3, 1)))
    c = Point(cx, cy)
    assert density(sub, c, radius) <= density(sup, c, radius)


def test_scale_membership_examples():
    assert scale_membership(UNIT_DISK, Point(1.5, 0), 2)
    assert not scale_membership(UNIT_DISK, Point(3, 0), 2)
    for p in (Point(0.3, 0.2), Point(1.2, 0)):
        assert scale_membership(UNIT_DISK, p, 1) == contains(UNIT_DISK, p)


def test_s_r_examples():
    assert s_r_contains(FULL, Point(123, -4), 17)
    ring = PlanarSet(scene=Scene((Disk(Point(0, 0), 10),), (Disk(Point(0, 0), 1),)))
    # closed annulus 1 <= |p| <= 10: subtracting the closed unit disk drops |p| = 1 only
    assert s_r_contains(ring, Point(6, 0), 5)
    assert not s_r_contains(ring, Point(2, 0), 5)
    with pytest.raises(InvalidRatio):
        s_r_contains(ring, Point(6, 0), 1)


def test_scaling_identity_against_explicit_scene():
    # S = disk 10 minus disk 1; S and 5*S intersect in disk 10 minus disk 5
    R = 5.0
    explicit = scene_set(Disk(Point(0, 0), 10), subtract=[Disk(Point(0, 0), 5)])
    scaled = ANNULUS.scene.scaled(R)
    assert scaled == Scene((Disk(Point(0, 0), 50),), (Disk(Point(0, 0), 5),))
    rng = np.random.default_rng(5)
    x, y = rng.uniform(-12, 12, 1000), rng.uniform(-12, 12, 1000)
    # keep away from the circles where rounding of p/R decides membership
    rr = np.hypot(x, y)
    keep = (np.abs(rr - 5) > 1e-9) & (np.abs(rr - 10) > 1e-9)
    assert np.array_equal(s_r_contains_xy(ANNULUS, x, y, R)[keep], explicit.contains_xy(x, y)[keep])


def test_s_r_measure_tends_to_s_measure():
    # S contains a neighborhood of the origin, so R*S eventually covers B
    s = scene_set(Disk(Point(0, 0), 1), Rect(Point(20, -1), Point(40, 1)))
    center, radius = Point(30, 0.5), 1.0
    target = measure_in_disk(s, center, radius)
    from twistfind.planar import disk_samples

    x, y, h = disk_samples(center, radius)
    gaps = []
    for R in (2, 10, 100, 1000):
        m = s_r_contains_xy(s, x, y, R).sum() * h * h
        gaps.append(target - m)
    assert all(g >= 0 for g in gaps)
    assert gaps[0] > 0
    assert gaps[-1] == 0
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))


def test_rasterize_examples():
    square = Scene((Rect(Point(0, 0), Point(1, 1)),))
    m = rasterize(square, Rect(Point(0, 0), Point(1, 1)), 0.1)
    assert (m.width, m.height) == (10, 10)
    assert int(m.bits.sum()) == 100
    assert m.measure == pytest.approx(1.0, abs=1e-12)

    disk = rasterize(Scene((Disk(Point(0, 0), 1),)), Rect(Point(-1, -1), Point(1, 1)), 0.01)
    assert disk.measure == pytest.approx(math.pi, rel=0.005)

    empty = rasterize(EMPTY.scene, Rect(Point(-1, -1), Point(1, 1)), 0.1)
    assert not empty.bits.any()


def test_rasterize_cap_and_degenerate():
    sq = Scene((Rect(Point(0, 0), Point(1, 1)),))
    with pytest.raises(ResolutionTooCoarse, match="CapExceeded"):
        rasterize(sq, Rect(Point(0, 0), Point(10, 10)), 0.01, cap=10**4)
    with pytest.raises(ValueError):
        rasterize(sq, Rect(Point(0, 0), Point(1, 1)), 0)


def test_mask_membership_is_cell_lookup():
    bits = np.array([[1, 0], [0, 1]], dtype=bool)
    m = RasterMask(Point(0, 0), 1.0, bits)
    s = PlanarSet(mask=m)
    assert contains(s, Point(0.2, -0.4))
    assert not contains(s, Point(1.0, 0.0))
    assert contains(s, Point(1.4, 1.4))
    assert not contains(s, Point(5, 5))
    assert m.measure == 2


@pytest.mark.parametrize("fmt, suffix", [("P2", ".pgm"), ("P1", ".pbm")])
def test_mask_round_trip(tmp_path, fmt, suffix):
    scene = Scene((Disk(Point(0.3, -0.2), 0.7), Rect(Point(-1, 0.5), Point(0.2, 0.9))))
    window = Rect(Point(-1.2, -1.1), Point(1.1, 1.0))
    mask = rasterize(scene, window, 0.05)
    path = tmp_path / f"m{suffix}"
    write_mask(path, mask, fmt)
    assert (tmp_path / "m.json").exists()
    loaded = load_mask(path)
    assert np.array_equal(loaded.mask.bits, mask.bits)
    assert loaded.mask.origin == mask.origin
    assert loaded.mask.cell == mask.cell
    I, J = np.meshgrid(np.arange(mask.width), np.arange(mask.height))
    cx, cy = mask.cell_center(I, J)
    assert np.array_equal(loaded.contains_xy(cx, cy), scene.contains_xy(cx, cy))
    assert np.array_equal(read_mask_bits(path), mask.bits)


def test_fixture_scenes_load():
    from twistfind import FIXTURES, fixture_path

    for name in FIXTURES:
        s = load_scene(fixture_path(name))
        assert s.scene is not None and s.window is not None
