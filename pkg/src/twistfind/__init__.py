"""Find and certify unit-area isosceles triangles, right triangles and isosceles
trapezoids inside planar sets using measure-preserving twist maps."""

from importlib import resources

from .geometry import Point, PolarPoint, Quadrilateral, Tolerance, Triangle
from .io import load_planar_set, scene_from_dict
from .locator import LocatorConfig
from .planar import PlanarSet
from .search import (
    ShapeCertificate,
    SearchOutcome,
    find_isosceles_trapezoid,
    find_isosceles_triangle,
    find_right_triangle,
    verify_certificate,
)

__version__ = "0.1.0"

FIXTURES = ("fullplane", "halfplane", "strip", "annulus", "disk_minus_disk", "counterexample")


def fixture_path(name: str):
    """Path-like handle to a bundled scene."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files(__package__) / "scenes" / f"{name}.json"


def load_fixture(name: str) -> PlanarSet:
    with resources.as_file(fixture_path(name)) as path:
        return load_planar_set(path)


__all__ = [
    "FIXTURES", "LocatorConfig", "PlanarSet", "Point", "PolarPoint", "Quadrilateral",
    "SearchOutcome", "ShapeCertificate", "Tolerance", "Triangle", "find_isosceles_trapezoid",
    "find_isosceles_triangle", "find_right_triangle", "fixture_path", "load_fixture",
    "load_planar_set", "scene_from_dict", "verify_certificate",
]
