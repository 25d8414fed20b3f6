"""Exception hierarchy.

Geometry and domain errors are ``ValueError`` subclasses. The
``HypothesisNotMet`` family is raised when the explored window or raster cannot
exhibit what a construction needs. It never means the shape does not exist.
"""

from __future__ import annotations

from typing import Any


class TwistfindError(Exception):
    """Base class for all package errors."""


class InputError(TwistfindError, ValueError):
    """Malformed scene, mask, certificate or configuration."""


class OriginNotRepresentable(TwistfindError, ValueError):
    pass


class SelfIntersecting(TwistfindError, ValueError):
    pass


class Degenerate(TwistfindError, ValueError):
    pass


class CoincidentPoints(TwistfindError, ValueError):
    pass


class DomainError(TwistfindError, ValueError):
    """Radius outside the domain of an angle function (arcsin argument >= 1)."""


class InvalidRatio(TwistfindError, ValueError):
    """Scale ratio R must exceed 1."""


class ResolutionTooCoarse(TwistfindError, ValueError):
    """Raster would be empty or exceed the configured cell cap."""


class ContainmentViolated(TwistfindError, RuntimeError):
    """A twisted image left the disk B; the chord bound was not respected."""


class HypothesisNotMet(TwistfindError):
    """The finite representation could not exhibit a construction's hypotheses."""

    kind = "HypothesisNotMet"

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NoDensityPoint(HypothesisNotMet):
    kind = "NoDensityPoint"


class NoFarPoint(HypothesisNotMet):
    kind = "NoFarPoint"


class NoAdmissibleR(HypothesisNotMet):
    kind = "NoAdmissibleR"


class ImageNeverLands(HypothesisNotMet):
    kind = "ImageNeverLands"
