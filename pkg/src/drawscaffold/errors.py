"""Exception types shared across the library.

Every domain failure raises a subclass of :class:`ScaffoldError` so callers
(service layer, CLI) can map them to exit codes / HTTP statuses in one place.
"""

from __future__ import annotations


class ScaffoldError(Exception):
    """Base class for all library-level failures."""


class BadImage(ScaffoldError):
    """Input bytes could not be decoded as a PNG image."""


class TooLarge(ScaffoldError):
    """Image exceeds the supported pixel budget."""


class DimensionMismatch(ScaffoldError):
    """Two rasters that must share dimensions do not."""


class InvalidKernel(ScaffoldError):
    """Blur kernel size outside the supported range."""


class EmptyMask(ScaffoldError):
    """Mask contains no foreground pixels."""


class DegenerateResult(ScaffoldError):
    """Simplification collapsed a contour below a valid polygon."""


class DegeneratePolygon(ScaffoldError):
    """A polygon (e.g. a lasso) has fewer than 3 vertices."""


class EmptyInput(ScaffoldError):
    """An aggregate operation received nothing to aggregate."""


class NoPoints(ScaffoldError):
    """Line fitting was asked to run on an empty point set."""


class AllPixelsFiltered(ScaffoldError):
    """Every pixel fell outside the clusterable range."""


class EmptyRegion(ScaffoldError):
    """No pixel qualifies for a cluster's region mask."""


class OutOfBounds(ScaffoldError):
    """A pixel coordinate lies outside the image."""


class ModeMismatch(ScaffoldError):
    """Two palettes built under different modes cannot be matched."""


class EmptyPalette(ScaffoldError):
    """A palette with zero clusters cannot be matched."""


class ProviderUnavailable(ScaffoldError):
    """The segmentation provider could not be reached or failed."""


class NoDetections(ScaffoldError):
    """The provider ran fine but found nothing for the request."""


class NoCanvas(ScaffoldError):
    """The session has no canvas snapshot yet."""


class UnknownSession(ScaffoldError):
    """No session exists under the given id."""
