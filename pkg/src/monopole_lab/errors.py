"""Exception hierarchy.

The CLI maps these onto exit codes: validation problems exit 1, numerical
tolerance failures exit 2, singular geometry exits 3.
"""
from __future__ import annotations


class MonopoleLabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MonopoleLabError, ValueError):
    """Bad user input: non-finite constants, malformed paths, bad config."""


class NumericalError(MonopoleLabError):
    """A computation finished but missed its requested tolerance."""


class QuadratureError(NumericalError):
    """Quadrature error estimate exceeds the requested tolerance."""


class ToleranceError(NumericalError):
    """A cross-check between two independent routes disagreed."""


class SingularityError(MonopoleLabError):
    """Evaluation requested on a singular set (origin, string, axis)."""


class SingularPointError(SingularityError):
    """Evaluation at the monopole location."""


class OnStringError(SingularityError):
    """Evaluation on (or within the cutoff of) a Dirac string half-line."""


class AxisCrossingError(SingularityError):
    """A path passes through an axis about which a winding is requested."""


class NearOriginError(SingularityError):
    """The integrated trajectory came closer to the monopole than ``r_min``.

    ``record`` carries the trajectory up to the last valid sample.
    """

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record
