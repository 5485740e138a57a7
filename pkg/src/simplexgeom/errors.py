"""Exception types raised across the library."""


class GeometryError(Exception):
    """Base class for every error raised by simplexgeom."""


class SpaceMismatch(GeometryError):
    """Two objects live on different sample spaces."""


class BaseMismatch(GeometryError):
    """Two fiber vectors are attached to different base points."""


class DomainError(GeometryError):
    """A value violates the domain constraints of its type or coordinates."""


class DomainEscape(GeometryError):
    """A curve could not be evaluated inside the open simplex."""


class OutOfInterval(GeometryError):
    """A curve parameter lies outside its admissible interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class NumericalBlowup(GeometryError):
    """An integrator produced a non-finite state."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NormError(GeometryError):
    """A unit-norm precondition is violated."""


class TangencyError(GeometryError):
    """An embedded tangent vector does not sum to zero."""


class RangeError(GeometryError):
    """An argument lies outside the domain or range of a deformed logarithm."""
