"""Exception hierarchy shared by all projconvex modules."""


class ProjConvexError(Exception):
    """Base class for every error raised by projconvex."""


class GeometryError(ProjConvexError):
    pass


class ZeroVector(GeometryError):
    pass


class NotCollinear(GeometryError):
    pass


class DegeneratePoints(GeometryError):
    pass


class OrientationMismatch(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class NotProperlyConvex(GeometryError):
    pass


class PointNotOnBoundary(GeometryError):
    pass


class PointOutsideDomain(GeometryError):
    pass


class DegenerateChord(GeometryError):
    pass


class LineMissesDomain(GeometryError):
    pass


class OutsideCone(GeometryError):
    pass


class DualUnbounded(GeometryError):
    pass


class NonpositiveParameter(GeometryError):
    pass


class UnknownGenerator(GeometryError):
    pass


class NotRadiant(GeometryError):
    pass


class InconsistentOrders(GeometryError):
    pass


class NonRealizableCartan(GeometryError):
    pass


class InvalidOrder(GeometryError):
    pass


class WrongOrders(GeometryError):
    pass


class ZeroCrossRatio(GeometryError):
    pass


class DegeneratePlacement(GeometryError):
    pass


class VertexNotFixed(GeometryError):
    pass


class GuardError(ProjConvexError):
    """Raised when a configured resource guard trips."""


class ExplosionGuard(GuardError):
    pass


class InputError(ProjConvexError):
    """Bad user input at the file/CLI boundary."""


class SpecParseError(InputError):
    pass


class UnknownParameter(InputError):
    pass


class BadChart(InputError):
    pass
