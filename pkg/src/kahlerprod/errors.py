"""Exception hierarchy."""


class GeometryError(Exception):
    """Base class for all errors raised by kahlerprod."""


class ShapeError(GeometryError, ValueError):
    pass


class RetractionError(GeometryError):
    pass


class GroupError(GeometryError, ValueError):
    pass


class SingularLevelPoint(GeometryError):
    """dμ is rank deficient at the requested point."""


class NonFreePoint(GeometryError):
    """Infinitesimal generators are linearly dependent at the requested point."""


class IllConditioned(GeometryError):
    pass


class DegenerateMixing(GeometryError, ValueError):
    pass


class NotOnOrbit(GeometryError):
    pass


class PhaseUnobservable(GeometryError):
    pass


class ChartError(GeometryError):
    pass


class ConfigError(GeometryError, ValueError):
    pass
