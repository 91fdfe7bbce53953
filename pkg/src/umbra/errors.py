"""Exception hierarchy for the umbra toolkit."""


class UmbraError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(UmbraError, ValueError):
    pass


class ViewpointInsideBall(GeometryError):
    pass


class OriginInsideBall(ViewpointInsideBall):
    pass


class PointInsideBall(GeometryError):
    pass


class PointInsideBody(GeometryError):
    pass


class NonUnitDirection(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class UnsupportedDimension(GeometryError):
    pass


class ConstructionError(UmbraError, ValueError):
    pass


class EmbeddingFailed(ConstructionError):
    pass


class InvalidTriangle(ConstructionError):
    pass


class ImagesOverlap(ConstructionError):
    pass


class DomainError(UmbraError, ValueError):
    pass


class TooManyBalls(UmbraError, ValueError):
    pass


class NoRayFound(UmbraError):
    """No avoiding ray was found before the sample cap; inconclusive, not a disproof."""


class PredicateFailed(UmbraError):
    pass


class WitnessVerificationError(UmbraError, AssertionError):
    """A candidate witness direction failed exact re-verification."""
