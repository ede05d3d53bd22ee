"""Exception types shared across the package."""


class CarpetQSError(Exception):
    """Base class for all package errors."""


class PoleHit(CarpetQSError):
    """A map was evaluated within pole tolerance of one of its poles."""

    def __init__(self, z, iterate=None):
        self.z = z
        self.iterate = iterate
        msg = f"evaluation at z={z} is within pole tolerance of a pole"
        if iterate is not None:
            msg += f" (iterate {iterate})"
        super().__init__(msg)


class UnsupportedMap(CarpetQSError):
    """Operation not available for this map family."""


class DomainError(CarpetQSError):
    """Numeric argument outside the domain of a special function."""


class EmptySet(CarpetQSError):
    """A point-set operation received an empty set."""


class DegenerateSet(CarpetQSError):
    """A point set with zero diameter where positive diameter is required."""


class PointsNotInSet(CarpetQSError):
    """Turning was requested about points not belonging to the set."""


class IdenticalEndpoints(CarpetQSError):
    """Arc splitting requires two distinct vertices."""


class CurveTooSmall(CarpetQSError):
    """Curve has too few vertices for the requested statistic."""


class ClippedCurve(CarpetQSError):
    """Statistic is undefined for viewport-clipped curves."""


class DegenerateComponent(CarpetQSError):
    """Component contour would have fewer than 4 vertices."""


class CenterOnBoundary(CarpetQSError):
    """Shape is undefined when the center lies on the sampled boundary."""


class TooFewCurves(CarpetQSError):
    """Pairwise statistics need at least two curves."""


class EmptyBits(CarpetQSError):
    """Binary prefix construction received no input bits."""
