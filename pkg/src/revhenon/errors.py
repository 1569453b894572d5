"""Exception hierarchy shared by every module of the package."""


class RevHenonError(Exception):
    """Base class for all errors raised by ``revhenon``."""


class NumericalError(RevHenonError):
    """A numerical procedure could not produce a trustworthy answer."""


class NoConvergence(NumericalError):
    """Newton iteration exhausted ``max_iter`` without meeting the tolerance."""


class IllConditioned(NumericalError):
    """The derivative of an implicit equation vanished at an iterate."""


class DenominatorVanishes(NumericalError):
    """A closed-form expression hit a (near) zero denominator."""


class NonPrimitive(NumericalError):
    """A periodic solution has a proper sub-period."""


class SingularNewtonMatrix(NumericalError):
    """The multi-point Newton matrix is numerically singular."""


class StallAtSingularity(NumericalError):
    """Continuation step fell below the floor; ``branch`` holds the samples so far."""

    def __init__(self, message, branch=None):
        super().__init__(message)
        self.branch = branch


class AmbiguousEvent(NumericalError):
    """Local orbit counting could not tell a fold from a pitchfork."""


class DomainError(RevHenonError, ValueError):
    """Arguments lie outside the domain of a closed-form formula or map family."""
