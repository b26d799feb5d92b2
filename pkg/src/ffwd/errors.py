"""Exception hierarchy shared by all pipeline stages."""


class FFWDError(Exception):
    """Base class for every error raised by this package."""


# container / model
class ContainerError(FFWDError):
    pass


class BadMagic(ContainerError):
    pass


class VersionUnsupported(ContainerError):
    pass


class TruncatedSection(ContainerError):
    """A section is shorter (or longer) than the header counts imply."""


class InvariantViolation(FFWDError, ValueError):
    pass


class IoFailure(FFWDError, OSError):
    pass


# profile
class OutOfRangeInput(FFWDError, ValueError):
    pass


class EmptyProfile(FFWDError, ValueError):
    pass


class InfeasibleRates(FFWDError):
    """No rate assignment inside the bounds meets the target speed-up.

    ``plan`` carries the best-effort plan that was computed anyway.
    """

    def __init__(self, message, plan=None):
        super().__init__(message)
        self.plan = plan


# numerics
class DimensionMismatch(FFWDError, ValueError):
    pass


class BinCountMismatch(FFWDError, ValueError):
    pass


class IndexOutOfRange(FFWDError, IndexError):
    pass


class TooFewFrames(FFWDError, ValueError):
    pass


class NoInteriorFrame(FFWDError, ValueError):
    pass


class TooFewSegments(FFWDError, ValueError):
    pass


# synth
class InvalidSpec(FFWDError, ValueError):
    pass


class TooLarge(FFWDError, ValueError):
    pass
