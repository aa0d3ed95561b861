"""Exception types raised by the library."""


class UqrError(Exception):
    """Base class for every error raised by uqr."""


class InvalidPdf(UqrError, ValueError):
    pass


class MassNotOne(InvalidPdf):
    pass


class NonAscendingBreaks(InvalidPdf):
    pass


class InvalidInterval(UqrError, ValueError):
    pass


class NotUniform(UqrError, TypeError):
    """A uniform-only operation received a histogram point."""


NonUniformPoint = NotUniform


class CapabilityError(UqrError):
    """The query shape is not supported by the chosen index or engine."""


class UnboundedInterval(CapabilityError):
    pass


class BoundedInterval(CapabilityError):
    pass


class KOutOfRange(UqrError, ValueError):
    pass


class TauOutOfRange(UqrError, ValueError):
    pass


class EmptyInput(UqrError, ValueError):
    pass


class EmptySet(EmptyInput):
    pass


class NotEnoughElements(UqrError, ValueError):
    pass


class VerticalSegment(UqrError, ValueError):
    pass


class InvariantViolation(AssertionError):
    """A structural self-check failed while debug checks were enabled."""
