"""Exception hierarchy shared by every module."""


class ConcentraError(Exception):
    """Base class for all errors raised by this package."""


class EmptySet(ConcentraError):
    """An operation needed at least one occupied cell."""


class SpacingMismatch(ConcentraError):
    pass


class MisalignedOrigins(ConcentraError):
    pass


class NotRConvex(ConcentraError):
    """The set differs from its own r-envelope."""


class CenterOnBoundary(ConcentraError):
    pass


class DegreeTooLarge(ConcentraError):
    pass


class NotNonnegative(ConcentraError):
    """A polynomial takes negative values on [0, 1]."""


class BadParameters(ConcentraError):
    pass


class UnknownCorpus(ConcentraError):
    pass


class NotNormalized(ConcentraError):
    """The set is not rescaled to unit equivalent radius."""


class FormatError(ConcentraError):
    """Malformed GSET1 or JSON input."""
