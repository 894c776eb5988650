"""Exception types shared across the package."""


class TorilatError(Exception):
    """Base class for all library errors."""


class ClosureTooLarge(TorilatError):
    pass


class NotNormal(TorilatError):
    pass


class ParseError(TorilatError, ValueError):
    pass


class EmptyMultiset(TorilatError):
    pass


class PreconditionFailed(TorilatError):
    pass


class VerificationError(TorilatError):
    """A certificate or claimed identity failed to verify."""


class DegreeUnsupported(TorilatError):
    pass


class SizeCap(TorilatError):
    pass


class OutOfScope(TorilatError):
    pass


class NotNilpotent(OutOfScope):
    pass
