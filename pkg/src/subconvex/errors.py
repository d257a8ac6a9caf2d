"""Exception hierarchy shared by every module.

The CLI maps ``UsageError`` subclasses to exit code 2 and every other
``SubconvexError`` to exit code 1, printing the class name on stderr.
"""


class SubconvexError(Exception):
    """Base class for all compute errors raised by the toolkit."""


class UsageError(SubconvexError, ValueError):
    """Malformed user input (bad expression text, bad ladder syntax)."""


class ParseError(UsageError):
    pass


class InvalidParam(SubconvexError, ValueError):
    pass


class DomainError(SubconvexError, ValueError):
    pass


class UncertifiableReal(SubconvexError):
    """A floor or sign could not be decided within the declared error bound."""


class GridTooCoarse(SubconvexError, ValueError):
    pass


class PrecisionLoss(SubconvexError):
    pass


class ScaleTooLarge(SubconvexError, ValueError):
    pass


class SetTooSparse(SubconvexError):
    pass


class ResourceLimit(SubconvexError):
    pass


class LengthMismatch(SubconvexError, ValueError):
    pass


class NotPrime(SubconvexError, ValueError):
    pass


class PrincipalChar(SubconvexError, ValueError):
    pass
