"""Exception hierarchy shared by every module and the CLI."""


class AuctionError(Exception):
    """Base class for all package errors."""


class ValidationError(AuctionError, ValueError):
    """Input data does not describe a valid instance or profile."""


class NonPositiveEntry(ValidationError):
    pass


class CtrsNotSorted(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class InvalidProfile(ValidationError):
    pass


class ParseError(AuctionError, ValueError):
    """Raised when an on-disk file cannot be decoded."""


class ProfileShapeMismatch(AuctionError, TypeError):
    """Scalar profile given to EGFP, or a matrix given to GSP/VCG."""


class ProfileNotNoOverCompliant(AuctionError, ValueError):
    """A GSP/VCG profile lies outside the no-over strategy space."""


class TooLarge(AuctionError, ValueError):
    """Exhaustive routine called on an instance beyond its size guard."""


class ParamOutOfRange(AuctionError, ValueError):
    pass


class NoEquilibriumFound(AuctionError):
    pass
