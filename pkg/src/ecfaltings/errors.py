"""Exception hierarchy shared by every module of the package."""


class EcFaltingsError(Exception):
    """Base class for all errors raised by ecfaltings."""


class SingularCurve(EcFaltingsError):
    pass


class NotPrime(EcFaltingsError):
    pass


class FactorizationFailure(EcFaltingsError):
    pass


class IntervalContainsZero(EcFaltingsError):
    pass


class PrecisionExhausted(EcFaltingsError):
    pass


class BoundaryAmbiguity(EcFaltingsError):
    pass


class InfinityPoint(EcFaltingsError):
    pass


class NotOnCurve(EcFaltingsError):
    pass


class TorsionGenerator(EcFaltingsError):
    pass


class DegenerateLattice(EcFaltingsError):
    pass


class BoundTooSmall(EcFaltingsError):
    pass


class NoGenerators(EcFaltingsError):
    pass


class IncomparableWithinRadius(EcFaltingsError):
    pass


class ParseError(EcFaltingsError):
    """Malformed corpus or report input; carries the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
