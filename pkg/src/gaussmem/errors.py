"""Exception types raised across the package."""


class GaussMemError(Exception):
    """Base class for all package errors."""


class EmptyOrDegenerateSample(GaussMemError, ValueError):
    pass


class NonFiniteValue(GaussMemError, ValueError):
    pass


class InvalidPointCount(GaussMemError, ValueError):
    pass


class NotNormalized(GaussMemError, ValueError):
    pass


class NonPositiveSigma(GaussMemError, ValueError):
    pass


class LengthMismatch(GaussMemError, ValueError):
    pass


class NegativeWeight(GaussMemError, ValueError):
    pass


class ZeroEmpiricalAverage(GaussMemError, ValueError):
    pass


class InvalidSchedule(GaussMemError, ValueError):
    pass


class InvalidConfig(GaussMemError, ValueError):
    pass


class AllZeroWeights(GaussMemError, ValueError):
    pass


class WindowTooLarge(GaussMemError, ValueError):
    pass


class NonPositiveInput(GaussMemError, ValueError):
    pass


class NonPositiveDensity(GaussMemError, ValueError):
    pass


class NoSolution(GaussMemError, ArithmeticError):
    """No positive bandwidth exists (at or beyond the sigma_4 asymptote)."""


class OutOfSupport(GaussMemError, ValueError):
    pass


class InvalidCount(GaussMemError, ValueError):
    pass


class StencilOutOfSupport(GaussMemError, ValueError):
    pass


class SampleParseError(GaussMemError, ValueError):
    """Raised when a sample file cannot be parsed; carries the line number."""

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class IoFailure(GaussMemError, OSError):
    pass
