class BuresError(ValueError):
    """Root of every domain error raised by the models package."""


class NotSquare(BuresError):
    pass


class NonFinite(BuresError):
    pass


class AsymmetricInput(BuresError):
    pass


class NoConvergence(BuresError):
    pass


class NotPSD(BuresError):
    pass


class NotPD(NotPSD):
    pass


class DimMismatch(BuresError):
    pass


class BadExponent(BuresError):
    pass


class NonPositiveVariance(BuresError):
    pass


class BadDf(BuresError):
    pass


class TooFewSamples(BuresError):
    pass


class SizeMismatch(BuresError):
    pass


class TooLarge(BuresError):
    pass


class NumericalBreakdown(BuresError):
    """Trace residual went negative beyond what roundoff can explain."""
