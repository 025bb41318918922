"""Exception hierarchy shared by every engine module."""


class HeckeError(Exception):
    """Base class for all engine errors."""


class FloorViolation(HeckeError):
    pass


class PrecisionExhausted(HeckeError):
    """Raised instead of returning digits that are not guaranteed."""


class DivisionByZero(HeckeError, ZeroDivisionError):
    pass


class NotIntegral(HeckeError):
    pass


class SingularAtPrecision(HeckeError):
    pass


class BudgetExceeded(HeckeError):
    pass


class DimensionMismatch(HeckeError):
    pass


class NotNormalized(HeckeError):
    pass


class LevelMismatch(HeckeError):
    pass


class NotAdmissible(HeckeError):
    """Exponent matrix does not define a congruence subgroup."""


class UnsupportedImageClass(HeckeError):
    pass


class UnsupportedConvolution(HeckeError):
    pass


class UnsupportedByOracle(HeckeError):
    pass


class UnknownSuite(HeckeError):
    pass


class ParseError(HeckeError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
