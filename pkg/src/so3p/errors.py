"""Exception types shared across the package."""


class PrecisionExhausted(ArithmeticError):
    """Capped-precision arithmetic lost every known digit."""


class SquareClassError(ArithmeticError):
    """A square root was requested for a value that is not a square in Q_p."""

    def __init__(self, message, square_class=None):
        super().__init__(message)
        self.square_class = square_class


class CertificateError(ValueError):
    """A matrix failed its group-membership certificate."""


class AmbiguityError(ValueError):
    """A decomposition could not select a branch deterministically."""


class RegionError(ValueError):
    """A region literal or region union is malformed."""
