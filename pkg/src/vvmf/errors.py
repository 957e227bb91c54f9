"""Exception types shared across the package."""


class DomainError(ValueError):
    """Mathematically invalid input (degenerate exponents, poles, bad weights...)."""


class TruncationError(DomainError):
    """A computation needed coefficients beyond the known precision of a series."""


class RingMismatchError(DomainError, TypeError):
    """Two objects over different coefficient rings were combined."""
