"""Exception types shared across the package."""


class MMCError(Exception):
    """Base class for all package errors."""


class ValidationError(MMCError, ValueError):
    """Raised when parameters fail validation."""


class UnstableQueueError(ValidationError):
    """Raised when an operation needs lambda < c*mu and does not get it."""

    def __init__(self, lam: float, c: int, mu: float):
        super().__init__(
            f"requires lambda < c*mu (got lambda={lam!r}, c={c}, mu={mu!r}, "
            f"rho={lam / (c * mu):.6g})"
        )


class NumericLimitError(MMCError, ArithmeticError):
    """Raised when a computation leaves the range of double precision."""


class OracleScaleError(NumericLimitError):
    """Raised when the exact oracle is asked for a problem larger than its guard."""
