"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments fall outside the region where a formula is defined."""


class ConvergenceError(ArithmeticError):
    """A series or iteration failed to reach its tolerance."""


class TruncationError(ArithmeticError):
    """A truncated Fock-space representation lost too much probability."""
