"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the construction is defined."""


class NumericalError(ArithmeticError):
    """A computation produced non-finite or degenerate values."""
