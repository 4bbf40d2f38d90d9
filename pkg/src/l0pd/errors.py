"""Exception types raised by the solver library."""


class L0PDError(Exception):
    """Base class for all library errors."""


class DomainError(L0PDError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class FeasibilityError(DomainError):
    """A dual variable lies outside the feasible set of the loss conjugate."""


class ShapeError(L0PDError, ValueError):
    """Array dimensions do not agree."""


class NumericalDivergenceError(L0PDError, ArithmeticError):
    """An iterate became non-finite."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite iterate at iteration {iteration}")


class UnsupportedConfigurationError(L0PDError, ValueError):
    """The requested solver configuration is not supported."""


class ParseError(L0PDError, ValueError):
    """Malformed input file."""

    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class BoundsError(L0PDError, IndexError):
    """An index or requested size exceeds the available range."""
