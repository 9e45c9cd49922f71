class SwelmError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(SwelmError, ValueError):
    pass


class NumericalError(SwelmError, ArithmeticError):
    """A computation produced (or would produce) meaningless numbers."""


class ExtrapolationWarning(UserWarning):
    """Prediction requested outside the unit cube the surrogate was built on."""


class SelectionWarning(UserWarning):
    """Regularization selection fell on a grid endpoint or a degenerate path."""
