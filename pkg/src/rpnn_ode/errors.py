"""Shared exception types."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values, or a matrix factorization
    failed on input that passed argument validation."""


class StepUnderflowError(RuntimeError):
    """An adaptive width controller shrank its step below the allowed floor.

    Carries the abscissa reached so callers can report partial progress.
    """

    def __init__(self, message: str, abscissa: float, last_error: float | None = None):
        super().__init__(message)
        self.abscissa = abscissa
        self.last_error = last_error
