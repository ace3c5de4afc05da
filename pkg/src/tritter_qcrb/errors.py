"""Exception hierarchy shared by the engines, the estimator and the CLI."""


class TritterError(Exception):
    pass


class ConfigError(TritterError, ValueError):
    """Bad scenario configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(TritterError, ArithmeticError):
    pass


class TruncationError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class SingularQFIMError(NumericalError):
    pass
