"""Exception hierarchy shared by the library and the command line."""


class PlasticityError(Exception):
    """Base class for every error raised by this package."""


class InputError(PlasticityError, ValueError):
    """Malformed or out-of-range input (bad letter, bad length, ...)."""


class PreconditionError(PlasticityError):
    """Input is well-formed but violates an operation's precondition."""


class ConvergenceError(PlasticityError):
    """An iterative procedure did not converge within its budget."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class LimitError(PlasticityError):
    """An internal search or materialization budget was exceeded."""


class ConsistencyError(PlasticityError):
    """Internal cross-check failed; indicates a bug, not bad input."""


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
