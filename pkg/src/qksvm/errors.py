"""Exception types shared across the package.

Shape, size and index violations raise plain ``ValueError``/``IndexError``;
the classes here cover failures the CLI maps to dedicated exit codes.
"""


class ParseError(ValueError):
    """Malformed pixel table content. Carries file path and line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif path is not None:
            where += " "
        super().__init__(f"{where}{message}")


class SelectionError(ValueError):
    """No patch survived the cloudiness/fill filters."""


class SamplingError(ValueError):
    """Not enough pixels to draw the requested train/test split."""


class DegenerateError(ValueError):
    """Numerically degenerate input (zero variance, zero-norm kernel, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


#: Exceptions the CLI reports as data problems (exit code 3).
DATA_ERRORS = (ParseError, SelectionError, SamplingError, DegenerateError, OSError)
