"""Exception hierarchy.

CLI exit codes key off these: ``InputError`` subclasses map to 2,
``DegenerateError`` subclasses map to 3.
"""


class GTIError(Exception):
    """Base class for all package errors."""


class InputError(GTIError, ValueError):
    """Malformed input or violated precondition."""


class ParseError(InputError):
    """A votes/predictions file could not be parsed.

    ``row`` and ``column`` are 1-based when known (row 1 is the header).
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {column!r})" if column is not None else ")")
        super().__init__(message + where)


class ConfigurationError(InputError):
    pass


class PreconditionError(InputError):
    pass


class DegenerateError(GTIError):
    """The data cannot support the requested estimate."""


class DegenerateCountsError(DegenerateError):
    pass


class InfeasibleError(DegenerateError):
    """Values exist but are not admissible (complex or outside [0, 1])."""


class ComplexSolutionError(InfeasibleError):
    pass


class InsufficientDataError(DegenerateError):
    pass
