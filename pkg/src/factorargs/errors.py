"""Exception hierarchy shared across the package."""


class FactorArgsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FactorArgsError):
    """Malformed input: bad scopes, unknown variables or states, broken invariants."""


class NumericError(FactorArgsError):
    """Numerically undefined result: division by zero mass, all-zero factors."""


class CapacityError(FactorArgsError):
    """A configured size, path-count or time budget was exceeded."""


class BifParseError(ValidationError):
    """Syntax or semantic error in a BIF document, with source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
