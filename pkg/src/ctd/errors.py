"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class CTDError(Exception):
    exit_code = 1


class ArgumentError(CTDError, ValueError):
    exit_code = 2


class ParseError(CTDError, ValueError):
    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ShapeError(CTDError, ValueError):
    exit_code = 4


class InvalidModeError(CTDError, ValueError):
    exit_code = 4


class EmptyInputError(CTDError, ValueError):
    exit_code = 5


class BundleError(CTDError, OSError):
    exit_code = 6


class OracleTooLargeError(CTDError, MemoryError):
    exit_code = 7


class UndefinedMetricError(CTDError, ArithmeticError):
    exit_code = 8
