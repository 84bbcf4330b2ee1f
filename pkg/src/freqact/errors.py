"""Exception hierarchy. Each category maps to one CLI exit code."""

from __future__ import annotations


class FreqactError(Exception):
    exit_code = 1


class ParseError(FreqactError):
    """Malformed input line. ``line`` is 1-based (None when not file-backed)."""

    exit_code = 4

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RangeError(ParseError):
    exit_code = 5


class EmptyInputError(FreqactError):
    exit_code = 6


class InsufficientDataError(FreqactError):
    exit_code = 7


class ParameterError(FreqactError, ValueError):
    exit_code = 8


class AlignmentError(FreqactError):
    exit_code = 9


class ScriptError(FreqactError):
    exit_code = 10


# Exit codes used by the command line tool, documented in the README.
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
