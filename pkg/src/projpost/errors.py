"""Exception hierarchy.

Every error raised by this package derives from ProjpostError and carries an
exit code used by the command-line layer: 1 for bad input, 2 for numerical
failures, 3 for configuration problems.
"""
from __future__ import annotations


class ProjpostError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class SchemaError(ProjpostError):
    """Structurally invalid input: missing columns, unknown names, bad spec files."""

    exit_code = 1


class ParseError(ProjpostError):
    """Input that could not be parsed into numbers."""

    exit_code = 1


class InsufficientDrawsError(ProjpostError):
    """Too few posterior draws to summarize."""

    exit_code = 1


class RankError(ProjpostError):
    """Rank-deficient design or Gram matrix."""

    exit_code = 2

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class NumericalError(ProjpostError):
    """Numerical failure outside rank problems: non-finite values, failed checks."""

    exit_code = 2


class DivergenceError(NumericalError):
    """A sampler variance draw left the plausible range."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class PathError(ProjpostError):
    """Stepwise search could not continue: no viable candidate remained."""

    exit_code = 2


class ConfigError(ProjpostError):
    """Inconsistent options or flags."""

    exit_code = 3
