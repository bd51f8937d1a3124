"""
Exceptions raised by the forecast rating library.
Library code raises these, only the CLI turns them into exit codes.
"""
# -*- coding: utf-8 -*-


class RatingError(Exception):
    """Base error for the forecast rating library."""


class InputValidationError(RatingError, ValueError):
    """Inputs violate the contract of an operation."""


class NumericalError(RatingError, ArithmeticError):
    """A quantity cannot be computed for the given parameters."""


class DegenerateDispersion(InputValidationError):
    """Negative binomial requested with variance <= mean; use Poisson instead."""


class RateOutOfRange(InputValidationError):
    """Rate is not positive or exceeds the supported maximum."""


class NonPositivePrediction(InputValidationError):
    """A bucket key was requested for a prediction <= 0."""


class NonIntegerActual(InputValidationError):
    """An observed count is not an integer."""


class NegativeValue(InputValidationError):
    """A prediction or actual is negative or not finite."""


class EmptyInput(InputValidationError):
    """An operation needing at least one pair received none."""


class ZeroActualTotal(NumericalError):
    """A relative metric or bias factor was requested but the actuals sum to 0."""


class NonMonotoneReferences(InputValidationError):
    """Reference values are not strictly increasing along the grade order."""


class NoRatableBuckets(RatingError):
    """Every bucket was excluded from the overall score."""


class InsufficientHistory(InputValidationError):
    """A series panel is too short for the requested forecasting model."""


class UnknownMetric(InputValidationError):
    """A metric name is not one of the supported kinds."""


class MissingFile(RatingError, FileNotFoundError):
    """A required input file does not exist."""


class SchemaMismatch(InputValidationError):
    """
    A tabular input does not have the expected columns or values.
    Carries the missing and unexpected columns and the offending line numbers.
    """

    def __init__(self, message, missing=(), unexpected=(), lines=()):
        self.missing = list(missing)
        self.unexpected = list(unexpected)
        self.lines = list(lines)
        details = []
        if self.missing:
            details.append("missing columns: " + ", ".join(self.missing))
        if self.unexpected:
            details.append("unexpected columns: " + ", ".join(self.unexpected))
        if self.lines:
            shown = ", ".join(str(line) for line in self.lines[:20])
            if len(self.lines) > 20:
                shown += ", ..."
            details.append("lines: " + shown)
        super().__init__(message if not details else message + " (" + "; ".join(details) + ")")


class ConfigError(InputValidationError):
    """The run configuration is invalid. Carries every problem found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid configuration: " + "; ".join(self.problems))
