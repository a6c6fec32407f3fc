"""Exception hierarchy for the vulntrust toolkit.

Every domain error derives from VulnTrustError so callers can catch the
whole family at an interface boundary (CLI exit code 2/3, HTTP 4xx)
while library code raises the specific class named in each contract.
"""

from __future__ import annotations


class VulnTrustError(Exception):
    """Base class for all errors raised by this package."""


class UndefinedOperandError(VulnTrustError, ArithmeticError):
    """An operator was applied at a locus where its formula is undefined.

    Conjunction is undefined when both priors are exactly 1; disjunction
    when both priors are exactly 0.
    """


class InvalidWeightsError(VulnTrustError, ValueError):
    """A fusion weight set is unusable (all zero, or a zero-sum pair)."""


class ParseError(VulnTrustError):
    """An input file violates its schema.

    Carries optional ``row`` (1-based, header included) and ``path``
    context for CLI error messages.
    """

    def __init__(self, message: str, *, row: int | None = None, path: str | None = None):
        self.row = row
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}: "
        if row is not None:
            where += f"row {row}: "
        super().__init__(where + message)


class EmptyDatasetError(VulnTrustError):
    """Ingestion produced no usable vulnerability records."""


class MissingDatesError(VulnTrustError):
    """More than half of the CVE identifiers could not be dated."""


class UnknownComponentError(VulnTrustError, KeyError):
    """The requested component has no records in the dataset."""


class EmptyHistoryError(VulnTrustError, ValueError):
    """A predictor was given an empty training window."""


class InvalidAlphaError(VulnTrustError, ValueError):
    """Exponential-decay parameter outside (0, 1]."""


class WindowOutOfRangeError(VulnTrustError, ValueError):
    """A train/validation/test window falls outside the series range."""


class NegativePredictionError(VulnTrustError, ValueError):
    """An imported prediction or error estimate is negative."""


class EmptyInputError(VulnTrustError, ValueError):
    """An aggregate (e.g. rmse) was asked for on an empty list."""


class MissingPredictionError(VulnTrustError, KeyError):
    """An external predictions file does not cover a requested component."""


class SchemaError(VulnTrustError, ValueError):
    """A system-structure document violates the JSON schema."""


class NotReadOnceError(VulnTrustError):
    """Formula evaluation requires each atom to appear exactly once."""


class MissingOpinionError(VulnTrustError, KeyError):
    """A formula atom has no assessed opinion."""


class UnsimplifiableError(VulnTrustError):
    """Term deletion would empty the formula."""
