"""Exception taxonomy shared across the package.

Three broad categories map onto the CLI exit-code contract: malformed or
out-of-contract input (exit 2), data that fails a statistical precondition
(exit 3), and internal numerical breakdown (exit 4).
"""


class EpicorrError(Exception):
    """Base class for every package-specific error."""


class InputError(EpicorrError, ValueError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class StatisticalError(EpicorrError):
    """Well-formed input that fails a statistical precondition (exit 3)."""


class NumericalError(EpicorrError):
    """Internal numerical breakdown (exit 4)."""


# --- ingest -----------------------------------------------------------------

class MalformedRow(InputError):
    """A data row could not be parsed; carries the 1-based file line number."""

    def __init__(self, line: int, detail: str = ""):
        self.line = line
        msg = f"line {line}: unparsable row"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NonPositivePrice(InputError):
    """A parsed price was zero or negative; carries the line number."""

    def __init__(self, line: int):
        self.line = line
        super().__init__(f"line {line}: price must be strictly positive")


class TooShort(InputError):
    """Fewer valid observations than the operation requires."""


class DegenerateSeries(InputError):
    """All observations identical; higher moments are undefined."""


# --- window statistics ------------------------------------------------------

class DegenerateWindow(StatisticalError):
    """Constant window (zero standard deviation); cannot standardize."""


class LagOutOfRange(InputError):
    """Requested lag is not representable inside the window."""


class LagOrderViolation(InputError):
    """Bicorrelation lags must satisfy 0 < r < s."""


class InvalidDof(InputError):
    """Chi-square degrees of freedom must be a positive integer."""


class NumericalBreakdown(NumericalError):
    """An internal recursion left its validity region (e.g. |k| > 1)."""


# --- rolling / clusters -----------------------------------------------------

class SeriesTooShort(InputError):
    """Return series shorter than one window."""


class EmptyInput(InputError):
    """Operation requires a non-empty sequence."""


class EmptyTable(StatisticalError):
    """No clusters to summarize."""


# --- power law --------------------------------------------------------------

class AlphaOutOfRange(InputError):
    """Power-law exponent outside the supported range (must exceed 1)."""


class DegenerateSample(StatisticalError):
    """All tail samples identical; the exponent is unidentifiable."""


class NoInteriorMaximum(StatisticalError):
    """Likelihood maximized at the search boundary; fit not trustworthy."""


class EmptyTail(StatisticalError):
    """No samples at or above the requested lower bound."""


class InsufficientData(StatisticalError):
    """Too few samples (or too few distinct values) to attempt a fit."""


# --- synthetic generators ---------------------------------------------------

class NonStationaryCoefficients(InputError):
    """Autoregressive polynomial has a root on or inside the unit circle."""
