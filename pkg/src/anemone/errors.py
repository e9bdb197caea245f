"""Exception types raised by the anemone package.

Every error below derives from :class:`AnemoneError` so callers can catch
package failures with a single except clause, and from a fitting builtin
(``ValueError`` or ``ArithmeticError``) so generic handling keeps working.
"""


class AnemoneError(Exception):
    """Base class for all errors raised by this package."""


class LineParseError(AnemoneError, ValueError):
    """A text input file is malformed at a specific line.

    Carries the file path and 1-based line number of the offending line so
    the message pinpoints the failure (``path:line: reason``).
    """

    def __init__(self, path, lineno, reason):
        self.path = str(path)
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"{self.path}:{lineno}: {reason}")


class GraphParseError(LineParseError):
    """A graph input file (edges, features, labels) is malformed."""


class ConfigError(LineParseError):
    """A configuration file is malformed or contains unknown keys."""


class FileFormatError(LineParseError):
    """A produced artifact (scores CSV, checkpoint) fails to parse back."""


class ShapeError(AnemoneError, ValueError):
    """An array argument has the wrong shape or inconsistent dimensions."""


class RangeError(AnemoneError, ValueError):
    """An index or id lies outside the valid range for the graph."""


class CapacityError(AnemoneError, ValueError):
    """A request exceeds what the graph can supply (e.g. too many anomalies)."""


class BatchError(AnemoneError, ValueError):
    """Mini-batch inputs disagree in size or are empty."""


class StateError(AnemoneError, ValueError):
    """A stateful object was used before being initialised, or a checkpoint
    does not match the model it is being loaded into."""


class NumericError(AnemoneError, ArithmeticError):
    """A numeric quantity left its valid domain (NaN, overflow, ...)."""


class UndefinedMetricError(AnemoneError, ValueError):
    """A metric is undefined for the given inputs (e.g. single-class AUC)."""
