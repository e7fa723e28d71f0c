"""Exception types shared across the package.

Every error raised by prefstack derives from PrefstackError so callers can
catch the whole family at API boundaries.
"""


class PrefstackError(Exception):
    """Base class for all prefstack errors."""


class UnknownAction(PrefstackError):
    """An action id does not resolve in the task definition."""


class TrailingSecondary(PrefstackError):
    """A raw action log ends with secondary actions (no closing primary)."""


class EmptyLog(PrefstackError):
    """A raw action log contains no actions."""


class OutOfRange(PrefstackError):
    """A step index is outside the demonstration's bounds."""


class MalformedMatrix(PrefstackError):
    """A distance matrix is asymmetric, non-square, or has negative entries."""


class DegenerateK(PrefstackError):
    """Variance ratio requested for k=1 or k=n, where it is undefined."""


class TooFewPoints(PrefstackError):
    """Partition selection needs at least two points."""


class TooFewUsers(PrefstackError):
    """Training or evaluation received fewer demonstrations than required."""


class UnknownEvent(PrefstackError):
    """An event identity is absent from the trained model."""


class WrongKind(PrefstackError):
    """An action of the wrong kind was passed (e.g. secondary where primary expected)."""


class NoPendingPrediction(PrefstackError):
    """Feedback arrived but no prediction is outstanding."""


class MissingActual(PrefstackError):
    """A rejection must carry the secondary set the user actually performed."""


class PendingFeedback(PrefstackError):
    """A primary action arrived while a prediction still awaits feedback."""


class SchemaMismatch(PrefstackError):
    """A file declares an unsupported schema_version."""


class ParseError(PrefstackError):
    """A file failed to parse; the message carries line/field diagnostics."""


class InconsistentPreset(PrefstackError):
    """A synthetic-corpus preset cannot realize its declared event structure."""


class DegenerateInput(PrefstackError):
    """Statistical test input admits no finite statistic (e.g. all-zero differences)."""
