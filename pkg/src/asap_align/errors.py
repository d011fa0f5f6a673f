"""Exception taxonomy shared across the pipeline."""


class AsapError(Exception):
    """Base class for all pipeline errors."""


class StateParseError(AsapError, ValueError):
    """No well-formed match-state token in an OCR text."""


class IncomparableStatesError(AsapError, TypeError):
    """States of different variants (or clock directions) cannot be ordered."""


class UnsupportedEventError(AsapError, ValueError):
    """Operation defined only for cricket events was given something else."""


class DimensionMismatchError(AsapError, ValueError):
    """Two rasters that must share a shape do not."""


class NoScorecardError(AsapError):
    """Locator found no candidate box whose content advances gradually.

    Carries the per-candidate scores so callers can report diagnostics.
    """

    def __init__(self, message: str, scores: list | None = None):
        super().__init__(message)
        self.scores = scores or []


class SchemaError(AsapError, ValueError):
    """Commentary document violates the canonical schema; `path` locates it."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DuplicateStateError(SchemaError):
    """Two cricket commentary entries share one over-ball key."""


class QueryParseError(AsapError, ValueError):
    """Query text does not follow the table grammar; `offset` is 0-based."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EmptyCorpusError(AsapError, ValueError):
    """Empirical probability asked over zero chains."""


class TransportError(AsapError):
    """Retryable network failure talking to the remote OCR service."""


class ServiceError(AsapError):
    """Non-retryable error response from the remote OCR service."""


class QuotaError(AsapError):
    """Remote OCR service rejected the call for quota/billing reasons."""


class InfeasibleSplitError(AsapError, ValueError):
    """A single match is too large for any 60:20:20 partition."""


class LengthMismatchError(AsapError, ValueError):
    """Reference marks and predicted events differ in count."""


class PipelineError(AsapError):
    """Recoverable pipeline-level failure, reported with a module prefix."""
