"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
BackendError -> 4.
"""


class NddError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(NddError):
    """Invalid flag/option combination or parameter value."""


class DataError(NddError):
    """Malformed or inconsistent input data (datasets, bundles)."""


class BackendError(NddError):
    """Model loading or inference failure."""


class VocabMismatchError(NddError):
    """Two distributions are bound to different vocabularies."""


class DimensionMismatchError(NddError):
    """Vector or list lengths that must agree do not."""


class SequenceTooLongError(DataError):
    """Tokenized sentence exceeds the backend's sequence limit."""

    def __init__(self, needed: int, limit: int):
        super().__init__(f"sequence needs {needed} tokens but the backend accepts at most {limit}")
        self.needed = needed
        self.limit = limit


class DegenerateCorpusError(DataError):
    """A metric is undefined on this corpus (e.g. AUC with one class)."""


class UnsupportedOperationError(BackendError):
    """The selected backend or mode does not support the requested operation."""
