"""Exception hierarchy shared across the toolkit.

The CLI maps these onto its exit-code contract: ConfigError -> 1,
DataError -> 2, ProviderError -> 3.
"""


class TransalignError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TransalignError):
    """Invalid configuration or usage (bad thresholds, missing files, ...)."""


class DataError(TransalignError):
    """Malformed or inconsistent input data."""


class CorpusFormatError(DataError):
    """Corpus file cannot be read or decoded."""


class LexiconFormatError(DataError):
    """Stop-word or synonym file is malformed."""


class GoldMismatchError(DataError):
    """Gold reference does not cover the alignment being scored."""


class ProviderError(TransalignError):
    """Translation provider failure."""


class ProviderTimeoutError(ProviderError):
    """Provider did not answer within the configured timeout (after retries)."""


class ProviderStatusError(ProviderError):
    """Provider answered with a non-success status (after retries)."""


class ProviderResponseError(ProviderError):
    """Provider answer could not be parsed into a translation."""


class TranslationFailedError(ProviderError):
    """A corpus translation aborted; carries the failing line index."""

    def __init__(self, line_index: int, cause: Exception):
        super().__init__(f"translation failed at line index {line_index}: {cause}")
        self.line_index = line_index
        self.cause = cause
