"""Exception types shared across the package."""


class WikimimError(Exception):
    """Base class for all package errors."""


class CorpusError(WikimimError):
    """Corpus ingestion failure (missing file, empty request set, ...)."""


class FetchError(WikimimError):
    """Remote fetch could not be attempted at all (bad arguments)."""


class ChainError(WikimimError):
    """Chain training or query failure."""


class ChainFormatError(ChainError):
    """Serialized chain payload is malformed or has the wrong version."""


class StrategyError(WikimimError):
    """Invalid target strategy."""


class StaleMimError(WikimimError):
    """MIM object does not match the text it is being applied to."""


class StoreError(WikimimError):
    """Article store misuse (unknown article, duplicate id, ...)."""


class DetectError(WikimimError):
    """Detector invoked with unusable inputs."""
