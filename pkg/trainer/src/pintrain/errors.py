"""Exception taxonomy; everything raised on purpose derives from TrainerError."""


class TrainerError(Exception):
    """Base class for all errors this package raises deliberately."""


class VocabFileError(TrainerError):
    """The token table file is malformed."""


class CorpusError(TrainerError):
    """The binary id stream is corrupt or inconsistent with the vocab."""


class DigestMismatchError(TrainerError):
    """An artifact was produced against a different token table."""


class ConfigError(TrainerError):
    """The training configuration is malformed or internally inconsistent."""


class CheckpointError(TrainerError):
    """The checkpoint file is unreadable or from a different setup."""
