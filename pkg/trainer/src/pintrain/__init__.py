"""Decoder-only transformer pretraining on pin-walk token corpora.

This package consumes the corpus tooling's on-disk artifacts (the
``token<TAB>id`` table, sentinel-delimited uint16 ``.bin`` streams, and
``.seq`` walk text) and nothing else; the two codebases talk only
through those files.  It trains a next-token model on whole walks and
samples new walks from the ``VSS`` prompt for the corpus tooling to
score.
"""

from .config import TrainConfig, load_config
from .corpus import check_manifest, read_token_bin, write_seq_file
from .errors import (
    CheckpointError,
    ConfigError,
    CorpusError,
    DigestMismatchError,
    TrainerError,
    VocabFileError,
)
from .model import WalkTransformer
from .train import (
    EpochStats,
    load_checkpoint,
    mean_loss,
    save_checkpoint,
    train,
    write_loss_csv,
)
from .vocabfile import PROMPT_TOKEN, SENTINEL_TOKEN, VocabFile, load_vocab

__all__ = [
    "TrainConfig",
    "load_config",
    "check_manifest",
    "read_token_bin",
    "write_seq_file",
    "TrainerError",
    "VocabFileError",
    "CorpusError",
    "DigestMismatchError",
    "ConfigError",
    "CheckpointError",
    "WalkTransformer",
    "EpochStats",
    "train",
    "mean_loss",
    "save_checkpoint",
    "load_checkpoint",
    "write_loss_csv",
    "VocabFile",
    "load_vocab",
    "PROMPT_TOKEN",
    "SENTINEL_TOKEN",
]

__version__ = "0.1.0"
