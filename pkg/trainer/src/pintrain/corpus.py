"""Corpus file access: sentinel-delimited uint16 streams and .seq text.

A ``.bin`` file is a flat little-endian uint16 stream; each sequence is
its content ids followed by one sentinel id, with nothing between
sequences and no padding on disk.  A ``.seq`` file is the same data as
text: one walk per line, space-separated tokens, sentinel-terminated.
Training rows keep the sentinel because predicting it is part of the
objective; the walk is only complete once the model chooses to stop.
"""

from __future__ import annotations

import json
import pathlib

import numpy as np

from .errors import CorpusError, DigestMismatchError
from .vocabfile import VocabFile

MANIFEST_NAME = "manifest.json"


def read_token_bin(path, vocab: VocabFile) -> list[list[int]]:
    """Split a uint16 stream at sentinels into per-sequence id rows."""
    raw = pathlib.Path(path).read_bytes()
    if len(raw) % 2:
        raise CorpusError(f"{path}: {len(raw)} bytes; uint16 stream must be even")
    ids = np.frombuffer(raw, dtype="<u2")
    rows: list[list[int]] = []
    current: list[int] = []
    for pos, i in enumerate(ids):
        i = int(i)
        if i >= len(vocab):
            raise CorpusError(
                f"{path}: id {i} at byte {2 * pos} outside table of {len(vocab)}"
            )
        current.append(i)
        if i == vocab.sentinel_id:
            if len(current) == 1:
                raise CorpusError(
                    f"{path}: empty sequence at byte {2 * pos}"
                )
            rows.append(current)
            current = []
    if current:
        raise CorpusError(f"{path}: trailing ids with no sentinel")
    if not rows:
        raise CorpusError(f"{path}: stream holds no sequences")
    return rows


def write_seq_file(path, rows: list[list[int]], vocab: VocabFile) -> None:
    """Write id rows as sentinel-terminated token lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            content = row[:-1] if row and row[-1] == vocab.sentinel_id else row
            tokens = [vocab.token_of(i) for i in content]
            fh.write(" ".join((*tokens, vocab.token_of(vocab.sentinel_id))))
            fh.write("\n")


def check_manifest(bin_path, vocab: VocabFile, context: int) -> None:
    """Cross-check a corpus directory manifest against the loaded table.

    The manifest is optional on disk (a bare .bin is self-describing),
    but when present its table digest and sequence bound must agree with
    what this run is about to train with.
    """
    manifest_path = pathlib.Path(bin_path).parent / MANIFEST_NAME
    if not manifest_path.exists():
        return
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    recorded = manifest.get("vocab_sha256")
    if recorded is not None and recorded != vocab.sha256():
        raise DigestMismatchError(
            f"{manifest_path} was built against table {recorded[:12]}..., "
            f"loaded table is {vocab.sha256()[:12]}..."
        )
    max_len = manifest.get("max_seq_len")
    if max_len is not None and max_len > context:
        raise DigestMismatchError(
            f"{manifest_path} allows sequences up to {max_len}, "
            f"model context is {context}"
        )
