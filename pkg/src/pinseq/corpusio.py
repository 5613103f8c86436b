"""On-disk formats: ``.seq`` text, binary id corpora, digest lists.

These formats are the seam between this toolkit and downstream trainers,
so they are deliberately dull:

* ``.seq``   one sequence per line, space-separated tokens, terminated by
             the sentinel token.
* ``.bin``   little-endian uint16 ids, sequences delimited by the sentinel
             id, no padding anywhere.
* ``hashes.txt``  one lowercase hex digest per line.

Readers validate hard and fail with byte offsets; a trainer that can read
these files needs nothing else from this package.
"""

from __future__ import annotations

import numpy as np

from .errors import CorruptStreamError, EmptySequenceError
from .euler import SOURCE_GENERATED, TokenSequence
from .vocab import Vocab


def write_seq_file(path, sequences) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sequences:
            fh.write(s.to_text())
            fh.write("\n")


def read_seq_file(path, source: str = SOURCE_GENERATED) -> list[TokenSequence]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(TokenSequence.from_text(line, source))
    return out


def export_corpus(sequences, vocab: Vocab, path) -> int:
    """Write sequences as a sentinel-delimited uint16 stream.

    Returns the number of sequences written.  Ids are content only plus
    one sentinel per sequence; the pad id never reaches disk.
    """
    ids: list[int] = []
    count = 0
    for s in sequences:
        if not s.tokens:
            raise EmptySequenceError("refusing to export an empty sequence")
        ids.extend(vocab.id_of(t) for t in s.tokens)
        ids.append(vocab.truncate_id)
        count += 1
    np.asarray(ids, dtype="<u2").tofile(path)
    return count


def import_samples(path, vocab: Vocab) -> list[TokenSequence]:
    """Read a sentinel-delimited uint16 stream back into sequences.

    Raises CorruptStreamError, with the byte offset, for odd-length
    files, ids outside the vocab, and trailing content with no sentinel.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) % 2:
        raise CorruptStreamError(
            f"stream is {len(raw)} bytes; uint16 stream must be even"
        )
    ids = np.frombuffer(raw, dtype="<u2")
    out: list[TokenSequence] = []
    current: list[str] = []
    for pos, i in enumerate(ids):
        if i >= len(vocab):
            raise CorruptStreamError(
                f"id {int(i)} at byte {2 * pos} outside vocab of {len(vocab)}"
            )
        if i == vocab.truncate_id:
            if not current:
                raise CorruptStreamError(
                    f"empty sequence: sentinel at byte {2 * pos} follows another"
                )
            out.append(TokenSequence(tuple(current), SOURCE_GENERATED))
            current = []
        else:
            current.append(vocab.token_of(int(i)))
    if current:
        raise CorruptStreamError(
            f"{len(current)} trailing ids after byte "
            f"{2 * (len(ids) - len(current))} lack a sentinel"
        )
    return out


def write_hashes(path, digests) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in digests:
            fh.write(d)
            fh.write("\n")


def read_hashes(path) -> set[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}
