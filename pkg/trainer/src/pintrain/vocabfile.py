"""Read-only view of a token table stored as ``token<TAB>id`` lines.

The table is the contract between the corpus tooling and this trainer:
ids in the binary corpus index into it, the walk prompt and the end
sentinel are looked up in it by name, and its sha256 (over the canonical
serialization, one ``token\\tid`` line per entry) stamps corpora and
checkpoints so artifacts from different tables never silently mix.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import VocabFileError

PROMPT_TOKEN = "VSS"
SENTINEL_TOKEN = "TRUNCATE"


@dataclass(frozen=True)
class VocabFile:
    tokens: tuple[str, ...]
    _ids: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ids = {tok: i for i, tok in enumerate(self.tokens)}
        if len(ids) != len(self.tokens):
            raise VocabFileError("token table has duplicate entries")
        for required in (PROMPT_TOKEN, SENTINEL_TOKEN):
            if required not in ids:
                raise VocabFileError(f"token table lacks {required!r}")
        object.__setattr__(self, "_ids", ids)

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise VocabFileError(f"unknown token {token!r}") from None

    def token_of(self, i: int) -> str:
        if not 0 <= i < len(self.tokens):
            raise VocabFileError(f"id {i} outside table of {len(self.tokens)}")
        return self.tokens[i]

    @property
    def prompt_id(self) -> int:
        return self._ids[PROMPT_TOKEN]

    @property
    def sentinel_id(self) -> int:
        return self._ids[SENTINEL_TOKEN]

    def sha256(self) -> str:
        text = "".join(f"{tok}\t{i}\n" for i, tok in enumerate(self.tokens))
        return hashlib.sha256(text.encode()).hexdigest()


def load_vocab(path) -> VocabFile:
    """Parse a table file; ids must be dense and start at zero."""
    pairs: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                tok, i = line.rstrip("\n").split("\t")
                pairs.append((int(i), tok))
            except ValueError:
                raise VocabFileError(
                    f"{path}:{line_no}: expected 'token<TAB>id'"
                ) from None
    pairs.sort()
    if [i for i, _ in pairs] != list(range(len(pairs))):
        raise VocabFileError(f"{path}: ids must be dense and start at 0")
    return VocabFile(tuple(tok for _, tok in pairs))
