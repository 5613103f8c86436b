"""Token vocabulary and the id-level codec.

The vocabulary is a fixed lookup table mapping every node token to a
dense integer id.  Layout is block-structured and instance-major: for
each device kind, instance 1's device token is followed by its pin
tokens in role order, then instance 2, and so on; terminals follow the
device blocks and the sentinel is last.  The default table also carries
``RSV<id>`` reserved fillers so that the published anchor ids (NM1 = 0,
PM1 = 125, ..., VSS = 1027, TRUNCATE = 1028) hold with a total size of
1029 entries.

The pad id is one past the last entry.  It exists only for fixed-width
in-memory arrays; serialized corpora are sentinel-delimited and never
contain it.
"""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache

from .devices import (
    DEFAULT_TERMINALS,
    KINDS,
    DeviceKind,
    NodeClass,
    NodeInfo,
    parse_node_token,
)
from .errors import (
    DuplicateNameError,
    EmptySequenceError,
    IdOutOfRangeError,
    MissingTruncateError,
    SequenceTooLongError,
    UnknownTokenError,
)
from .euler import TRUNCATE, SOURCE_GENERATED, TokenSequence

_RSV_RE = re.compile(r"RSV\d+\Z")

DEFAULT_MAX_SEQ_LEN = 1024


class Vocab:
    """Immutable token table with classification of every entry.

    Entries are classified once at construction: device/pin tokens parse
    against the catalog, ``TRUNCATE`` is the sentinel, ``RSV*`` names are
    reserved filler, and anything else is a terminal.  Terminal order (by
    id) is the terminal rank used everywhere else.
    """

    __slots__ = (
        "tokens", "max_seq_len", "truncate_id", "pad_id", "terminals",
        "_ids", "_infos", "_lazy_structure",
    )

    def __init__(self, tokens, max_seq_len: int = DEFAULT_MAX_SEQ_LEN):
        toks = tuple(tokens)
        ids: dict[str, int] = {}
        infos: list[NodeInfo | None] = []
        terminals: list[str] = []
        for i, tok in enumerate(toks):
            if tok in ids:
                raise DuplicateNameError(f"token {tok!r} assigned twice")
            ids[tok] = i
            if tok == TRUNCATE or _RSV_RE.match(tok):
                infos.append(None)
                continue
            try:
                info = parse_node_token(tok, ())
            except UnknownTokenError:
                terminals.append(tok)
                infos.append(None)  # patched after terminal list is final
            else:
                infos.append(info)
        if TRUNCATE not in ids:
            raise DuplicateNameError("vocab must contain the sentinel")
        term_tuple = tuple(terminals)
        for i, tok in enumerate(toks):
            if infos[i] is None and tok in term_tuple:
                infos[i] = parse_node_token(tok, term_tuple)

        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "max_seq_len", max_seq_len)
        object.__setattr__(self, "truncate_id", ids[TRUNCATE])
        object.__setattr__(self, "pad_id", len(toks))
        object.__setattr__(self, "terminals", term_tuple)
        object.__setattr__(self, "_ids", ids)
        object.__setattr__(self, "_infos", tuple(infos))

    def __setattr__(self, name, value):
        raise AttributeError("Vocab is immutable")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise UnknownTokenError(f"token not in vocab: {token!r}") from None

    def token_of(self, i: int) -> str:
        if not 0 <= i < len(self.tokens):
            raise IdOutOfRangeError(f"id {i} outside 0..{len(self.tokens) - 1}")
        return self.tokens[i]

    def node_info(self, i: int) -> NodeInfo | None:
        """Parsed identity of entry i; None for the sentinel and reserved ids."""
        if not 0 <= i < len(self.tokens):
            raise IdOutOfRangeError(f"id {i} outside 0..{len(self.tokens) - 1}")
        return self._infos[i]

    # --- serialization -----------------------------------------------------

    def dumps(self) -> str:
        return "".join(f"{tok}\t{i}\n" for i, tok in enumerate(self.tokens))

    def digest(self) -> str:
        """sha256 of the serialized table; binds models and corpora to it."""
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, max_seq_len: int = DEFAULT_MAX_SEQ_LEN) -> "Vocab":
        pairs = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                tok, i = line.split("\t")
                pairs.append((int(i), tok))
            except ValueError:
                raise UnknownTokenError(
                    f"vocab file line {line_no} is not 'token<TAB>id'"
                ) from None
        pairs.sort()
        if [i for i, _ in pairs] != list(range(len(pairs))):
            raise IdOutOfRangeError("vocab ids must be dense and start at 0")
        return cls((tok for _, tok in pairs), max_seq_len)

    @classmethod
    def load(cls, path, max_seq_len: int = DEFAULT_MAX_SEQ_LEN) -> "Vocab":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read(), max_seq_len)


def build_vocab(
    kinds: tuple[DeviceKind, ...] = KINDS,
    terminals: tuple[str, ...] = DEFAULT_TERMINALS,
    max_counts: dict[str, int] | None = None,
    max_seq_len: int = DEFAULT_MAX_SEQ_LEN,
) -> Vocab:
    """Assemble a gap-free vocab from a catalog and a terminal list.

    Blocks are instance-major in catalog order, terminals follow, the
    sentinel is last.  ``max_counts`` overrides per-kind instance budgets
    (useful for small experimental tables).  Terminal names that would
    parse as device tokens are rejected; they would make node
    classification ambiguous.
    """
    overrides = max_counts or {}
    tokens: list[str] = []
    for kind in kinds:
        count = overrides.get(kind.name, kind.max_count)
        if not 0 <= count <= kind.max_count:
            # indices past the catalog budget are not parseable node tokens
            raise ValueError(
                f"{kind.name} supports at most {kind.max_count} instances"
            )
        for idx in range(1, count + 1):
            tokens.append(f"{kind.name}{idx}")
            tokens.extend(f"{kind.name}{idx}_{r}" for r in kind.pin_roles)
    for term in terminals:
        try:
            parse_node_token(term, ())
        except UnknownTokenError:
            tokens.append(term)
        else:
            raise DuplicateNameError(
                f"terminal {term!r} collides with a device token"
            )
    tokens.append(TRUNCATE)
    return Vocab(tokens, max_seq_len)


@lru_cache(maxsize=1)
def default_vocab() -> Vocab:
    """The published 1029-entry table, reserved fillers included."""
    tokens: list[str] = []
    for kind in KINDS[:9]:  # NM .. XOR
        for idx in range(1, kind.max_count + 1):
            tokens.append(f"{kind.name}{idx}")
            tokens.extend(f"{kind.name}{idx}_{r}" for r in kind.pin_roles)
    tokens.extend(f"RSV{i}" for i in range(len(tokens), 815))
    for kind in KINDS[9:]:  # INV, TG
        for idx in range(1, kind.max_count + 1):
            tokens.append(f"{kind.name}{idx}")
            tokens.extend(f"{kind.name}{idx}_{r}" for r in kind.pin_roles)
    tokens.extend(DEFAULT_TERMINALS[:7])  # VIN1..VIN5, IIN1, IIN2
    tokens.extend(f"RSV{i}" for i in range(len(tokens), 1024))
    tokens.extend(("LOGICQB1", "LOGICQB2", "VDD", "VSS"))
    tokens.append(TRUNCATE)
    return Vocab(tokens)


def encode_ids(s: TokenSequence, vocab: Vocab) -> list[int]:
    """Tokens to a fixed-width id array: content, sentinel, pad fill."""
    if not s.tokens:
        raise EmptySequenceError("cannot encode an empty sequence")
    if len(s.tokens) + 1 > vocab.max_seq_len:
        raise SequenceTooLongError(
            f"{len(s.tokens)} tokens + sentinel exceed max_seq_len {vocab.max_seq_len}"
        )
    ids = [vocab.id_of(tok) for tok in s.tokens]
    ids.append(vocab.truncate_id)
    ids.extend([vocab.pad_id] * (vocab.max_seq_len - len(ids)))
    return ids


def decode_ids(ids, vocab: Vocab) -> TokenSequence:
    """Id array back to tokens.  Content stops at the first sentinel.

    Ids past the sentinel are ignored (pad or garbage alike); ids before
    it must be real vocab entries.
    """
    ids = list(ids)
    content: list[int] = []
    for pos, i in enumerate(ids):
        if not 0 <= i <= vocab.pad_id:
            raise IdOutOfRangeError(f"id {i} at position {pos} outside vocab")
        if i == vocab.truncate_id:
            break
        if i == vocab.pad_id:
            raise IdOutOfRangeError(f"pad id at position {pos} before sentinel")
        content.append(i)
    else:
        raise MissingTruncateError("id array has no sentinel")
    return TokenSequence(
        tuple(vocab.token_of(i) for i in content), SOURCE_GENERATED
    )
