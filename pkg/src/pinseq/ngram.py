"""Count-based n-gram baseline with walk-legality masking.

The model is a plain conditional count table with stupid backoff: the
score of token w after context c is the relative frequency of w under the
deepest suffix of c that was ever observed, discounted by alpha for each
level of backoff below the deepest observed suffix.  Scores are not a
probability until normalized, which suits sampling fine.

Sampling pipeline, in order: backoff scores, temperature, top-k, then the
legality mask, then renormalize.  The mask encodes the structural rules a
token walk must follow (edge class rules, per-kind device budgets, the
sentinel only while standing on VSS), so masked samples can always be
decoded back into a graph.  When the mask empties the support entirely
the sampler falls back: to the sentinel when standing on VSS, otherwise
to the unmasked distribution with a flag raised in the result.

Everything is deterministic given (corpus, order, alpha) for fitting and
(model, config) for sampling.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .devices import NodeClass
from .errors import (
    BadOrderError,
    CorruptStreamError,
    EmptyContextError,
    EmptyCorpusError,
    IdOutOfRangeError,
)
from .euler import SOURCE_GENERATED, TokenSequence
from .vocab import Vocab

_MAGIC = b"PSQN"
_VERSION = 1


@dataclass(frozen=True)
class SamplerConfig:
    temperature: float = 1.0
    top_k: int | None = None
    legality_mask: bool = True
    max_len: int = 1024
    seed: int = 0

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be at least 1 when set")


@dataclass(frozen=True)
class NextDistribution:
    """Normalized probabilities over the id space, plus a fallback flag."""

    probs: np.ndarray
    fallback: bool = False


class _VocabStructure:
    """Per-vocab index arrays the legality mask is assembled from."""

    def __init__(self, vocab: Vocab) -> None:
        size = len(vocab)
        self.pin_mask = np.zeros(size, dtype=bool)
        self.terminal_mask = np.zeros(size, dtype=bool)
        self.device_id: dict[tuple[str, int], int] = {}
        self.instance_ids: dict[tuple[str, int], list[int]] = {}
        self.owner: dict[int, tuple[str, int]] = {}
        self.kind_instances: dict[str, set[int]] = {}
        self.kind_cap: dict[str, int] = {}
        for i in range(size):
            info = vocab.node_info(i)
            if info is None:
                continue
            if info.cls is NodeClass.TERMINAL:
                self.terminal_mask[i] = True
                continue
            key = (info.kind.name, info.index)
            self.owner[i] = key
            self.instance_ids.setdefault(key, []).append(i)
            self.kind_instances.setdefault(key[0], set()).add(info.index)
            self.kind_cap[key[0]] = info.kind.max_count
            if info.cls is NodeClass.PIN:
                self.pin_mask[i] = True
            else:
                self.device_id[key] = i
        self.vss_id = vocab.id_of("VSS")
        self.truncate_id = vocab.truncate_id


def _structure(vocab: Vocab) -> _VocabStructure:
    # cached on the (immutable) vocab itself so it lives exactly as long
    try:
        return object.__getattribute__(vocab, "_lazy_structure")
    except AttributeError:
        built = _VocabStructure(vocab)
        object.__setattr__(vocab, "_lazy_structure", built)
        return built


@dataclass
class WalkState:
    """Incremental view of a walk: where it stands and which devices exist.

    ``sample`` keeps one of these up to date token by token;
    ``next_distribution`` rebuilds one from raw context when not given
    any.  Tracks only what the mask needs.
    """

    current: int
    seen: dict[str, set[int]] = field(default_factory=dict)

    @classmethod
    def from_context(cls, context_ids, vocab: Vocab) -> "WalkState":
        if not context_ids:
            raise EmptyContextError("context must contain at least one token")
        st = _structure(vocab)
        state = cls(current=int(context_ids[-1]))
        for i in context_ids:
            key = st.owner.get(int(i))
            if key is not None:
                state.seen.setdefault(key[0], set()).add(key[1])
        return state

    def advance(self, token_id: int, vocab: Vocab) -> None:
        key = _structure(vocab).owner.get(int(token_id))
        if key is not None:
            self.seen.setdefault(key[0], set()).add(key[1])
        self.current = int(token_id)


def legal_next_mask(state: WalkState, vocab: Vocab) -> np.ndarray:
    """Boolean mask over the id space of walk-legal continuations."""
    st = _structure(vocab)
    info = vocab.node_info(state.current)
    if info is None:
        raise IdOutOfRangeError(
            f"id {state.current} is not a node token; walks stand on nodes"
        )
    if info.cls is NodeClass.TERMINAL:
        mask = st.pin_mask.copy()
    elif info.cls is NodeClass.DEVICE:
        mask = np.zeros(len(vocab), dtype=bool)
        for i in st.instance_ids[(info.kind.name, info.index)]:
            mask[i] = vocab.node_info(i).cls is NodeClass.PIN
    else:
        mask = st.pin_mask | st.terminal_mask
        mask[state.current] = False  # no self loops
        mask[st.device_id[(info.kind.name, info.index)]] = True

    # device budgets: once a kind is at capacity, unseen instances are out
    for kind_name, instances in st.kind_instances.items():
        seen = state.seen.get(kind_name, ())
        if len(seen) >= st.kind_cap[kind_name]:
            for idx in instances:
                if idx not in seen:
                    for i in st.instance_ids[(kind_name, idx)]:
                        mask[i] = False

    if state.current == st.vss_id:
        mask[st.truncate_id] = True
    return mask


class NgramModel:
    """Fitted backoff model bound to one vocab (by digest)."""

    def __init__(
        self,
        order: int,
        alpha: float,
        vocab_digest: str,
        size: int,
        unigram: np.ndarray,
        tables: dict[tuple[int, ...], dict[int, int]],
    ) -> None:
        if order < 2:
            raise BadOrderError("order must be at least 2")
        self.order = order
        self.alpha = alpha
        self.vocab_digest = vocab_digest
        self.size = size
        self.unigram = unigram.astype(np.float64)
        self.tables = tables
        self.totals = {ctx: sum(tbl.values()) for ctx, tbl in tables.items()}
        self._uni_scores = self.unigram / max(self.unigram.sum(), 1.0)

    # --- scoring -----------------------------------------------------------

    def scores(self, context_ids) -> np.ndarray:
        """Backoff scores for every candidate id given the context."""
        if not context_ids:
            raise EmptyContextError("context must contain at least one token")
        ctx = tuple(int(i) for i in context_ids[-(self.order - 1):])
        levels = []
        for k in range(1, len(ctx) + 1):
            suffix = ctx[len(ctx) - k:]
            if suffix in self.tables:
                levels.append(suffix)
        deepest = len(levels)
        out = (self.alpha ** deepest) * self._uni_scores
        for depth, suffix in enumerate(levels, start=1):
            w = self.alpha ** (deepest - depth)
            total = self.totals[suffix]
            for tok, count in self.tables[suffix].items():
                out[tok] = w * count / total
        return out

    # --- persistence ---------------------------------------------------------

    def save(self, path) -> None:
        """Versioned binary dump; byte-identical for identical models."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<HBdI", _VERSION, self.order, self.alpha, self.size))
            fh.write(bytes.fromhex(self.vocab_digest))
            fh.write(self.unigram.astype("<u8").tobytes())
            fh.write(struct.pack("<Q", len(self.tables)))
            for ctx in sorted(self.tables):
                tbl = self.tables[ctx]
                fh.write(struct.pack("<B", len(ctx)))
                fh.write(np.asarray(ctx, dtype="<u2").tobytes())
                fh.write(struct.pack("<I", len(tbl)))
                for tok in sorted(tbl):
                    fh.write(struct.pack("<HQ", tok, tbl[tok]))

    @classmethod
    def load(cls, path) -> "NgramModel":
        with open(path, "rb") as fh:
            raw = fh.read()
        try:
            if raw[:4] != _MAGIC:
                raise CorruptStreamError("not a model file (bad magic)")
            version, order, alpha, size = struct.unpack_from("<HBdI", raw, 4)
            if version != _VERSION:
                raise CorruptStreamError(f"unsupported model version {version}")
            pos = 4 + struct.calcsize("<HBdI")
            digest = raw[pos:pos + 32].hex()
            pos += 32
            unigram = np.frombuffer(raw, dtype="<u8", count=size, offset=pos).copy()
            pos += 8 * size
            (n_ctx,) = struct.unpack_from("<Q", raw, pos)
            pos += 8
            tables: dict[tuple[int, ...], dict[int, int]] = {}
            for _ in range(n_ctx):
                (clen,) = struct.unpack_from("<B", raw, pos)
                pos += 1
                ctx = tuple(
                    int(x) for x in np.frombuffer(raw, dtype="<u2", count=clen, offset=pos)
                )
                pos += 2 * clen
                (n_items,) = struct.unpack_from("<I", raw, pos)
                pos += 4
                tbl: dict[int, int] = {}
                for _ in range(n_items):
                    tok, count = struct.unpack_from("<HQ", raw, pos)
                    pos += struct.calcsize("<HQ")
                    tbl[tok] = count
                tables[ctx] = tbl
            if pos != len(raw):
                raise CorruptStreamError(f"{len(raw) - pos} trailing bytes")
        except (struct.error, ValueError) as exc:
            raise CorruptStreamError(f"truncated model file: {exc}") from None
        return cls(order, alpha, digest, size, unigram.astype(np.float64), tables)


def fit(
    sequences,
    vocab: Vocab,
    order: int = 5,
    alpha: float = 0.4,
) -> NgramModel:
    """Count a corpus of content-id sequences into a model.

    Each sequence is counted with the sentinel appended as a final target,
    so the model learns when to stop.  Counting is position-wise: for each
    position, every observed context suffix of length 1..order-1 gets one
    count toward the following token.
    """
    if order < 2:
        raise BadOrderError("order must be at least 2")
    size = len(vocab)
    unigram = np.zeros(size, dtype=np.float64)
    tables: dict[tuple[int, ...], dict[int, int]] = {}
    n = 0
    for seq in sequences:
        n += 1
        ids = [int(i) for i in seq]
        ids.append(vocab.truncate_id)
        for i in ids:
            if not 0 <= i < size:
                raise IdOutOfRangeError(f"corpus id {i} outside vocab of {size}")
        unigram[ids[0]] += 1
        for pos in range(1, len(ids)):
            target = ids[pos]
            unigram[target] += 1
            lo = max(0, pos - (order - 1))
            for start in range(lo, pos):
                ctx = tuple(ids[start:pos])
                tbl = tables.get(ctx)
                if tbl is None:
                    tbl = tables[ctx] = {}
                tbl[target] = tbl.get(target, 0) + 1
    if n == 0:
        raise EmptyCorpusError("no sequences to fit")
    return NgramModel(order, alpha, vocab.digest(), size, unigram, tables)


def next_distribution(
    model: NgramModel,
    context_ids,
    vocab: Vocab,
    cfg: SamplerConfig = SamplerConfig(),
    state: WalkState | None = None,
) -> NextDistribution:
    """Full sampling pipeline for one step; see module doc for the order."""
    scores = model.scores(context_ids)

    if cfg.temperature != 1.0:
        top = scores.max()
        if top > 0:
            scores = (scores / top) ** (1.0 / cfg.temperature)

    if cfg.top_k is not None and cfg.top_k < model.size:
        keep = np.argsort(-scores, kind="stable")[: cfg.top_k]
        kept = np.zeros_like(scores)
        kept[keep] = scores[keep]
        scores = kept

    fallback = False
    if cfg.legality_mask:
        if state is None:
            state = WalkState.from_context(context_ids, vocab)
        mask = legal_next_mask(state, vocab)
        masked = np.where(mask, scores, 0.0)
        if masked.sum() <= 0.0:
            if state.current == _structure(vocab).vss_id:
                masked = np.zeros_like(scores)
                masked[vocab.truncate_id] = 1.0
            else:
                masked = scores
                fallback = True
        scores = masked

    total = scores.sum()
    if total <= 0.0:
        # nothing scored at all; fall back to uniform to stay a distribution
        scores = np.ones_like(scores)
        total = scores.sum()
        fallback = True
    return NextDistribution(scores / total, fallback)


def sample(
    model: NgramModel,
    vocab: Vocab,
    cfg: SamplerConfig = SamplerConfig(),
) -> TokenSequence:
    """Draw one walk, starting at VSS, until the sentinel or max_len."""
    st = _structure(vocab)
    rng = np.random.default_rng(cfg.seed)
    ids = [st.vss_id]
    state = WalkState.from_context(ids, vocab)
    # room for the sentinel: content stays under max_len
    while len(ids) < cfg.max_len - 1:
        dist = next_distribution(model, ids, vocab, cfg, state)
        pick = int(rng.choice(model.size, p=dist.probs))
        if pick == vocab.truncate_id:
            break
        ids.append(pick)
        state.advance(pick, vocab)
    return TokenSequence(tuple(vocab.token_of(i) for i in ids), SOURCE_GENERATED)


def sample_many(
    model: NgramModel,
    vocab: Vocab,
    count: int,
    cfg: SamplerConfig = SamplerConfig(),
) -> list[TokenSequence]:
    """``count`` independent walks; walk k uses seed cfg.seed + k."""
    return [
        sample(model, vocab, replace(cfg, seed=cfg.seed + k))
        for k in range(count)
    ]
