"""Sequence codec: pin graphs to closed-walk token sequences and back.

Doubling every undirected edge into two directed arcs makes every node's
in and out degree equal, so a circuit that uses each arc exactly once
exists from any start node; we anchor at VSS.  A graph with E edges
always serializes to exactly 2E + 1 tokens, linear in the graph rather
than the quadratic cost of an adjacency matrix.

``encode`` runs Hierholzer's algorithm with a seed-permuted neighbor
order, so different seeds reach different circuits of the same graph and
the same seed always reproduces the same circuit.  ``decode`` is
deliberately permissive so model output can be scored: it accepts any
walk over legal edge pairs, collapses repeated mentions of an edge, and
completes partially-walked structural stars.  ``verify_euler`` is the
strict check that a sequence is a true arc-exact circuit of a given
graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .devices import DEFAULT_TERMINALS, NodeClass, NodeInfo, parse_node_token
from .errors import (
    DisconnectedError,
    EmptySequenceError,
    IllegalEdgeError,
    MissingVssError,
    UnknownTokenError,
)
from .model import PinGraph, _infer_class

TRUNCATE = "TRUNCATE"

SOURCE_ENCODED = "encoded"
SOURCE_GENERATED = "generated"


@dataclass(frozen=True)
class TokenSequence:
    """An immutable token walk.  ``source`` is provenance only, not identity."""

    tokens: tuple[str, ...]
    source: str = field(default=SOURCE_ENCODED, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def to_text(self) -> str:
        """One line of space-separated tokens, sentinel-terminated."""
        return " ".join((*self.tokens, TRUNCATE))

    @classmethod
    def from_text(cls, line: str, source: str = SOURCE_GENERATED) -> "TokenSequence":
        """Parse one line; content after the first sentinel is dropped."""
        toks = line.split()
        if TRUNCATE in toks:
            toks = toks[: toks.index(TRUNCATE)]
        return cls(tuple(toks), source)


def encode(g: PinGraph, order_seed: int = 0) -> TokenSequence:
    """Serialize a graph as one VSS-anchored Eulerian circuit of its double.

    The seed permutes each node's neighbor order before the walk, which is
    the only source of variation; everything else is deterministic.
    """
    if "VSS" not in g.nodes:
        raise MissingVssError("encoding starts at VSS")
    if not g.edges:
        raise DisconnectedError("graph has no edges; there is no walk")
    if not g.is_connected():
        raise DisconnectedError("cannot encode a disconnected graph")

    rng = random.Random(order_seed)
    adj: dict[str, list[str]] = {}
    for node in sorted(g.nodes):
        nbrs = list(g.neighbors(node))
        rng.shuffle(nbrs)
        adj[node] = nbrs
    ptr = {node: 0 for node in adj}

    # Hierholzer, iterative: follow unused arcs, splice on pop.
    stack = ["VSS"]
    walk: list[str] = []
    while stack:
        node = stack[-1]
        nbrs = adj[node]
        i = ptr[node]
        if i < len(nbrs):
            ptr[node] = i + 1
            stack.append(nbrs[i])
        else:
            walk.append(stack.pop())
    walk.reverse()

    assert len(walk) == 2 * len(g.edges) + 1, "arc bookkeeping broke"
    return TokenSequence(tuple(walk), SOURCE_ENCODED)


def decode(
    s: TokenSequence, terminals: tuple[str, ...] = DEFAULT_TERMINALS
) -> PinGraph:
    """Rebuild a pin graph from a token walk.

    Accepts any walk whose steps are individually legal edges; duplicate
    steps collapse to one edge and missing structural edges of mentioned
    devices are filled in.  This is intentionally weaker than
    ``verify_euler``: generated sequences decode whenever they stay on
    legal edges, even if they are not arc-exact circuits.
    """
    tokens = tuple(s.tokens)
    if len(tokens) < 2:
        raise EmptySequenceError("a walk needs at least two tokens")

    infos: dict[str, NodeInfo] = {}
    for tok in tokens:
        if tok not in infos:
            if tok == TRUNCATE:
                raise UnknownTokenError("sentinel inside sequence content")
            infos[tok] = parse_node_token(tok, terminals)

    edges: set[tuple[str, str]] = set()
    for u, v in zip(tokens, tokens[1:]):
        if u == v:
            raise IllegalEdgeError(u, v, "self loop")
        _infer_class(infos[u], infos[v])
        edges.add((u, v) if u < v else (v, u))

    nodes: set[str] = set(tokens)
    for info in list(infos.values()):
        if info.cls is NodeClass.TERMINAL:
            continue
        dev = info.device_token
        nodes.add(dev)
        for role in info.kind.pin_roles:  # type: ignore[union-attr]
            pin = f"{dev}_{role}"
            nodes.add(pin)
            edges.add((dev, pin) if dev < pin else (pin, dev))
    return PinGraph(edges, extra_nodes=nodes, terminals=terminals)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_euler(s: TokenSequence, g: PinGraph) -> VerifyResult:
    """Strict check: s is a VSS-anchored Eulerian circuit of doubled g."""
    tokens = s.tokens
    if len(tokens) != 2 * len(g.edges) + 1:
        return VerifyResult(False, "length is not 2|E|+1")
    if not tokens or tokens[0] != "VSS" or tokens[-1] != "VSS":
        return VerifyResult(False, "walk does not start and end at VSS")
    remaining = {}
    for u, v in g.edges:
        remaining[(u, v)] = 1
        remaining[(v, u)] = 1
    for u, v in zip(tokens, tokens[1:]):
        left = remaining.get((u, v))
        if left is None:
            return VerifyResult(False, f"{u} -- {v} is not an edge of the graph")
        if left == 0:
            return VerifyResult(False, f"arc {u} -> {v} used twice")
        remaining[(u, v)] = 0
    # lengths matched and nothing was reused, so every arc was used
    return VerifyResult(True)
