"""Canonical labeling, canonical digests, and the isomorphism oracle.

Canonical form is a breadth-first relabeling anchored at VSS.  Within a
BFS frontier, nodes are visited in the order of a composite key built
only from label-independent structure:

    node class (terminal < device < pin),
    device kind rank (terminals use their terminal rank),
    degree (descending),
    pin role rank,
    a color rank from individualized refinement.

Color refinement alone leaves genuinely symmetric nodes tied (the five
stages of a ring oscillator all look alike at every radius), and falling
back to the input device index there would let the input labeling leak
into the canonical form.  Instead the coloring is driven to discreteness
by individualization: while any color class holds more than one node,
one member gets a fresh color and refinement reruns, which anchors one
of the symmetric configurations and cascades through the rest.  Which
member is picked is immaterial exactly when the tied nodes are
interchangeable (related by an automorphism); the symmetry patterns
circuits exhibit in practice (mirrored halves, parallel fingers, rings)
are of that kind, so the digest is invariant under device relabeling.
That is not a general-graph guarantee; the brute-force oracle below
exists to cross-check the digest on small graphs.

Devices are renumbered 1, 2, ... per kind in first-visit order, so two
isomorphic graphs relabel to the same graph and the digest of the sorted
canonical edge list is a stable topology fingerprint.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque
from typing import NamedTuple

from .devices import KIND_RANK, NodeClass, terminal_rank
from .errors import DisconnectedError, MissingVssError, TooLargeError
from .model import PinGraph


class CanonicalLabeling(NamedTuple):
    """Visit order (original tokens) and the device renumbering applied."""

    node_order: tuple[str, ...]
    device_renumbering: dict[str, int]


class CanonResult(NamedTuple):
    graph: PinGraph
    labeling: CanonicalLabeling


def _refine(g: PinGraph, colors: dict[str, bytes]) -> dict[str, bytes]:
    # iterate neighborhood hashing until the partition stops splitting
    n_classes = len(set(colors.values()))
    for _ in range(len(g.nodes)):
        nxt: dict[str, bytes] = {}
        for n in g.nodes:
            h = hashlib.blake2b(digest_size=8)
            h.update(colors[n])
            for nb in sorted(
                g.neighbors(n),
                key=lambda m: (g.edge_class(n, m).value, colors[m]),
            ):
                h.update(g.edge_class(n, nb).value.encode())
                h.update(colors[nb])
            nxt[n] = h.digest()
        colors = nxt
        k = len(set(colors.values()))
        if k == n_classes:
            break
        n_classes = k
    return colors


def refinement_colors(g: PinGraph) -> dict[str, bytes]:
    """Iterated neighborhood coloring, blind to device indices.

    Seed colors carry (class, kind or terminal name, role); each round
    hashes a node's color with the sorted colors of its neighbors across
    each edge class.  Stops when the partition stops splitting.
    """
    colors: dict[str, bytes] = {}
    for n in g.nodes:
        info = g.info(n)
        if info.cls is NodeClass.TERMINAL:
            seed = f"T:{n}"
        else:
            seed = f"{info.cls.name}:{info.kind.name}:{info.role or ''}"
        colors[n] = hashlib.blake2b(seed.encode(), digest_size=8).digest()
    return _refine(g, colors)


def _discrete_colors(g: PinGraph) -> dict[str, bytes]:
    """Refinement colors individualized until every class is a singleton.

    Each round recolors one member of the smallest surviving multi-node
    class and refines again; a round always splits at least that class,
    so at most |V| rounds run.  Safe when tied nodes are automorphic.
    """
    colors = refinement_colors(g)
    for round_no in range(len(g.nodes)):
        members: dict[bytes, list[str]] = {}
        for n in g.nodes:
            members.setdefault(colors[n], []).append(n)
        tied = {c: ns for c, ns in members.items() if len(ns) > 1}
        if not tied:
            break
        rep = min(tied[min(tied)])
        colors = dict(colors)
        colors[rep] = hashlib.blake2b(
            b"!%d:" % round_no + colors[rep], digest_size=8
        ).digest()
        colors = _refine(g, colors)
    return colors


def _visit_key(g: PinGraph, colors: dict[str, bytes], color_rank: dict[bytes, int]):
    terminals = g.terminals

    def key(n: str):
        info = g.info(n)
        if info.cls is NodeClass.TERMINAL:
            kind = terminal_rank(n, terminals)
            role = -1
            pre = 0
        else:
            kind = KIND_RANK[info.kind.name]
            role = info.role_rank
            pre = info.index
        return (
            int(info.cls),
            kind,
            -g.degree(n),
            role,
            color_rank[colors[n]],
            pre,
            n,
        )

    return key


def canonicalize(g: PinGraph) -> CanonResult:
    """Relabel a graph into canonical form.

    Requires VSS and connectivity.  Idempotent: canonicalizing a canonical
    graph returns it unchanged.
    """
    if "VSS" not in g.nodes:
        raise MissingVssError("canonical labeling is anchored at VSS")
    if not g.is_connected():
        raise DisconnectedError("cannot canonicalize a disconnected graph")

    colors = _discrete_colors(g)
    color_rank = {c: i for i, c in enumerate(sorted(set(colors.values())))}
    key = _visit_key(g, colors, color_rank)

    order: list[str] = []
    seen = {"VSS"}
    queue: deque[str] = deque(["VSS"])
    while queue:
        node = queue.popleft()
        order.append(node)
        for nb in sorted(g.neighbors(node), key=key):
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)

    renumbering: dict[str, int] = {}
    counters: dict[str, int] = {}
    for node in order:
        info = g.info(node)
        if info.cls is NodeClass.TERMINAL:
            continue
        dev = info.device_token
        if dev not in renumbering:
            nxt = counters.get(info.kind.name, 0) + 1
            counters[info.kind.name] = nxt
            renumbering[dev] = nxt

    return CanonResult(
        g.renumber_devices(renumbering),
        CanonicalLabeling(tuple(order), renumbering),
    )


def canonical_hash(g: PinGraph) -> str:
    """Lowercase hex sha256 of the canonicalized, sorted, tagged edge list."""
    canon = canonicalize(g).graph
    h = hashlib.sha256()
    for u, v, cls in canon.tagged_edges():
        h.update(f"{u} {v} {cls.value}\n".encode())
    return h.hexdigest()


def canonical_topology(t, expansion=None):
    """Net-level round trip through canonical form; used for stable emission."""
    from .model import NetExpansion, build_graph, nets_from_graph

    exp = expansion if expansion is not None else NetExpansion.CLIQUE
    return nets_from_graph(canonicalize(build_graph(t, exp)).graph)


_ORACLE_MAX_NODES = 16


def isomorphic_oracle(a: PinGraph, b: PinGraph) -> bool:
    """Brute-force isomorphism for small graphs (<= 16 nodes each).

    Tries every kind-preserving bijection of device instances; terminals
    must match by name.  Exponential on purpose; raises TooLargeError
    beyond the bound rather than degrade silently.
    """
    if len(a.nodes) > _ORACLE_MAX_NODES or len(b.nodes) > _ORACLE_MAX_NODES:
        raise TooLargeError(
            f"oracle handles graphs up to {_ORACLE_MAX_NODES} nodes"
        )
    terms_a = {n for n in a.nodes if a.info(n).cls is NodeClass.TERMINAL}
    terms_b = {n for n in b.nodes if b.info(n).cls is NodeClass.TERMINAL}
    if terms_a != terms_b or len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    devs_a: dict[str, list[int]] = {}
    devs_b: dict[str, list[int]] = {}
    for g, acc in ((a, devs_a), (b, devs_b)):
        for d in g.devices():
            acc.setdefault(d.kind.name, []).append(d.index)
    if {k: len(v) for k, v in devs_a.items()} != {k: len(v) for k, v in devs_b.items()}:
        return False

    kinds = sorted(devs_a)
    pools = [
        itertools.permutations(sorted(devs_b[k])) for k in kinds
    ]
    src = [sorted(devs_a[k]) for k in kinds]
    for combo in itertools.product(*pools):
        renumbering = {
            f"{kind}{i}": j
            for kind, olds, news in zip(kinds, src, combo)
            for i, j in zip(olds, news)
        }
        if a.renumber_devices(renumbering) == b:
            return True
    return False
