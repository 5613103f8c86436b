"""Pin-level circuit model.

Two representations of the same circuit live here:

* :class:`Topology` is the net-level view a netlist describes: a set of
  device instances plus named nets, each net a set of device pins and at
  most a handful of terminals.
* :class:`PinGraph` is the pin-level undirected graph the sequence codec
  works on.  Every device contributes one device node plus one node per
  pin; terminals are nodes of their own.  Edges come in exactly two
  classes, and the class is fully determined by the endpoint node classes:

  - structural: device node to one of its own pin nodes,
  - connection: pin to pin, or pin to terminal.

  Anything else (device-device, terminal-terminal, device to a foreign
  pin, self loops) is illegal and rejected at construction time.

Both types are immutable after construction and safe to share across
threads.  Graph equality is plain set equality of nodes and edges.
Topology equality is electrical: net names are ignored and nets that share
a member (a terminal feeding several nets) compare as one merged net, so
the two expansion policies below and the net-recovery op agree with each
other.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .devices import (
    DEFAULT_TERMINALS,
    KIND_RANK,
    Device,
    NodeClass,
    NodeInfo,
    parse_node_token,
    terminal_rank,
)
from .errors import (
    DisconnectedError,
    EmptyTopologyError,
    IllegalEdgeError,
    UnknownTokenError,
)


class EdgeClass(enum.Enum):
    STRUCTURAL = "S"
    CONNECTION = "C"


class NetExpansion(enum.Enum):
    """How a net's members are wired into connection edges."""

    CLIQUE = "clique"
    STAR = "star"


Edge = tuple[str, str]


@dataclass(frozen=True)
class Net:
    """A named net: pins and terminals that are electrically common."""

    name: str
    members: frozenset[str]

    def __init__(self, name: str, members) -> None:
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "members", frozenset(members))
        if not self.members:
            raise ValueError(f"net {name!r} has no members")


class Topology:
    """Devices plus nets.  Immutable; compares electrically (see module doc).

    A pin may appear in at most one net.  Pins missing from every net and
    nets with a single member are representable (the validity checker
    flags them); terminals may appear in any number of nets.
    """

    __slots__ = (
        "devices", "nets", "recognized_terminals", "_terminals",
        "_by_token", "_groups",
    )

    def __init__(self, devices, nets, terminals: tuple[str, ...] = DEFAULT_TERMINALS):
        object.__setattr__(self, "recognized_terminals", tuple(terminals))
        devs = tuple(sorted(devices))
        names = [d.token for d in devs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate device instance")
        by_token = {d.token: d for d in devs}
        pin_owner: dict[str, str] = {}
        cleaned = []
        for net in nets:
            for m in net.members:
                info = parse_node_token(m, terminals)
                if info.cls is NodeClass.DEVICE:
                    raise ValueError(f"net {net.name!r} contains device node {m!r}")
                if info.cls is NodeClass.PIN:
                    if info.device_token not in by_token:
                        raise ValueError(f"net member {m!r} has no device")
                    if m in pin_owner:
                        raise ValueError(f"pin {m!r} in more than one net")
                    pin_owner[m] = net.name
            cleaned.append(net)
        object.__setattr__(self, "devices", devs)
        object.__setattr__(self, "nets", tuple(cleaned))
        object.__setattr__(self, "_by_token", by_token)
        terms = sorted(
            {
                m
                for net in cleaned
                for m in net.members
                if parse_node_token(m, terminals).cls is NodeClass.TERMINAL
            },
            key=lambda t: terminal_rank(t, terminals),
        )
        object.__setattr__(self, "_terminals", tuple(terms))
        object.__setattr__(self, "_groups", None)

    def __setattr__(self, name, value):  # immutability by contract
        raise AttributeError("Topology is immutable")

    @property
    def terminals(self) -> tuple[str, ...]:
        return self._terminals

    def device(self, token: str) -> Device:
        return self._by_token[token]

    def electrical_nets(self) -> tuple[frozenset[str], ...]:
        """Nets merged across shared members, names dropped.

        Nets that share a terminal (or pin) are one electrical node; the
        merged partition is what equality and the validity rules use.
        """
        if self._groups is not None:
            return self._groups
        parent: dict[str, str] = {}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for net in self.nets:
            for m in net.members:
                parent.setdefault(m, m)
            first = next(iter(net.members))
            for m in net.members:
                ra, rb = find(first), find(m)
                if ra != rb:
                    parent[rb] = ra
        groups: dict[str, set[str]] = {}
        for m in parent:
            groups.setdefault(find(m), set()).add(m)
        out = tuple(
            sorted((frozenset(g) for g in groups.values()), key=sorted)
        )
        object.__setattr__(self, "_groups", out)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return (
            set(self.devices) == set(other.devices)
            and set(self.electrical_nets()) == set(other.electrical_nets())
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.devices), frozenset(self.electrical_nets())))

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"Topology({len(self.devices)} devices, {len(self.nets)} nets)"
        )


class PinGraph:
    """Undirected pin-level graph with derived edge classes.

    ``nodes`` is a frozenset of token strings, ``edges`` a frozenset of
    (u, v) pairs stored with u < v.  The edge class is a pure function of
    the endpoints (see module doc), exposed via :meth:`edge_class` and the
    sorted, tagged listing :meth:`tagged_edges`.

    Construction checks the class rules and the full-star invariant: a
    device with any node present must be present with its device node, all
    of its pin nodes, and all of its structural edges.
    """

    __slots__ = ("nodes", "edges", "terminals", "_info", "_adj")

    def __init__(self, edges, extra_nodes=(), terminals: tuple[str, ...] = DEFAULT_TERMINALS):
        info: dict[str, NodeInfo] = {}

        def classify(tok: str) -> NodeInfo:
            got = info.get(tok)
            if got is None:
                got = parse_node_token(tok, terminals)
                info[tok] = got
            return got

        norm: set[Edge] = set()
        nodes: set[str] = set()
        for tok in extra_nodes:
            classify(tok)
            nodes.add(tok)
        for u, v in edges:
            if u == v:
                raise IllegalEdgeError(u, v, "self loop")
            iu, iv = classify(u), classify(v)
            _infer_class(iu, iv)  # raises IllegalEdgeError
            nodes.add(u)
            nodes.add(v)
            norm.add((u, v) if u < v else (v, u))

        # full-star invariant: complete every mentioned device
        owners = {
            i.device_token
            for i in info.values()
            if i.cls is not NodeClass.TERMINAL
        }
        for dev_tok in owners:
            base = classify(dev_tok)
            nodes.add(dev_tok)
            for role in base.kind.pin_roles:  # type: ignore[union-attr]
                pin = f"{dev_tok}_{role}"
                classify(pin)
                if pin not in nodes or (min(dev_tok, pin), max(dev_tok, pin)) not in norm:
                    raise IllegalEdgeError(
                        dev_tok, pin, "incomplete structural star"
                    )

        object.__setattr__(self, "nodes", frozenset(nodes))
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "terminals", terminals)
        object.__setattr__(self, "_info", info)
        adj: dict[str, tuple[str, ...]] = {n: () for n in nodes}
        tmp: dict[str, list[str]] = {n: [] for n in nodes}
        for u, v in norm:
            tmp[u].append(v)
            tmp[v].append(u)
        for n, nbrs in tmp.items():
            adj[n] = tuple(sorted(nbrs))
        object.__setattr__(self, "_adj", adj)

    def __setattr__(self, name, value):
        raise AttributeError("PinGraph is immutable")

    # --- queries ---------------------------------------------------------

    def info(self, node: str) -> NodeInfo:
        try:
            return self._info[node]
        except KeyError:
            raise UnknownTokenError(f"node not in graph: {node!r}") from None

    def neighbors(self, node: str) -> tuple[str, ...]:
        return self._adj[node]

    def degree(self, node: str) -> int:
        return len(self._adj[node])

    def edge_class(self, u: str, v: str) -> EdgeClass:
        key = (u, v) if u < v else (v, u)
        if key not in self.edges:
            raise IllegalEdgeError(u, v, "no such edge")
        return _infer_class(self.info(u), self.info(v))

    def tagged_edges(self) -> list[tuple[str, str, EdgeClass]]:
        return [
            (u, v, _infer_class(self._info[u], self._info[v]))
            for u, v in sorted(self.edges)
        ]

    def devices(self) -> tuple[Device, ...]:
        seen = {
            i.device_token: Device(i.kind, i.index)
            for i in self._info.values()
            if i.cls is not NodeClass.TERMINAL and i.name in self.nodes
        }
        return tuple(sorted(seen.values()))

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        start = next(iter(self.nodes))
        seen = {start}
        stack = [start]
        while stack:
            for nb in self._adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(self.nodes)

    def renumber_devices(self, renumbering: dict[str, int]) -> "PinGraph":
        """Rewrite device indices; mapping is old device token -> new index.

        Devices absent from the mapping keep their index.  Kind never
        changes, so the mapping must stay within each kind's budget.
        """

        def rename(tok: str) -> str:
            i = self._info[tok]
            if i.cls is NodeClass.TERMINAL:
                return tok
            new_index = renumbering.get(i.device_token, i.index)
            stem = f"{i.kind.name}{new_index}"  # type: ignore[union-attr]
            return stem if i.cls is NodeClass.DEVICE else f"{stem}_{i.role}"

        return PinGraph(
            ((rename(u), rename(v)) for u, v in self.edges),
            extra_nodes=tuple(rename(n) for n in self.nodes),
            terminals=self.terminals,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PinGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.nodes, self.edges))

    def __repr__(self) -> str:  # pragma: no cover
        return f"PinGraph({len(self.nodes)} nodes, {len(self.edges)} edges)"


def _infer_class(iu: NodeInfo, iv: NodeInfo) -> EdgeClass:
    a, b = sorted((iu, iv), key=lambda i: i.cls)
    if a.cls is NodeClass.DEVICE and b.cls is NodeClass.PIN:
        if a.device_token == b.device_token:
            return EdgeClass.STRUCTURAL
        raise IllegalEdgeError(iu.name, iv.name, "device to foreign pin")
    if a.cls is NodeClass.PIN and b.cls is NodeClass.PIN:
        return EdgeClass.CONNECTION
    if a.cls is NodeClass.TERMINAL and b.cls is NodeClass.PIN:
        return EdgeClass.CONNECTION
    raise IllegalEdgeError(iu.name, iv.name, f"{a.cls.name} to {b.cls.name}")


def _member_key(tok: str, terminals: tuple[str, ...]) -> tuple:
    info = parse_node_token(tok, terminals)
    if info.cls is NodeClass.TERMINAL:
        return (0, terminal_rank(tok, terminals), 0, -1)
    return (
        1 if info.cls is NodeClass.DEVICE else 2,
        KIND_RANK[info.kind.name],  # type: ignore[union-attr]
        info.index,
        info.role_rank,
    )


def build_graph(
    t: Topology, expansion: NetExpansion = NetExpansion.CLIQUE
) -> PinGraph:
    """Expand a topology into its pin graph.

    Every device contributes its structural star.  Each net is expanded
    separately (nets are not merged here, even when they share a
    terminal): CLIQUE wires all member pairs, STAR wires every member to
    the net's lowest-ordered member (terminals sort first, so a terminal
    roots its net's star).

    Raises EmptyTopologyError when there are no devices and
    DisconnectedError when the result has more than one component.
    """
    if not t.devices:
        raise EmptyTopologyError("topology has no devices")
    terminals = t.recognized_terminals
    edges: list[Edge] = []
    nodes: list[str] = []
    for dev in t.devices:
        nodes.append(dev.token)
        for pin in dev.pins:
            edges.append((dev.token, pin))
    for net in t.nets:
        members = sorted(net.members, key=lambda m: _member_key(m, terminals))
        nodes.extend(members)
        if len(members) < 2:
            continue
        if expansion is NetExpansion.CLIQUE:
            edges.extend(itertools.combinations(members, 2))
        else:
            root = members[0]
            edges.extend((root, m) for m in members[1:])
    g = PinGraph(edges, extra_nodes=nodes, terminals=terminals)
    if not g.is_connected():
        raise DisconnectedError("pin graph has more than one component")
    return g


def nets_from_graph(g: PinGraph) -> Topology:
    """Recover the net-level view from a pin graph.

    Connected components over connection edges only become nets; isolated
    pins and terminals (no connection edge at all) are not members of any
    net.  A net is named after its lowest-ranked terminal when it has one,
    else ``n<i>`` with i assigned in deterministic member order.
    """
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, cls in g.tagged_edges():
        if cls is not EdgeClass.CONNECTION:
            continue
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru

    groups: dict[str, set[str]] = {}
    for node in parent:
        groups.setdefault(find(node), set()).add(node)

    terminals = g.terminals
    ordered = sorted(
        groups.values(),
        key=lambda grp: min(_member_key(m, terminals) for m in grp),
    )
    nets = []
    counter = 0
    for grp in ordered:
        terms = [m for m in grp if g.info(m).cls is NodeClass.TERMINAL]
        if terms:
            name = min(terms, key=lambda t: terminal_rank(t, terminals))
        else:
            counter += 1
            name = f"n{counter}"
        nets.append(Net(name, grp))
    return Topology(g.devices(), nets, terminals)
