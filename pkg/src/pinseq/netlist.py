"""Reading and writing the flat netlist subset (``.ckt`` files).

Supported cards, one per line, fields split on whitespace:

    Mname  d g s b  MODEL     MOS; model containing a ``P`` means PM, else NM
    Qname  c b e    MODEL     BJT; model containing ``PNP`` means PNP, else NPN
    Rname  p n      [value]
    Cname  p n      [value]
    Lname  p n      [value]
    Dname  p n      [model]
    Xname  pins...  CELL      CELL is one of XOR / INV / TG

``*`` starts a comment line (the first one is kept as the title), ``.end``
stops parsing.  Card letters are case-insensitive; node names are case
sensitive except the rails VDD/VSS, which normalize to upper case.  Values
and model names are carried as opaque strings and ignored by the topology
layer.  Devices are numbered per kind in file order starting at 1; the
card's own name only has to be unique.

The parser is total over arbitrary text: any malformed input raises a
NetlistError subclass with the offending line number, never anything else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .devices import DEFAULT_TERMINALS, KIND_BY_NAME, Device
from .errors import (
    ArityMismatchError,
    NetlistSyntaxError,
    TooManyDevicesError,
    UnknownDeviceCardError,
)
from .model import Net, Topology

_NODE_RE = re.compile(r"[A-Za-z0-9_]+\Z")

# emitted card name prefix per kind; parse does not rely on these
_EMIT_NAME = {
    "NM": "MN", "PM": "MP", "NPN": "QN", "PNP": "QP",
    "R": "R", "C": "C", "L": "L", "DIO": "D",
    "XOR": "XXOR", "INV": "XINV", "TG": "XTG",
}
_EMIT_TAIL = {
    "NM": "NMOS", "PM": "PMOS", "NPN": "NPN", "PNP": "PNP",
    "R": "1", "C": "1", "L": "1", "DIO": "D",
    "XOR": "XOR", "INV": "INV", "TG": "TG",
}
_X_CELLS = ("XOR", "INV", "TG")


@dataclass
class Card:
    """One parsed device card."""

    name: str
    kind: str
    nodes: tuple[str, ...]
    tail: str
    line_no: int


@dataclass
class NetlistDoc:
    """Lossless-enough view of a netlist: title, cards, comment lines."""

    title: str = ""
    cards: list[Card] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)


def _node_name(raw: str, line_no: int) -> str:
    if not _NODE_RE.match(raw):
        raise NetlistSyntaxError(f"bad node name {raw!r}", line_no)
    if raw.upper() in ("VDD", "VSS"):
        return raw.upper()
    return raw


def read_doc(text: str) -> NetlistDoc:
    """Tokenize netlist text into cards without interpreting connectivity."""
    doc = NetlistDoc()
    seen_names: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            body = line[1:].strip()
            if not doc.comments and not doc.title:
                doc.title = body
            doc.comments.append(body)
            continue
        if line.lower().startswith(".end"):
            break
        if line.startswith("."):
            raise UnknownDeviceCardError(f"unsupported card {line.split()[0]!r}", line_no)
        fields = line.split()
        name = fields[0]
        if not _NODE_RE.match(name):
            raise NetlistSyntaxError(f"bad card name {name!r}", line_no)
        key = name.upper()
        if key in seen_names:
            raise NetlistSyntaxError(f"duplicate card name {name!r}", line_no)
        seen_names.add(key)
        letter = name[0].upper()
        rest = fields[1:]

        if letter == "M":
            if len(rest) != 5:
                raise ArityMismatchError("MOS card needs 4 nodes + model", line_no)
            kind = "PM" if "P" in rest[4].upper() else "NM"
            nodes, tail = rest[:4], rest[4]
        elif letter == "Q":
            if len(rest) != 4:
                raise ArityMismatchError("BJT card needs 3 nodes + model", line_no)
            kind = "PNP" if "PNP" in rest[3].upper() else "NPN"
            nodes, tail = rest[:3], rest[3]
        elif letter in ("R", "C", "L"):
            if len(rest) not in (2, 3):
                raise ArityMismatchError(
                    f"{letter} card needs 2 nodes and an optional value", line_no
                )
            kind = letter
            nodes, tail = rest[:2], (rest[2] if len(rest) == 3 else "")
        elif letter == "D":
            if len(rest) not in (2, 3):
                raise ArityMismatchError(
                    "D card needs 2 nodes and an optional model", line_no
                )
            kind = "DIO"
            nodes, tail = rest[:2], (rest[2] if len(rest) == 3 else "")
        elif letter == "X":
            if len(rest) < 2:
                raise ArityMismatchError("X card needs pins and a cell name", line_no)
            cell = rest[-1].upper()
            if cell not in _X_CELLS:
                raise UnknownDeviceCardError(f"unknown cell {rest[-1]!r}", line_no)
            kind = cell
            want = len(KIND_BY_NAME[kind].pin_roles)
            nodes, tail = rest[:-1], cell
            if len(nodes) != want:
                raise ArityMismatchError(
                    f"{cell} takes {want} pins, got {len(nodes)}", line_no
                )
        else:
            raise UnknownDeviceCardError(f"unknown card letter {name[0]!r}", line_no)

        nodes = tuple(_node_name(n, line_no) for n in nodes)
        doc.cards.append(Card(name, kind, nodes, tail, line_no))
    return doc


def parse_netlist(
    text: str, terminals: tuple[str, ...] = DEFAULT_TERMINALS
) -> Topology:
    """Parse netlist text into a topology.

    Node names matching a terminal become that terminal; every other node
    name is an internal net.  Nets keep their source names.
    """
    doc = read_doc(text)
    counters: dict[str, int] = {}
    devices: list[Device] = []
    nets: dict[str, set[str]] = {}
    for card in doc.cards:
        kind = KIND_BY_NAME[card.kind]
        index = counters.get(kind.name, 0) + 1
        if index > kind.max_count:
            raise TooManyDevicesError(
                f"more than {kind.max_count} {kind.name} devices", card.line_no
            )
        counters[kind.name] = index
        dev = Device(kind, index)
        devices.append(dev)
        for role, node in zip(kind.pin_roles, card.nodes):
            members = nets.setdefault(node, set())
            members.add(dev.pin(role))
            if node in terminals:
                members.add(node)
    return Topology(
        devices,
        [Net(name, members) for name, members in nets.items()],
        terminals,
    )


def emit_netlist(t: Topology, title: str = "pinseq netlist") -> str:
    """Write a topology back out as netlist text.

    Deterministic: cards come out in (kind rank, index) order; a net named
    by a terminal uses that terminal, other nets are renamed n1, n2, ... in
    order of first use.  Values and models are placeholders, so emit after
    parse is identity only up to those fields (the topology layer never
    reads them).
    """
    terminals = t.recognized_terminals
    pin_to_net: dict[str, int] = {}
    net_terminal: dict[int, str] = {}
    for i, net in enumerate(t.nets):
        terms = sorted(m for m in net.members if m in terminals)
        if terms:
            net_terminal[i] = terms[0]
        for m in net.members:
            if m not in terminals:
                pin_to_net[m] = i

    names: dict[int, str] = {}
    counter = 0

    def node_for(pin: str) -> str:
        nonlocal counter
        i = pin_to_net.get(pin)
        if i is None:
            # dangling pin; give it a private net so the card stays well formed
            counter += 1
            return f"n{counter}"
        if i in net_terminal:
            return net_terminal[i]
        if i not in names:
            counter += 1
            names[i] = f"n{counter}"
        return names[i]

    lines = [f"* {title}"]
    for dev in sorted(t.devices):
        kind = dev.kind.name
        nodes = " ".join(node_for(p) for p in dev.pins)
        tail = _EMIT_TAIL[kind]
        lines.append(f"{_EMIT_NAME[kind]}{dev.index} {nodes} {tail}")
    lines.append(".end")
    return "\n".join(lines) + "\n"
