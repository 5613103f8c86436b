"""Structural validity rules for topologies and generated sequences.

A topology is valid when it describes something a simulator would accept
as a circuit at all: every pin lands on a net with company, no net shorts
two terminals together, everything hangs together in one piece, the VSS
rail exists, and no device has all of its pins tied to one electrical
node.  The checker is total: it never raises on weird input, it reports.

Sequence checking is layered: first the token walk itself (legal edge
classes step by step), then the decoded graph's recovered nets run
through the topology rules.  ``euler_strict`` additionally reports
whether the sequence is an arc-exact circuit of its own decoded graph;
generated sequences usually are not, and that is reported, not punished.
"""

from __future__ import annotations

from dataclasses import dataclass

from .devices import DEFAULT_TERMINALS, NodeClass, parse_node_token
from .errors import PinseqError
from .euler import TokenSequence, decode, verify_euler
from .model import Topology, nets_from_graph

# violation codes, in report order
FLOATING_PIN = "FLOATING_PIN"
TERMINAL_SHORT = "TERMINAL_SHORT"
DISCONNECTED = "DISCONNECTED"
NO_VSS = "NO_VSS"
NO_DEVICES = "NO_DEVICES"
DEGENERATE_DEVICE = "DEGENERATE_DEVICE"
UNKNOWN_TOKEN = "UNKNOWN_TOKEN"
ILLEGAL_EDGE = "ILLEGAL_EDGE"
EMPTY_SEQUENCE = "EMPTY_SEQUENCE"


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:  # pragma: no cover - convenience
        return f"{self.code}: {self.detail}"


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...]
    euler_strict: bool = False

    @property
    def is_valid(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "valid" if self.is_valid else "invalid"


def check_topology(t: Topology) -> ValidityReport:
    """Run every net-level rule; returns all violations, not just the first."""
    violations: list[Violation] = []
    terminals = t.recognized_terminals

    if not t.devices:
        violations.append(Violation(NO_DEVICES, "topology has no devices"))

    in_net: dict[str, int] = {}
    for i, net in enumerate(t.nets):
        for m in net.members:
            if parse_node_token(m, terminals).cls is not NodeClass.TERMINAL:
                in_net[m] = i

    for dev in t.devices:
        for pin in dev.pins:
            i = in_net.get(pin)
            if i is None:
                violations.append(Violation(FLOATING_PIN, f"{pin} is in no net"))
            elif len(t.nets[i].members) < 2:
                violations.append(
                    Violation(FLOATING_PIN, f"{pin} is alone on net {t.nets[i].name!r}")
                )

    pin_group: dict[str, int] = {}
    for gi, group in enumerate(t.electrical_nets()):
        terms = sorted(
            m for m in group
            if parse_node_token(m, terminals).cls is NodeClass.TERMINAL
        )
        if len(terms) > 1:
            violations.append(
                Violation(TERMINAL_SHORT, "net ties " + " and ".join(terms))
            )
        for m in group:
            pin_group[m] = gi

    if "VSS" not in t.terminals:
        violations.append(Violation(NO_VSS, "no net touches VSS"))

    for dev in t.devices:
        groups = {pin_group[p] for p in dev.pins if p in pin_group}
        if len(groups) == 1 and all(p in in_net for p in dev.pins):
            violations.append(
                Violation(DEGENERATE_DEVICE, f"all pins of {dev.token} share one net")
            )

    # connectivity over devices, nets, terminals as one union-find
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for dev in t.devices:
        parent.setdefault(dev.token, dev.token)
    for i, net in enumerate(t.nets):
        net_key = f"net:{i}"
        parent.setdefault(net_key, net_key)
        for m in net.members:
            info = parse_node_token(m, terminals)
            if info.cls is NodeClass.TERMINAL:
                union(net_key, f"term:{m}")
            else:
                union(net_key, info.device_token)
    roots = {find(x) for x in parent}
    if len(roots) > 1:
        violations.append(
            Violation(DISCONNECTED, f"{len(roots)} separate component groups")
        )

    return ValidityReport(tuple(violations))


def check_sequence(
    s: TokenSequence, terminals: tuple[str, ...] = DEFAULT_TERMINALS
) -> ValidityReport:
    """Decode a token walk and run the topology rules on what it describes."""
    if len(s.tokens) < 2:
        return ValidityReport(
            (Violation(EMPTY_SEQUENCE, "fewer than two tokens"),)
        )
    for tok in s.tokens:
        try:
            parse_node_token(tok, terminals)
        except PinseqError:
            return ValidityReport(
                (Violation(UNKNOWN_TOKEN, f"{tok!r} is not a node token"),)
            )
    try:
        g = decode(s, terminals)
    except PinseqError as exc:
        return ValidityReport((Violation(ILLEGAL_EDGE, str(exc)),))
    strict = bool(verify_euler(s, g))
    report = check_topology(nets_from_graph(g))
    return ValidityReport(report.violations, euler_strict=strict)
