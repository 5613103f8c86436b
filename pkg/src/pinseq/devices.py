"""Device catalog and node-token naming rules.

Every node in a pin graph is identified by its token string alone:

* device nodes are ``<prefix><index>`` (``NM3``, ``R12``),
* pin nodes are ``<prefix><index>_<role>`` (``NM3_G``, ``R12_P``),
* terminal nodes are bare names from the terminal list (``VDD``, ``VIN2``).

The catalog fixes, per device kind, the ordered pin roles and the maximum
instance count.  Role order matters: it defines the per-instance token-id
offsets used by the tokenizer, so it is part of the contract, not a styling
choice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .errors import UnknownKindError, UnknownTokenError


@dataclass(frozen=True)
class DeviceKind:
    """A catalog entry: token prefix, ordered pin roles, instance budget."""

    name: str
    pin_roles: tuple[str, ...]
    max_count: int

    @property
    def tokens_per_instance(self) -> int:
        # device token itself plus one token per pin
        return 1 + len(self.pin_roles)


KINDS: tuple[DeviceKind, ...] = (
    DeviceKind("NM", ("D", "G", "S", "B"), 25),
    DeviceKind("PM", ("D", "G", "S", "B"), 25),
    DeviceKind("NPN", ("C", "B", "E"), 25),
    DeviceKind("PNP", ("C", "B", "E"), 25),
    DeviceKind("R", ("P", "N"), 25),
    DeviceKind("C", ("P", "N"), 25),
    DeviceKind("L", ("P", "N"), 25),
    DeviceKind("DIO", ("P", "N"), 25),
    DeviceKind("XOR", ("A", "B", "VDD", "VSS", "Y"), 5),
    DeviceKind("INV", ("A", "Q", "VDD", "VSS"), 10),
    DeviceKind("TG", ("A", "B", "C", "VDD", "VSS"), 10),
)

KIND_BY_NAME: dict[str, DeviceKind] = {k.name: k for k in KINDS}
KIND_RANK: dict[str, int] = {k.name: i for i, k in enumerate(KINDS)}

# Longest prefix first so NPN/PNP/DIO win over NM/PM and single letters.
_PREFIXES: tuple[DeviceKind, ...] = tuple(
    sorted(KINDS, key=lambda k: len(k.name), reverse=True)
)

DEFAULT_TERMINALS: tuple[str, ...] = (
    "VIN1", "VIN2", "VIN3", "VIN4", "VIN5",
    "IIN1", "IIN2",
    "LOGICQB1", "LOGICQB2",
    "VDD", "VSS",
)


def pin_roles(kind: str | DeviceKind) -> tuple[str, ...]:
    """Ordered pin roles of a kind; raises UnknownKindError for bad names."""
    if isinstance(kind, DeviceKind):
        return kind.pin_roles
    try:
        return KIND_BY_NAME[kind].pin_roles
    except KeyError:
        raise UnknownKindError(f"unknown device kind {kind!r}") from None


@dataclass(frozen=True, order=True)
class Device:
    """One device instance.  Ordering follows (catalog rank, index)."""

    sort_rank: int
    index: int
    kind: DeviceKind

    def __init__(self, kind: DeviceKind | str, index: int) -> None:
        if isinstance(kind, str):
            if kind not in KIND_BY_NAME:
                raise UnknownKindError(f"unknown device kind {kind!r}")
            kind = KIND_BY_NAME[kind]
        if not 1 <= index <= kind.max_count:
            raise ValueError(
                f"{kind.name} index {index} outside 1..{kind.max_count}"
            )
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "sort_rank", KIND_RANK[kind.name])

    @property
    def token(self) -> str:
        return f"{self.kind.name}{self.index}"

    def pin(self, role: str) -> str:
        if role not in self.kind.pin_roles:
            raise UnknownKindError(
                f"{self.kind.name} has no pin role {role!r}"
            )
        return f"{self.token}_{role}"

    @property
    def pins(self) -> tuple[str, ...]:
        return tuple(f"{self.token}_{r}" for r in self.kind.pin_roles)

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return f"Device({self.token})"


class NodeClass(enum.IntEnum):
    """Node classes in canonical sort order: terminals first, pins last."""

    TERMINAL = 0
    DEVICE = 1
    PIN = 2


@dataclass(frozen=True)
class NodeInfo:
    """Parsed identity of a node token."""

    name: str
    cls: NodeClass
    kind: DeviceKind | None = None
    index: int = 0
    role: str | None = None

    @property
    def device_token(self) -> str | None:
        if self.kind is None:
            return None
        return f"{self.kind.name}{self.index}"

    @property
    def role_rank(self) -> int:
        if self.role is None:
            return -1
        return self.kind.pin_roles.index(self.role)  # type: ignore[union-attr]


@lru_cache(maxsize=None)
def parse_node_token(
    token: str, terminals: tuple[str, ...] = DEFAULT_TERMINALS
) -> NodeInfo:
    """Classify a token as terminal, device, or pin node.

    Terminal names are matched exactly against ``terminals`` before any
    prefix parsing, so terminal spellings always win.  Raises
    UnknownTokenError when the token fits no class.
    """
    if token in terminals:
        return NodeInfo(token, NodeClass.TERMINAL)
    for kind in _PREFIXES:
        if not token.startswith(kind.name):
            continue
        rest = token[len(kind.name):]
        head, sep, role = rest.partition("_")
        if not head.isdigit():
            continue
        index = int(head)
        if not 1 <= index <= kind.max_count:
            break
        if not sep:
            return NodeInfo(token, NodeClass.DEVICE, kind, index)
        if role in kind.pin_roles:
            return NodeInfo(token, NodeClass.PIN, kind, index, role)
        break
    raise UnknownTokenError(f"not a node token: {token!r}")


def terminal_rank(name: str, terminals: tuple[str, ...] = DEFAULT_TERMINALS) -> int:
    """Position of a terminal in the active terminal order."""
    try:
        return terminals.index(name)
    except ValueError:
        raise UnknownTokenError(f"not a terminal: {name!r}") from None
