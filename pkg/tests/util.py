"""Shared builders for the test suite: fixed fixtures and random generators.

The random topology generator chains devices through two-member nets so
every output is connected by construction, then scatters the remaining
pins into extra nets.  It aims for graph-level variety (node counts, edge
counts, kind mixes), not electrical validity.
"""

from __future__ import annotations

import random

from pinseq import (
    KIND_BY_NAME,
    KINDS,
    Device,
    Net,
    PinGraph,
    Topology,
    build_graph,
)

TWO_PIN_KINDS = tuple(k for k in KINDS if len(k.pin_roles) == 2)


def capacitor_topology() -> Topology:
    """Smallest connected circuit: one capacitor, both pins to VSS."""
    c1 = Device(KIND_BY_NAME["C"], 1)
    return Topology(
        [c1],
        [Net("a", ["C1_P", "VSS"]), Net("b", ["C1_N", "VSS"])],
    )


def capacitor_graph() -> PinGraph:
    return build_graph(capacitor_topology())


def two_stage_graph() -> PinGraph:
    """The bundled two-device amplifier: 14 nodes, 21 edges."""
    from pinseq.data import corpus_text
    from pinseq import parse_netlist

    return build_graph(parse_netlist(corpus_text("amp__cs_diode_load")))


def random_topology(
    rng: random.Random,
    n_devices: int | None = None,
    kinds=KINDS,
    extra_terminals: tuple[str, ...] = ("VDD", "VIN1", "VIN2", "IIN1"),
) -> Topology:
    n = n_devices if n_devices is not None else rng.randint(1, 8)
    counts: dict[str, int] = {}
    devices: list[Device] = []
    while len(devices) < n:
        kind = kinds[rng.randrange(len(kinds))]
        idx = counts.get(kind.name, 0) + 1
        if idx > kind.max_count:
            continue
        counts[kind.name] = idx
        devices.append(Device(kind, idx))

    pool = {
        d.token: [f"{d.token}_{r}" for r in d.kind.pin_roles] for d in devices
    }
    for pins in pool.values():
        rng.shuffle(pins)

    nets: list[Net] = []
    # chain nets keep the graph connected no matter what follows
    for a, b in zip(devices, devices[1:]):
        nets.append(Net(f"c{len(nets)}", [pool[a.token].pop(), pool[b.token].pop()]))
    nets.append(Net("gnd", [pool[devices[0].token].pop(), "VSS"]))

    leftovers = [p for pins in pool.values() for p in pins]
    rng.shuffle(leftovers)
    spare_terminals = list(extra_terminals)
    i = 0
    while i < len(leftovers):
        group = leftovers[i:i + rng.randint(1, 3)]
        i += len(group)
        if spare_terminals and rng.random() < 0.3:
            group.append(spare_terminals.pop(rng.randrange(len(spare_terminals))))
        if len(group) >= 2:
            nets.append(Net(f"n{len(nets)}", group))
        # a lone pin stays floating; the graph is still connected via its star
    return Topology(devices, nets)


def random_graph(
    seed: int,
    lo: int = 4,
    hi: int = 60,
    kinds=KINDS,
    n_devices: int | None = None,
) -> PinGraph:
    """Random connected PinGraph with a node count inside [lo, hi]."""
    rng = random.Random(seed)
    for _ in range(64):
        g = build_graph(random_topology(rng, n_devices=n_devices, kinds=kinds))
        if lo <= len(g.nodes) <= hi:
            return g
    raise AssertionError(f"no graph in [{lo}, {hi}] nodes after 64 draws")


def small_graph(seed: int) -> PinGraph:
    """Random connected PinGraph of at most 16 nodes (oracle territory)."""
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    return random_graph(
        seed + 1,
        lo=4,
        hi=16,
        kinds=TWO_PIN_KINDS,
        n_devices=n,
    )


def random_relabel(g: PinGraph, rng: random.Random) -> PinGraph:
    """Permute device indices within each kind; an isomorphism by design."""
    by_kind: dict[str, list[int]] = {}
    for d in g.devices():
        by_kind.setdefault(d.kind.name, []).append(d.index)
    renumbering: dict[str, int] = {}
    for kind_name, indices in by_kind.items():
        shuffled = indices[:]
        rng.shuffle(shuffled)
        for old, new in zip(indices, shuffled):
            renumbering[f"{kind_name}{old}"] = new
    return g.renumber_devices(renumbering)


def shuffle_cards(netlist_text: str, rng: random.Random) -> str:
    """Reorder device cards; reparsing renumbers devices within each kind."""
    lines = netlist_text.splitlines()
    cards = [
        ln for ln in lines
        if ln.strip() and not ln.startswith("*") and not ln.lower().startswith(".end")
    ]
    rng.shuffle(cards)
    return "\n".join(["* shuffled", *cards, ".end"]) + "\n"


def all_euler_circuits(g: PinGraph, cap: int = 200_000) -> set[tuple[str, ...]]:
    """Exhaustive VSS-anchored Eulerian circuits of the doubled graph.

    Independent oracle: plain backtracking over the arc set, nothing
    shared with the package encoder.  Exponential on purpose; keep the
    graphs tiny and let ``cap`` guard against runaway inputs.
    """
    arcs: dict[str, list[str]] = {}
    for u, v in g.edges:
        arcs.setdefault(u, []).append(v)
        arcs.setdefault(v, []).append(u)
    for nbrs in arcs.values():
        nbrs.sort()

    total = 2 * len(g.edges)
    out: set[tuple[str, ...]] = set()
    walk = ["VSS"]
    used: set[tuple[str, str]] = set()

    def extend() -> None:
        if len(used) == total:
            if walk[-1] == "VSS":
                out.add(tuple(walk))
            return
        if len(out) > cap:
            raise AssertionError(f"oracle cap {cap} exceeded")
        u = walk[-1]
        for v in arcs.get(u, ()):
            arc = (u, v)
            if arc in used:
                continue
            used.add(arc)
            walk.append(v)
            extend()
            walk.pop()
            used.discard(arc)

    extend()
    return out
