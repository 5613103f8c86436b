"""Topology and pin-graph construction rules."""

import pytest

from pinseq import (
    Device,
    EdgeClass,
    KIND_BY_NAME,
    Net,
    NetExpansion,
    PinGraph,
    Topology,
    build_graph,
    nets_from_graph,
)
from pinseq.errors import (
    DisconnectedError,
    EmptyTopologyError,
    IllegalEdgeError,
    UnknownTokenError,
)
from .util import capacitor_graph, capacitor_topology, random_graph


def test_net_needs_members():
    with pytest.raises(ValueError):
        Net("empty", [])


def test_topology_validation():
    c1 = Device("C", 1)
    with pytest.raises(ValueError, match="duplicate device"):
        Topology([c1, Device("C", 1)], [Net("a", ["C1_P", "VSS"])])
    with pytest.raises(ValueError, match="device node"):
        Topology([c1], [Net("a", ["C1", "VSS"])])
    with pytest.raises(ValueError, match="no device"):
        Topology([c1], [Net("a", ["R1_P", "VSS"])])
    with pytest.raises(ValueError, match="more than one net"):
        Topology([c1], [Net("a", ["C1_P"]), Net("b", ["C1_P", "VSS"])])


def test_electrical_nets_merge_on_shared_terminal():
    t = capacitor_topology()
    groups = t.electrical_nets()
    assert len(groups) == 1
    assert groups[0] == frozenset({"C1_P", "C1_N", "VSS"})


def test_topology_equality_is_electrical():
    c1 = Device("C", 1)
    split = capacitor_topology()
    merged = Topology([c1], [Net("x", ["C1_P", "C1_N", "VSS"])])
    assert split == merged
    other = Topology([c1], [Net("x", ["C1_P", "C1_N", "VDD"])])
    assert split != other


def test_capacitor_graph_shape():
    g = capacitor_graph()
    assert sorted(g.nodes) == ["C1", "C1_N", "C1_P", "VSS"]
    assert len(g.edges) == 4
    by_class = {}
    for u, v, cls in g.tagged_edges():
        by_class.setdefault(cls, []).append((u, v))
    assert sorted(by_class[EdgeClass.STRUCTURAL]) == [("C1", "C1_N"), ("C1", "C1_P")]
    assert sorted(by_class[EdgeClass.CONNECTION]) == [("C1_N", "VSS"), ("C1_P", "VSS")]


def test_graph_accessors():
    g = capacitor_graph()
    assert g.degree("VSS") == 2
    assert set(g.neighbors("C1")) == {"C1_P", "C1_N"}
    assert g.edge_class("C1", "C1_P") is EdgeClass.STRUCTURAL
    assert g.edge_class("VSS", "C1_P") is EdgeClass.CONNECTION
    with pytest.raises(IllegalEdgeError):
        g.edge_class("C1", "VSS")
    with pytest.raises(UnknownTokenError):
        g.info("R9")
    devs = g.devices()
    assert [d.token for d in devs] == ["C1"]


def test_clique_vs_star_expansion():
    t = Topology(
        [Device("R", 1), Device("R", 2)],
        [Net("a", ["R1_P", "R2_P", "VSS"]), Net("b", ["R1_N", "R2_N", "VSS"])],
    )
    clique = build_graph(t, NetExpansion.CLIQUE)
    star = build_graph(t, NetExpansion.STAR)
    # three members: clique wires all 3 pairs, star only 2 spokes
    conn = lambda g: [e for e in g.tagged_edges() if e[2] is EdgeClass.CONNECTION]
    assert len(conn(clique)) == 6
    assert len(conn(star)) == 4
    # the star root is the lowest-ordered member; terminals sort first
    for u, v, _ in conn(star):
        assert "VSS" in (u, v)


def test_full_star_invariant():
    # mentioning a pin without its device's complete star is rejected
    with pytest.raises(IllegalEdgeError, match="incomplete structural star"):
        PinGraph([("C1", "C1_P"), ("C1_P", "VSS")], extra_nodes=["VSS"])


@pytest.mark.parametrize(
    "edge",
    [
        ("NM1", "PM1_D"),   # device to foreign pin
        ("VDD", "VSS"),     # terminal to terminal
        ("NM1", "NM2"),     # device to device
        ("NM1", "VSS"),     # device to terminal
        ("VSS", "VSS"),     # self loop
    ],
)
def test_illegal_edge_classes(edge):
    g = capacitor_graph()
    with pytest.raises(IllegalEdgeError):
        PinGraph([*g.edges, edge], extra_nodes=g.nodes)


def test_build_graph_guards():
    with pytest.raises(EmptyTopologyError):
        build_graph(Topology([], []))
    island = Topology(
        [Device("R", 1), Device("R", 2)],
        [Net("a", ["R1_P", "R1_N"]), Net("b", ["R2_P", "R2_N"])],
    )
    with pytest.raises(DisconnectedError):
        build_graph(island)


def test_nets_from_graph_round_trip():
    for seed in range(20):
        g = random_graph(seed)
        t = nets_from_graph(g)
        assert build_graph(t) == g


def test_renumber_devices():
    g = capacitor_graph()
    g2 = g.renumber_devices({"C1": 7})
    assert sorted(g2.nodes) == ["C7", "C7_N", "C7_P", "VSS"]
    assert g2.renumber_devices({"C7": 1}) == g


def test_graph_equality_and_immutability():
    g = capacitor_graph()
    assert g == capacitor_graph()
    assert g != g.renumber_devices({"C1": 2})
    with pytest.raises(AttributeError):
        g.edges = ()
