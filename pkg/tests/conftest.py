import pytest

from pinseq import Topology, build_graph, default_vocab, parse_netlist
from pinseq.data import corpus_names, corpus_text


@pytest.fixture(scope="session")
def vocab():
    return default_vocab()


@pytest.fixture(scope="session")
def corpus() -> list[tuple[str, Topology]]:
    return [
        (name, parse_netlist(corpus_text(name))) for name in corpus_names()
    ]


@pytest.fixture(scope="session")
def corpus_graphs(corpus):
    return [(name, build_graph(t)) for name, t in corpus]
