"""Bundled example circuits.

Each ``corpus/*.ckt`` file is one known-good netlist.  The part of the
file stem before the double underscore is its family label (``amp``,
``filter``, ``osc``, ...), which the stats command uses as the type
histogram key.
"""

from __future__ import annotations

from importlib import resources

from ..netlist import parse_netlist


def corpus_names() -> list[str]:
    """Sorted stems of the bundled netlists."""
    root = resources.files(__package__) / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ckt"))


def corpus_text(name: str) -> str:
    return (resources.files(__package__) / "corpus" / f"{name}.ckt").read_text(
        encoding="utf-8"
    )


def label_of(name: str) -> str:
    head, sep, _ = name.partition("__")
    return head if sep else "unlabeled"


def load_corpus() -> list[tuple[str, object]]:
    """All bundled circuits as (name, topology) pairs."""
    return [(name, parse_netlist(corpus_text(name))) for name in corpus_names()]
