"""Sample-set evaluation and dataset statistics.

``evaluate`` scores a batch of generated sequences on the axes that
matter for a topology generator: how many decode into structurally valid
circuits, how many of those are topologies never seen before (novelty is
judged among valid samples only, against a set of known canonical
digests), and how the device counts distribute.  ``dataset_stats``
profiles a circuit collection the same way for corpus reporting.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

from .canon import canonical_hash
from .devices import DEFAULT_TERMINALS
from .euler import TokenSequence, decode
from .model import Topology
from .validity import check_sequence


@dataclass(frozen=True)
class EvalSummary:
    n_samples: int
    valid_fraction: float
    novel_fraction: float
    max_devices: int
    device_count_histogram: dict[int, int]
    euler_strict_fraction: float
    violation_histogram: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "valid_fraction": self.valid_fraction,
            "novel_fraction": self.novel_fraction,
            "max_devices": self.max_devices,
            "device_count_histogram": {
                str(k): v for k, v in sorted(self.device_count_histogram.items())
            },
            "euler_strict_fraction": self.euler_strict_fraction,
            "violation_histogram": dict(sorted(self.violation_histogram.items())),
        }

    def to_csv(self) -> str:
        """Same numbers as the JSON form, flattened to section/key/value."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "value"])
        w.writerow(["summary", "n_samples", self.n_samples])
        w.writerow(["summary", "valid_fraction", self.valid_fraction])
        w.writerow(["summary", "novel_fraction", self.novel_fraction])
        w.writerow(["summary", "max_devices", self.max_devices])
        w.writerow(["summary", "euler_strict_fraction", self.euler_strict_fraction])
        for k, v in sorted(self.device_count_histogram.items()):
            w.writerow(["device_count", k, v])
        for k, v in sorted(self.violation_histogram.items()):
            w.writerow(["violation", k, v])
        return buf.getvalue()


def evaluate(
    samples: list[TokenSequence],
    known_hashes: set[str] | frozenset[str] = frozenset(),
    terminals: tuple[str, ...] = DEFAULT_TERMINALS,
) -> EvalSummary:
    """Score a sample batch; see module doc for the metric definitions.

    Fractions over an empty batch (or, for novelty, an empty valid
    subset) are reported as 0.0 rather than raising.
    """
    n = len(samples)
    n_valid = 0
    n_novel = 0
    n_strict = 0
    device_hist: Counter[int] = Counter()
    violation_hist: Counter[str] = Counter()
    max_devices = 0
    for s in samples:
        report = check_sequence(s, terminals)
        if report.euler_strict:
            n_strict += 1
        if not report.is_valid:
            for v in report.violations:
                violation_hist[v.code] += 1
            continue
        n_valid += 1
        g = decode(s, terminals)
        count = len(g.devices())
        device_hist[count] += 1
        max_devices = max(max_devices, count)
        if canonical_hash(g) not in known_hashes:
            n_novel += 1
    return EvalSummary(
        n_samples=n,
        valid_fraction=(n_valid / n) if n else 0.0,
        novel_fraction=(n_novel / n_valid) if n_valid else 0.0,
        max_devices=max_devices,
        device_count_histogram=dict(device_hist),
        euler_strict_fraction=(n_strict / n) if n else 0.0,
        violation_histogram=dict(violation_hist),
    )


@dataclass(frozen=True)
class DatasetStats:
    n_circuits: int
    device_count_histogram: dict[int, int]
    kind_histogram: dict[str, int]
    type_histogram: dict[str, int]

    def to_csv(self) -> str:
        """Flat three-column table: section, key, count."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "count"])
        w.writerow(["circuits", "total", self.n_circuits])
        for k, v in sorted(self.device_count_histogram.items()):
            w.writerow(["device_count", k, v])
        for k, v in sorted(self.kind_histogram.items()):
            w.writerow(["kind", k, v])
        for k, v in sorted(self.type_histogram.items()):
            w.writerow(["type", k, v])
        return buf.getvalue()


def dataset_stats(
    circuits: list[Topology],
    labels: list[str] | None = None,
) -> DatasetStats:
    """Profile a circuit collection; invalid circuits count like any other.

    ``labels`` optionally tags each circuit with a family name (same
    length as ``circuits``); the type histogram is empty without them.
    """
    if labels is not None and len(labels) != len(circuits):
        raise ValueError("labels must align one to one with circuits")
    device_hist: Counter[int] = Counter()
    kind_hist: Counter[str] = Counter()
    type_hist: Counter[str] = Counter()
    for i, t in enumerate(circuits):
        device_hist[len(t.devices)] += 1
        for d in t.devices:
            kind_hist[d.kind.name] += 1
        if labels is not None:
            type_hist[labels[i]] += 1
    return DatasetStats(
        n_circuits=len(circuits),
        device_count_histogram=dict(device_hist),
        kind_histogram=dict(kind_hist),
        type_histogram=dict(type_hist),
    )


def validity_report_lines(samples: list[TokenSequence], terminals=DEFAULT_TERMINALS):
    """Per-sequence JSON-ready dicts for the validate command."""
    for i, s in enumerate(samples):
        report = check_sequence(s, terminals)
        yield {
            "seq_index": i,
            "verdict": report.verdict,
            "violations": [
                {"code": v.code, "detail": v.detail} for v in report.violations
            ],
            "euler_strict": report.euler_strict,
        }


__all__ = [
    "EvalSummary",
    "evaluate",
    "DatasetStats",
    "dataset_stats",
    "validity_report_lines",
]
