"""Circuit topologies as reversible token sequences.

Pin-level graphs, canonical labeling, Eulerian-walk serialization, a
fixed vocabulary with an id codec, walk augmentation, validity checking,
and a masked n-gram baseline for generating new topologies.
"""

from .augment import CorpusBuild, augment, build_corpus, enumerate_all
from .canon import (
    CanonResult,
    canonical_hash,
    canonical_topology,
    canonicalize,
    isomorphic_oracle,
    refinement_colors,
)
from .devices import (
    DEFAULT_TERMINALS,
    KIND_BY_NAME,
    KINDS,
    Device,
    DeviceKind,
    NodeClass,
    NodeInfo,
    parse_node_token,
    pin_roles,
)
from .errors import PinseqError
from .euler import (
    TRUNCATE,
    TokenSequence,
    decode,
    encode,
    verify_euler,
)
from .metrics import (
    DatasetStats,
    EvalSummary,
    dataset_stats,
    evaluate,
    validity_report_lines,
)
from .model import (
    EdgeClass,
    Net,
    NetExpansion,
    PinGraph,
    Topology,
    build_graph,
    nets_from_graph,
)
from .netlist import emit_netlist, parse_netlist
from .ngram import (
    NgramModel,
    SamplerConfig,
    WalkState,
    fit,
    legal_next_mask,
    next_distribution,
    sample,
    sample_many,
)
from .validity import ValidityReport, Violation, check_sequence, check_topology
from .vocab import Vocab, build_vocab, decode_ids, default_vocab, encode_ids

__version__ = "0.1.0"

__all__ = [
    "CanonResult",
    "CorpusBuild",
    "DEFAULT_TERMINALS",
    "DatasetStats",
    "Device",
    "DeviceKind",
    "EdgeClass",
    "EvalSummary",
    "KIND_BY_NAME",
    "KINDS",
    "Net",
    "NetExpansion",
    "NgramModel",
    "NodeClass",
    "NodeInfo",
    "PinGraph",
    "PinseqError",
    "SamplerConfig",
    "TRUNCATE",
    "TokenSequence",
    "Topology",
    "ValidityReport",
    "Violation",
    "Vocab",
    "WalkState",
    "augment",
    "build_corpus",
    "build_graph",
    "build_vocab",
    "canonical_hash",
    "canonical_topology",
    "canonicalize",
    "check_sequence",
    "check_topology",
    "dataset_stats",
    "decode",
    "decode_ids",
    "default_vocab",
    "emit_netlist",
    "encode",
    "encode_ids",
    "enumerate_all",
    "evaluate",
    "fit",
    "isomorphic_oracle",
    "legal_next_mask",
    "nets_from_graph",
    "next_distribution",
    "parse_netlist",
    "parse_node_token",
    "pin_roles",
    "refinement_colors",
    "sample",
    "sample_many",
    "validity_report_lines",
    "verify_euler",
    "__version__",
]
