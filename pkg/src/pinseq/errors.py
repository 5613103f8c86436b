"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from :class:`PinseqError`, so callers
can catch one base class at API boundaries (the CLI maps it to exit code 2,
or 1 for validation-type failures).  Netlist parse errors carry the 1-based
line number of the offending card.
"""

from __future__ import annotations


class PinseqError(Exception):
    """Base class for all toolkit errors."""


# --- circuit model ---------------------------------------------------------

class EmptyTopologyError(PinseqError):
    """Topology has no devices; there is nothing to expand into a graph."""


class DisconnectedError(PinseqError):
    """Pin graph (or topology) splits into more than one component."""


class MissingVssError(PinseqError):
    """Operation needs the VSS anchor node and the graph has none."""


class UnknownKindError(PinseqError):
    """Device kind name is not in the catalog."""


class UnknownTokenError(PinseqError):
    """Token is not a node name (or not an entry of the active vocab)."""


class IllegalEdgeError(PinseqError):
    """Edge endpoints violate the structural/connection class rules."""

    def __init__(self, u: str, v: str, why: str = "") -> None:
        self.u = u
        self.v = v
        detail = f": {why}" if why else ""
        super().__init__(f"illegal edge {u!r} -- {v!r}{detail}")


class EmptySequenceError(PinseqError):
    """Token sequence is too short to describe a single edge."""


class TooLargeError(PinseqError):
    """Input exceeds the documented size bound of an exhaustive routine."""


# --- netlist ----------------------------------------------------------------

class NetlistError(PinseqError):
    """Base class for netlist parse problems; knows the source line."""

    def __init__(self, message: str, line_no: int | None = None) -> None:
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class NetlistSyntaxError(NetlistError):
    """Card is malformed (bad tokens, duplicate name, bad characters)."""


class UnknownDeviceCardError(NetlistError):
    """Card letter does not map to a supported device kind."""


class TooManyDevicesError(NetlistError):
    """Per-kind device budget exceeded."""


class ArityMismatchError(NetlistError):
    """Card has the wrong number of node fields for its kind."""


# --- tokenizer / corpus -----------------------------------------------------

class SequenceTooLongError(PinseqError):
    """Sequence (plus its sentinel) does not fit in max_seq_len ids."""


class IdOutOfRangeError(PinseqError):
    """Id array contains a value outside the vocab (or a misplaced pad)."""


class MissingTruncateError(PinseqError):
    """Id array has no terminating sentinel."""


class DuplicateNameError(PinseqError):
    """Vocab construction produced the same token twice."""


class CorruptStreamError(PinseqError):
    """Binary corpus stream is malformed; message carries the byte offset."""


# --- generative model -------------------------------------------------------

class EmptyCorpusError(PinseqError):
    """Model fitting was handed zero sequences."""


class BadOrderError(PinseqError):
    """N-gram order below 2 is not a conditional model."""


class EmptyContextError(PinseqError):
    """Next-token distribution needs at least one token of context."""
