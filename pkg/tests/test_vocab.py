"""Vocabulary layout, anchors, and the id-level codec."""

import pytest

from pinseq import (
    KIND_BY_NAME,
    TokenSequence,
    Vocab,
    build_vocab,
    decode_ids,
    default_vocab,
    encode,
    encode_ids,
)
from pinseq.errors import (
    DuplicateNameError,
    EmptySequenceError,
    IdOutOfRangeError,
    MissingTruncateError,
    SequenceTooLongError,
    UnknownTokenError,
)
from .util import capacitor_graph

# published anchor ids; the table is bit-compatible or it is useless
ANCHORS = {
    "NM1": 0, "NM1_D": 1, "NM1_G": 2, "NM1_S": 3, "NM1_B": 4,
    "NM2": 5, "PM1": 125, "NPN1": 250, "PNP1": 350, "R1": 450,
    "C1": 525, "L1": 600, "DIO1": 675, "XOR1": 750, "INV1": 815,
    "TG1": 865, "VIN1": 925, "IIN1": 930, "LOGICQB1": 1024,
    "VDD": 1026, "VSS": 1027, "TRUNCATE": 1028,
}


def test_default_vocab_anchors(vocab):
    assert len(vocab) == 1029
    for token, want in ANCHORS.items():
        assert vocab.id_of(token) == want, token
        assert vocab.token_of(want) == token


def test_reserved_filler_ranges(vocab):
    for i in range(780, 815):
        assert vocab.token_of(i) == f"RSV{i}"
    for i in range(932, 1024):
        assert vocab.token_of(i) == f"RSV{i}"


def test_pad_and_sentinel_ids(vocab):
    assert vocab.truncate_id == 1028
    assert vocab.pad_id == 1029
    assert vocab.max_seq_len == 1024


def test_terminals_in_id_order(vocab):
    assert vocab.terminals == (
        "VIN1", "VIN2", "VIN3", "VIN4", "VIN5",
        "IIN1", "IIN2", "LOGICQB1", "LOGICQB2", "VDD", "VSS",
    )


def test_unknown_lookups(vocab):
    with pytest.raises(UnknownTokenError):
        vocab.id_of("GND")
    with pytest.raises(IdOutOfRangeError):
        vocab.token_of(1029)


def test_build_vocab_small_table():
    v = build_vocab(
        kinds=(KIND_BY_NAME["R"],),
        terminals=("VDD", "VSS"),
        max_counts={"R": 2},
    )
    assert v.tokens == (
        "R1", "R1_P", "R1_N", "R2", "R2_P", "R2_N", "VDD", "VSS", "TRUNCATE",
    )
    assert v.terminals == ("VDD", "VSS")
    assert v.digest() != default_vocab().digest()


def test_build_vocab_rejects_ambiguous_terminal():
    with pytest.raises(DuplicateNameError):
        build_vocab(terminals=("R1", "VSS"))


def test_vocab_digest_is_content_addressed(vocab):
    again = Vocab(vocab.tokens)
    assert again.digest() == vocab.digest()
    assert len(vocab.digest()) == 64
    # the compact builder lays out a different table than the anchored one
    assert build_vocab().digest() != vocab.digest()


def test_vocab_save_load_round_trip(tmp_path, vocab):
    path = tmp_path / "vocab.tsv"
    vocab.save(path)
    back = Vocab.load(path)
    assert back.tokens == vocab.tokens
    assert back.digest() == vocab.digest()


def test_encode_ids_layout(vocab):
    s = TokenSequence(("VSS",))
    ids = encode_ids(s, vocab)
    assert len(ids) == vocab.max_seq_len
    assert ids[0] == 1027
    assert ids[1] == vocab.truncate_id
    assert set(ids[2:]) == {vocab.pad_id}


def test_encode_decode_ids_round_trip(vocab):
    s = encode(capacitor_graph())
    assert decode_ids(encode_ids(s, vocab), vocab).tokens == s.tokens


def test_encode_ids_length_boundary(vocab):
    fits = TokenSequence(("VSS",) * 1023)
    assert len(encode_ids(fits, vocab)) == 1024
    with pytest.raises(SequenceTooLongError):
        encode_ids(TokenSequence(("VSS",) * 1024), vocab)
    with pytest.raises(EmptySequenceError):
        encode_ids(TokenSequence(()), vocab)


def test_decode_ids_stops_at_sentinel(vocab):
    ids = [1027, vocab.truncate_id] + [vocab.pad_id] * 5
    assert decode_ids(ids, vocab).tokens == ("VSS",)


def test_decode_ids_rejects_bad_streams(vocab):
    with pytest.raises(IdOutOfRangeError):
        decode_ids([1027, vocab.pad_id, vocab.truncate_id], vocab)
    with pytest.raises(IdOutOfRangeError):
        decode_ids([1027, 5000, vocab.truncate_id], vocab)
    with pytest.raises(MissingTruncateError):
        decode_ids([1027, 0, 1], vocab)


def test_node_info_classifies_ids(vocab):
    from pinseq import NodeClass

    assert vocab.node_info(0).cls is NodeClass.DEVICE
    assert vocab.node_info(2).role == "G"
    assert vocab.node_info(1027).cls is NodeClass.TERMINAL
    assert vocab.node_info(vocab.truncate_id) is None
    assert vocab.node_info(800) is None  # reserved filler
