"""On-disk corpus formats: .seq text, .bin id streams, hash lists."""

import numpy as np
import pytest

from pinseq import TokenSequence, encode
from pinseq.corpusio import (
    export_corpus,
    import_samples,
    read_hashes,
    read_seq_file,
    write_hashes,
    write_seq_file,
)
from pinseq.errors import CorruptStreamError, EmptySequenceError
from .util import capacitor_graph, random_graph


@pytest.fixture()
def sequences():
    return [encode(random_graph(s), s) for s in range(5)]


def test_seq_file_round_trip(tmp_path, sequences):
    path = tmp_path / "x.seq"
    write_seq_file(path, sequences)
    back = read_seq_file(path)
    assert [s.tokens for s in back] == [s.tokens for s in sequences]
    # every line is sentinel-terminated text
    for line in path.read_text().splitlines():
        assert line.endswith(" TRUNCATE")


def test_seq_reader_skips_blank_lines_and_tags_source(tmp_path):
    path = tmp_path / "x.seq"
    path.write_text("\nVSS C1_P C1 C1_N VSS TRUNCATE\n\n")
    back = read_seq_file(path, source="generated")
    assert len(back) == 1
    assert back[0].source == "generated"


def test_bin_round_trip(tmp_path, vocab, sequences):
    path = tmp_path / "c.bin"
    assert export_corpus(sequences, vocab, path) == len(sequences)
    back = import_samples(path, vocab)
    assert [s.tokens for s in back] == [s.tokens for s in sequences]


def test_bin_layout_is_sentinel_delimited_u16(tmp_path, vocab):
    s = encode(capacitor_graph())
    path = tmp_path / "c.bin"
    export_corpus([s], vocab, path)
    raw = np.fromfile(path, dtype="<u2")
    assert len(raw) == len(s) + 1
    assert raw[-1] == vocab.truncate_id
    assert raw[0] == vocab.id_of("VSS")
    assert vocab.pad_id not in raw


def test_export_rejects_empty_sequence(tmp_path, vocab):
    with pytest.raises(EmptySequenceError):
        export_corpus([TokenSequence(())], vocab, tmp_path / "c.bin")


def test_import_rejects_corrupt_streams(tmp_path, vocab):
    odd = tmp_path / "odd.bin"
    odd.write_bytes(b"\x01\x02\x03")  # not a whole number of u16 words
    with pytest.raises(CorruptStreamError):
        import_samples(odd, vocab)

    out_of_range = tmp_path / "range.bin"
    np.asarray([9999, vocab.truncate_id], dtype="<u2").tofile(out_of_range)
    with pytest.raises(CorruptStreamError):
        import_samples(out_of_range, vocab)

    unterminated = tmp_path / "tail.bin"
    np.asarray([1027, 0], dtype="<u2").tofile(unterminated)
    with pytest.raises(CorruptStreamError):
        import_samples(unterminated, vocab)


def test_hash_list_round_trip(tmp_path):
    digests = {f"{i:064x}" for i in range(5)}
    path = tmp_path / "hashes.txt"
    write_hashes(path, sorted(digests))
    assert read_hashes(path) == digests
