"""End-to-end command-line flows: ingest -> corpus -> fit -> generate -> evaluate."""

import json
import shutil
import subprocess
import sys

import pytest

from pinseq import build_graph, canonical_hash, default_vocab, parse_netlist
from pinseq.cli import main
from pinseq.corpusio import import_samples, read_seq_file
from pinseq.data import corpus_names, corpus_text
from pinseq.vocab import build_vocab

RC_NETLIST = "* rc\nR1 VDD mid 1k\nC1 mid VSS 1p\n.end\n"
BRIDGE_NETLIST = "* bridge\nR1 VDD VSS 1k\n.end\n"


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One small store driven through corpus and fit, shared read-only."""
    root = tmp_path_factory.mktemp("cli")
    nl_dir = root / "netlists"
    nl_dir.mkdir()
    picked = 0
    for name in corpus_names():
        text = corpus_text(name)
        if len(parse_netlist(text).devices) <= 6:
            (nl_dir / f"{name}.ckt").write_text(text, encoding="utf-8")
            picked += 1
        if picked == 6:
            break
    store = root / "store.json"
    assert main(["ingest", "--netlists", str(nl_dir), "--out", str(store)]) == 0

    corpus_dir = root / "corpus"
    assert main([
        "corpus", "--store", str(store), "--out", str(corpus_dir),
        "--per-circuit", "8", "--split", "0.75", "--seed", "7",
    ]) == 0

    model = root / "model.bin"
    assert main([
        "fit", "--corpus", str(corpus_dir / "train.bin"), "--out", str(model),
        "--order", "4",
    ]) == 0
    return {"root": root, "nl_dir": nl_dir, "store": store,
            "corpus": corpus_dir, "model": model}


# --- parser plumbing ----------------------------------------------------------


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "pinseq" in capsys.readouterr().out


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_missing_input_file_exits_two(tmp_path, capsys):
    assert main(["validate", "--seq", str(tmp_path / "nope.seq")]) == 2
    assert "error:" in capsys.readouterr().err


# --- ingest -------------------------------------------------------------------


def test_ingest_bundled_store(tmp_path):
    store_path = tmp_path / "store.json"
    assert main(["ingest", "--bundled", "--out", str(store_path)]) == 0
    store = json.loads(store_path.read_text())
    assert store["format"] == "pinseq-store-v1"
    assert store["vocab_sha256"] == default_vocab().digest()
    assert len(store["circuits"]) == len(corpus_names())
    hashes = [c["hash"] for c in store["circuits"]]
    assert hashes == sorted(hashes)
    # hash sidecar mirrors the store
    sidecar = (tmp_path / "hashes.txt").read_text().split()
    assert sorted(sidecar) == hashes
    # stored netlists are the canonical forms and re-hash to their key
    c = store["circuits"][0]
    g = build_graph(parse_netlist(c["netlist"]))
    assert canonical_hash(g) == c["hash"]


def test_ingest_bad_netlist_fails_without_skip(tmp_path, capsys):
    nl_dir = tmp_path / "nl"
    nl_dir.mkdir()
    (nl_dir / "good.ckt").write_text(RC_NETLIST, encoding="utf-8")
    (nl_dir / "bad.ckt").write_text("R1 only_one_net\n.end\n", encoding="utf-8")
    store_path = tmp_path / "store.json"
    assert main(["ingest", "--netlists", str(nl_dir), "--out", str(store_path)]) == 2
    assert "ingested 1 circuits (1 failed)" in capsys.readouterr().out

    assert main([
        "ingest", "--netlists", str(nl_dir), "--out", str(store_path), "--skip-bad",
    ]) == 0
    store = json.loads(store_path.read_text())
    assert [c["name"] for c in store["circuits"]] == ["good"]


def test_ingest_rejects_invalid_topology(tmp_path):
    bad = tmp_path / "degenerate.ckt"
    bad.write_text("* shorted\nC1 VSS VSS 1\n.end\n", encoding="utf-8")
    assert main(["ingest", "--netlists", str(bad), "--out", str(tmp_path / "s.json")]) == 2


def test_ingest_deduplicates_isomorphic_inputs(tmp_path):
    nl_dir = tmp_path / "nl"
    nl_dir.mkdir()
    (nl_dir / "a.ckt").write_text(RC_NETLIST, encoding="utf-8")
    # same topology under different device ordering and net names
    (nl_dir / "b.ckt").write_text(
        "* rc again\nC1 n9 VSS 2p\nR1 VDD n9 5k\n.end\n", encoding="utf-8"
    )
    store_path = tmp_path / "store.json"
    assert main(["ingest", "--netlists", str(nl_dir), "--out", str(store_path)]) == 0
    assert len(json.loads(store_path.read_text())["circuits"]) == 1


def test_ingest_empty_inputs_writes_empty_store(tmp_path):
    nl_dir = tmp_path / "empty"
    nl_dir.mkdir()
    store_path = tmp_path / "store.json"
    assert main(["ingest", "--netlists", str(nl_dir), "--out", str(store_path)]) == 0
    assert json.loads(store_path.read_text())["circuits"] == []


# --- corpus -------------------------------------------------------------------


def test_corpus_outputs_and_manifest(pipeline, vocab):
    corpus_dir = pipeline["corpus"]
    for fname in ("train.bin", "val.bin", "train.seq", "val.seq",
                  "train_hashes.txt", "val_hashes.txt", "manifest.json"):
        assert (corpus_dir / fname).exists()
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    assert manifest["format"] == "pinseq-corpus-v1"
    assert manifest["vocab_sha256"] == vocab.digest()
    assert manifest["max_seq_len"] == vocab.max_seq_len
    assert manifest["per_circuit"] == 8
    assert manifest["circuits"] == 6
    counts = manifest["counts"]
    assert counts["train_circuits"] + counts["val_circuits"] == 6
    train = import_samples(corpus_dir / "train.bin", vocab)
    assert len(train) == counts["train_sequences"]
    text = read_seq_file(corpus_dir / "train.seq")
    assert [s.tokens for s in text] == [s.tokens for s in train]


def test_corpus_min_fraction_gate(tmp_path, capsys):
    # a lone bridging resistor yields a single distinct walk, far below 50
    nl = tmp_path / "bridge.ckt"
    nl.write_text(BRIDGE_NETLIST, encoding="utf-8")
    store = tmp_path / "store.json"
    assert main(["ingest", "--netlists", str(nl), "--out", str(store)]) == 0
    args = ["corpus", "--store", str(store), "--out", str(tmp_path / "c"),
            "--per-circuit", "50", "--min-fraction", "0.9"]
    assert main(args) == 2
    assert "under --min-fraction" in capsys.readouterr().err
    # the same build passes once the bar is dropped
    assert main(args[:-2] + ["--min-fraction", "0.0"]) == 0


# --- fit / generate -----------------------------------------------------------


def test_generate_writes_samples_and_netlists(pipeline, tmp_path, capsys):
    out = tmp_path / "samples.seq"
    assert main([
        "generate", "--model", str(pipeline["model"]), "--n", "12",
        "--out", str(out), "--seed", "3",
    ]) == 0
    samples = read_seq_file(out)
    assert len(samples) == 12
    emit_dir = tmp_path / "samples_ckt"
    assert emit_dir.is_dir()
    emitted = sorted(emit_dir.glob("*.ckt"))
    assert f"{len(samples)} samples" in capsys.readouterr().out
    # every emitted netlist parses back into a buildable topology
    for path in emitted:
        build_graph(parse_netlist(path.read_text()))


def test_generate_is_seed_deterministic(pipeline, tmp_path):
    a, b, c = (tmp_path / n for n in ("a.seq", "b.seq", "c.seq"))
    base = ["generate", "--model", str(pipeline["model"]), "--n", "8"]
    assert main(base + ["--out", str(a), "--seed", "11"]) == 0
    assert main(base + ["--out", str(b), "--seed", "11"]) == 0
    assert main(base + ["--out", str(c), "--seed", "12"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_generate_rejects_foreign_vocab(pipeline, tmp_path, capsys):
    trimmed = tmp_path / "trimmed.vocab"
    build_vocab(max_counts={"R": 24}).save(trimmed)
    assert main([
        "generate", "--model", str(pipeline["model"]), "--n", "2",
        "--out", str(tmp_path / "x.seq"), "--vocab", str(trimmed),
    ]) == 2
    assert "different vocab" in capsys.readouterr().err


# --- validate / evaluate ------------------------------------------------------


def test_validate_report_lines(pipeline, tmp_path):
    report = tmp_path / "report.jsonl"
    seq = pipeline["corpus"] / "train.seq"
    assert main(["validate", "--seq", str(seq), "--report", str(report)]) == 0
    rows = [json.loads(line) for line in report.read_text().splitlines()]
    assert len(rows) == len(read_seq_file(seq))
    assert [r["seq_index"] for r in rows] == list(range(len(rows)))
    assert all(r["verdict"] == "valid" for r in rows)


def test_validate_strict_flags_bad_sequences(tmp_path, capsys):
    seq = tmp_path / "mixed.seq"
    seq.write_text(
        "VSS R1_N R1 R1_P VDD R1_P R1 R1_N VSS TRUNCATE\n"
        "VSS C1_P VSS TRUNCATE\n",
        encoding="utf-8",
    )
    assert main(["validate", "--seq", str(seq)]) == 0
    assert main(["validate", "--seq", str(seq), "--strict"]) == 1
    verdicts = [json.loads(l)["verdict"] for l in capsys.readouterr().out.splitlines()
                if l.startswith("{")]
    assert verdicts.count("valid") == 2  # one per non-strict/strict run


def test_evaluate_summary_outputs(pipeline, tmp_path, capsys):
    seq = pipeline["corpus"] / "train.seq"
    hashes = pipeline["corpus"] / "train_hashes.txt"
    out_json = tmp_path / "summary.json"
    out_csv = tmp_path / "summary.csv"
    assert main([
        "evaluate", "--seq", str(seq), "--hashes", str(hashes),
        "--out", str(out_json), "--csv", str(out_csv), "--strict",
    ]) == 0
    printed = json.loads(capsys.readouterr().out)
    on_disk = json.loads(out_json.read_text())
    assert printed == on_disk
    assert printed["valid_fraction"] == 1.0
    assert printed["novel_fraction"] == 0.0  # every walk re-encodes a known hash
    assert printed["euler_strict_fraction"] == 1.0
    assert out_csv.read_text().startswith("section,key,value")


def test_evaluate_strict_fails_on_invalid(tmp_path):
    seq = tmp_path / "bad.seq"
    seq.write_text("VSS C1_P VSS TRUNCATE\n", encoding="utf-8")
    assert main(["evaluate", "--seq", str(seq)]) == 0
    assert main(["evaluate", "--seq", str(seq), "--strict"]) == 1


def test_evaluate_jobs_do_not_change_results(pipeline, tmp_path):
    seq = pipeline["corpus"] / "train.seq"
    one, three = tmp_path / "one.json", tmp_path / "three.json"
    assert main(["evaluate", "--seq", str(seq), "--out", str(one)]) == 0
    assert main(["evaluate", "--seq", str(seq), "--out", str(three), "--jobs", "3"]) == 0
    assert json.loads(one.read_text()) == json.loads(three.read_text())


# --- stats / encode / decode / augment ----------------------------------------


def test_stats_profile_csv(pipeline, tmp_path, capsys):
    assert main(["stats", "--store", str(pipeline["store"])]) == 0
    text = capsys.readouterr().out
    assert text.startswith("section,key,count")
    out = tmp_path / "stats.csv"
    assert main(["stats", "--store", str(pipeline["store"]), "--out", str(out)]) == 0
    assert out.read_text() == text


def test_stats_rejects_foreign_store(tmp_path, capsys):
    bogus = tmp_path / "store.json"
    bogus.write_text(json.dumps({"format": "something-else"}), encoding="utf-8")
    assert main(["stats", "--store", str(bogus)]) == 2
    assert "pinseq-store-v1" in capsys.readouterr().err


def test_encode_decode_round_trip(tmp_path):
    ckt = tmp_path / "rc.ckt"
    ckt.write_text(RC_NETLIST, encoding="utf-8")
    enc = tmp_path / "rc.seq"
    assert main(["encode", "--ckt", str(ckt), "--count", "3", "--out", str(enc)]) == 0
    assert len(read_seq_file(enc)) == 3

    out_dir = tmp_path / "decoded"
    assert main(["decode", "--seq", str(enc), "--out-dir", str(out_dir)]) == 0
    files = sorted(out_dir.glob("*.ckt"))
    assert [f.name for f in files] == [f"decoded_{i:05d}.ckt" for i in range(3)]
    want = canonical_hash(build_graph(parse_netlist(RC_NETLIST)))
    for f in files:
        assert canonical_hash(build_graph(parse_netlist(f.read_text()))) == want


def test_encode_prints_walks_to_stdout(tmp_path, capsys):
    ckt = tmp_path / "bridge.ckt"
    ckt.write_text(BRIDGE_NETLIST, encoding="utf-8")
    assert main(["encode", "--ckt", str(ckt), "--count", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    for line in lines:
        assert line.startswith("VSS ") and line.endswith(" TRUNCATE")


def test_augment_emits_distinct_walks(tmp_path, capsys):
    # both capacitor pins on VSS close a cycle, giving eight distinct walks
    ckt = tmp_path / "loop.ckt"
    ckt.write_text("* loop\nC1 VSS VSS 1\n.end\n", encoding="utf-8")
    out = tmp_path / "aug.seq"
    assert main(["augment", "--ckt", str(ckt), "--target", "5", "--out", str(out)]) == 0
    walks = read_seq_file(out)
    assert len(walks) == 5
    assert len({w.tokens for w in walks}) == 5
    # without --out the walks land on stdout
    assert main(["augment", "--ckt", str(ckt), "--target", "2"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 2


# --- config files and environment ---------------------------------------------


def test_config_supplies_defaults_and_flags_win(pipeline, tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("n = 5\ntop-k = 6  # hyphens map to option names\n",
                   encoding="utf-8")
    base = ["generate", "--model", str(pipeline["model"]), "--config", str(cfg)]
    out = tmp_path / "from_cfg.seq"
    assert main(base + ["--out", str(out)]) == 0
    assert len(read_seq_file(out)) == 5

    out2 = tmp_path / "flag_wins.seq"
    assert main(base + ["--out", str(out2), "--n", "2"]) == 0
    assert len(read_seq_file(out2)) == 2


def test_config_rejects_unknown_keys(pipeline, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n", encoding="utf-8")
    assert main([
        "generate", "--model", str(pipeline["model"]),
        "--out", str(tmp_path / "x.seq"), "--config", str(cfg),
    ]) == 2
    assert "unknown keys" in capsys.readouterr().err


def test_config_rejects_malformed_lines(pipeline, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just some words\n", encoding="utf-8")
    assert main([
        "generate", "--model", str(pipeline["model"]),
        "--out", str(tmp_path / "x.seq"), "--config", str(cfg),
    ]) == 2
    assert "expected key = value" in capsys.readouterr().err


def test_vocab_env_var_and_flag_precedence(tmp_path, monkeypatch):
    trimmed = tmp_path / "trimmed.vocab"
    build_vocab(max_counts={"R": 24}).save(trimmed)
    full = tmp_path / "full.vocab"
    default_vocab().save(full)
    nl = tmp_path / "rc.ckt"
    nl.write_text(RC_NETLIST, encoding="utf-8")

    monkeypatch.setenv("GENIE_VOCAB", str(trimmed))
    store_path = tmp_path / "store.json"
    assert main(["ingest", "--netlists", str(nl), "--out", str(store_path)]) == 0
    store = json.loads(store_path.read_text())
    assert store["vocab_sha256"] == build_vocab(max_counts={"R": 24}).digest()

    # an explicit --vocab beats the environment
    assert main(["ingest", "--netlists", str(nl), "--out", str(store_path),
                 "--vocab", str(full)]) == 0
    store = json.loads(store_path.read_text())
    assert store["vocab_sha256"] == default_vocab().digest()


# --- installed entry point ----------------------------------------------------


def test_console_script_smoke(tmp_path):
    ckt = tmp_path / "rc.ckt"
    ckt.write_text(RC_NETLIST, encoding="utf-8")
    exe = shutil.which("pinseq")
    cmd = [exe] if exe else [sys.executable, "-m", "pinseq.cli"]
    proc = subprocess.run(
        cmd + ["encode", "--ckt", str(ckt)],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("TRUNCATE")


def test_early_closed_pipe_is_not_an_error(tmp_path):
    # `pinseq validate ... | head -1` must not print an error or exit 2;
    # the file is large enough that the writer outlives the reader
    seq = tmp_path / "many.seq"
    seq.write_text("VSS R1_N R1 R1_P VDD R1_P R1 R1_N VSS TRUNCATE\n" * 20000,
                   encoding="utf-8")
    exe = shutil.which("pinseq")
    cmd = " ".join([exe] if exe else [sys.executable, "-m", "pinseq.cli"])
    proc = subprocess.run(
        ["bash", "-c",
         f"{cmd} validate --seq {seq} | head -1; exit ${{PIPESTATUS[0]}}"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert "error:" not in proc.stderr
    assert proc.stdout.startswith("{")
