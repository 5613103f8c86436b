"""Command line front end.

One executable, one subcommand per pipeline stage:

    ingest    netlists -> circuit store + known-hash list
    corpus    store -> split, augmented id corpora + manifest
    fit       id corpus -> n-gram model file
    generate  model -> sampled .seq (and netlists for the valid ones)
    validate  .seq -> per-sequence verdict report
    evaluate  .seq + hashes -> summary metrics JSON
    stats     store -> dataset profile CSV
    encode    one netlist -> .seq walks
    decode    .seq -> netlists
    augment   one netlist -> distinct .seq walks

Every subcommand takes --seed and --vocab.  A vocab path may also come
from the GENIE_VOCAB environment variable; explicit flags win.  --config
FILE reads ``key = value`` lines (keys match long flag names) as extra
defaults; explicit flags win over the file too.

Exit codes: 0 on success, 1 when --strict finds validation failures,
2 for usage or I/O problems.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import pathlib
import sys
from concurrent.futures import ThreadPoolExecutor

from . import corpusio, data
from .augment import augment as augment_graph
from .augment import build_corpus
from .canon import canonical_hash, canonicalize
from .errors import PinseqError
from .euler import TokenSequence, decode, encode
from .metrics import dataset_stats, evaluate, validity_report_lines
from .model import build_graph, nets_from_graph
from .netlist import emit_netlist, parse_netlist
from .ngram import NgramModel, SamplerConfig, fit, sample_many
from .validity import check_sequence, check_topology
from .vocab import Vocab, default_vocab

log = logging.getLogger("pinseq")

STORE_FORMAT = "pinseq-store-v1"


def _load_vocab(args) -> Vocab:
    path = args.vocab or os.environ.get("GENIE_VOCAB")
    if path:
        return Vocab.load(path)
    return default_vocab()


def _pmap(fn, items, jobs: int) -> list:
    """Map preserving input order; thread count never affects results."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _read_store(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        store = json.load(fh)
    if store.get("format") != STORE_FORMAT:
        raise PinseqError(f"{path} is not a {STORE_FORMAT} file")
    return store


# --- subcommand bodies ------------------------------------------------------


def cmd_ingest(args) -> int:
    vocab = _load_vocab(args)
    sources: list[tuple[str, str]] = []
    if args.bundled:
        sources.extend((n, data.corpus_text(n)) for n in data.corpus_names())
    for item in args.netlists:
        p = pathlib.Path(item)
        files = sorted(p.glob("*.ckt")) if p.is_dir() else [p]
        sources.extend((f.stem, f.read_text(encoding="utf-8")) for f in files)

    circuits = []
    seen: dict[str, str] = {}
    failures = 0
    for name, text in sources:
        try:
            t = parse_netlist(text, vocab.terminals)
            report = check_topology(t)
            if not report.is_valid:
                raise PinseqError(
                    "; ".join(str(v) for v in report.violations)
                )
            g = build_graph(t)
            h = canonical_hash(g)
        except PinseqError as exc:
            failures += 1
            if args.skip_bad:
                log.warning("skipping %s: %s", name, exc)
            else:
                log.error("%s: %s", name, exc)
            continue
        if h in seen:
            log.info("duplicate topology %s (same as %s)", name, seen[h])
            continue
        seen[h] = name
        canon_t = nets_from_graph(canonicalize(g).graph)
        circuits.append(
            {
                "name": name,
                "label": data.label_of(name),
                "hash": h,
                "netlist": emit_netlist(canon_t, title=name),
            }
        )

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    store = {
        "format": STORE_FORMAT,
        "vocab_sha256": vocab.digest(),
        "circuits": sorted(circuits, key=lambda c: c["hash"]),
    }
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(store, fh, indent=2)
        fh.write("\n")
    corpusio.write_hashes(out.parent / "hashes.txt", sorted(seen))
    print(f"ingested {len(circuits)} circuits ({failures} failed) -> {out}")
    if failures and not args.skip_bad:
        return 2
    return 0


def cmd_corpus(args) -> int:
    vocab = _load_vocab(args)
    store = _read_store(args.store)
    graphs = _pmap(
        lambda c: build_graph(parse_netlist(c["netlist"], vocab.terminals)),
        store["circuits"],
        args.jobs,
    )
    built = build_corpus(
        graphs,
        per_circuit=args.per_circuit,
        split_ratio=args.split,
        seed=args.seed,
    )
    if args.min_fraction is not None:
        for digest, (requested, found) in sorted(built.shortfalls.items()):
            if found / requested < args.min_fraction:
                raise PinseqError(
                    f"circuit {digest[:12]} yielded {found}/{requested} walks, "
                    f"under --min-fraction {args.min_fraction}"
                )
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpusio.export_corpus(built.train, vocab, out_dir / "train.bin")
    corpusio.export_corpus(built.val, vocab, out_dir / "val.bin")
    corpusio.write_seq_file(out_dir / "train.seq", built.train)
    corpusio.write_seq_file(out_dir / "val.seq", built.val)
    corpusio.write_hashes(out_dir / "train_hashes.txt", built.train_hashes)
    corpusio.write_hashes(out_dir / "val_hashes.txt", built.val_hashes)
    manifest = built.manifest()
    manifest["format"] = "pinseq-corpus-v1"
    manifest["vocab_sha256"] = vocab.digest()
    manifest["max_seq_len"] = vocab.max_seq_len
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(
        f"corpus: {len(built.train)} train / {len(built.val)} val sequences "
        f"from {len(built.train_hashes)}/{len(built.val_hashes)} circuits -> {out_dir}"
    )
    return 0


def cmd_fit(args) -> int:
    vocab = _load_vocab(args)
    sequences = corpusio.import_samples(args.corpus, vocab)
    ids = [[vocab.id_of(t) for t in s.tokens] for s in sequences]
    model = fit(ids, vocab, order=args.order, alpha=args.alpha)
    model.save(args.out)
    print(f"fit order-{args.order} model on {len(ids)} sequences -> {args.out}")
    return 0


def cmd_generate(args) -> int:
    vocab = _load_vocab(args)
    model = NgramModel.load(args.model)
    if model.vocab_digest != vocab.digest():
        raise PinseqError("model was fit against a different vocab")
    cfg = SamplerConfig(
        temperature=args.temperature,
        top_k=args.top_k,
        legality_mask=not args.no_mask,
        max_len=args.max_len,
        seed=args.seed,
    )
    samples = sample_many(model, vocab, args.n, cfg)
    out = pathlib.Path(args.out)
    corpusio.write_seq_file(out, samples)
    emit_dir = pathlib.Path(args.emit_dir) if args.emit_dir else (
        out.parent / f"{out.stem}_ckt"
    )
    emit_dir.mkdir(parents=True, exist_ok=True)
    n_valid = 0
    for i, s in enumerate(samples):
        if not check_sequence(s, vocab.terminals).is_valid:
            continue
        n_valid += 1
        t = nets_from_graph(decode(s, vocab.terminals))
        name = f"sample_{i:05d}"
        (emit_dir / f"{name}.ckt").write_text(
            emit_netlist(t, title=name), encoding="utf-8"
        )
    print(f"generated {len(samples)} samples -> {out}; "
          f"{n_valid} valid netlists -> {emit_dir}")
    return 0


def cmd_validate(args) -> int:
    vocab = _load_vocab(args)
    samples = corpusio.read_seq_file(args.seq)
    rows = _pmap(
        lambda s: next(validity_report_lines([s], vocab.terminals)),
        samples,
        args.jobs,
    )
    for i, row in enumerate(rows):
        row["seq_index"] = i
    out_fh = open(args.report, "w", encoding="utf-8") if args.report else sys.stdout
    try:
        for row in rows:
            out_fh.write(json.dumps(row))
            out_fh.write("\n")
    finally:
        if args.report:
            out_fh.close()
    n_bad = sum(1 for r in rows if r["verdict"] != "valid")
    log.info("validate: %d/%d invalid", n_bad, len(rows))
    if n_bad and args.strict:
        return 1
    return 0


def cmd_evaluate(args) -> int:
    vocab = _load_vocab(args)
    samples = corpusio.read_seq_file(args.seq)
    known = corpusio.read_hashes(args.hashes) if args.hashes else set()
    if args.jobs > 1:
        # evaluate is a fold; parallelize the per-sample reports by chunking
        chunks = [samples[i::args.jobs] for i in range(args.jobs)]
        partial = _pmap(lambda ch: evaluate(ch, known, vocab.terminals), chunks, args.jobs)
        summary = _merge_summaries(partial, samples, known, vocab)
    else:
        summary = evaluate(samples, known, vocab.terminals)
    text = json.dumps(summary.to_json_dict(), indent=2)
    if args.out:
        pathlib.Path(args.out).write_text(text + "\n", encoding="utf-8")
    if args.csv:
        pathlib.Path(args.csv).write_text(summary.to_csv(), encoding="utf-8")
    print(text)
    if args.strict and summary.valid_fraction < 1.0:
        return 1
    return 0


def _merge_summaries(parts, samples, known, vocab):
    # deterministic regardless of chunking: recompute fractions from counts
    from collections import Counter

    from .metrics import EvalSummary

    n = sum(p.n_samples for p in parts)
    n_valid = round(sum(p.valid_fraction * p.n_samples for p in parts))
    n_novel = round(sum(p.novel_fraction * p.valid_fraction * p.n_samples for p in parts))
    n_strict = round(sum(p.euler_strict_fraction * p.n_samples for p in parts))
    dev_hist: Counter = Counter()
    vio_hist: Counter = Counter()
    for p in parts:
        dev_hist.update(p.device_count_histogram)
        vio_hist.update(p.violation_histogram)
    return EvalSummary(
        n_samples=n,
        valid_fraction=(n_valid / n) if n else 0.0,
        novel_fraction=(n_novel / n_valid) if n_valid else 0.0,
        max_devices=max((p.max_devices for p in parts), default=0),
        device_count_histogram=dict(dev_hist),
        euler_strict_fraction=(n_strict / n) if n else 0.0,
        violation_histogram=dict(vio_hist),
    )


def cmd_stats(args) -> int:
    vocab = _load_vocab(args)
    store = _read_store(args.store)
    topos = [parse_netlist(c["netlist"], vocab.terminals) for c in store["circuits"]]
    labels = [c.get("label", "unlabeled") for c in store["circuits"]]
    csv_text = dataset_stats(topos, labels).to_csv()
    if args.out:
        pathlib.Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_encode(args) -> int:
    vocab = _load_vocab(args)
    text = pathlib.Path(args.ckt).read_text(encoding="utf-8")
    g = build_graph(parse_netlist(text, vocab.terminals))
    seqs = [encode(g, args.seed + k) for k in range(args.count)]
    if args.out:
        corpusio.write_seq_file(args.out, seqs)
    else:
        for s in seqs:
            print(s.to_text())
    return 0


def cmd_decode(args) -> int:
    vocab = _load_vocab(args)
    samples = corpusio.read_seq_file(args.seq)
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(samples):
        t = nets_from_graph(decode(s, vocab.terminals))
        name = f"decoded_{i:05d}"
        (out_dir / f"{name}.ckt").write_text(
            emit_netlist(t, title=name), encoding="utf-8"
        )
    print(f"decoded {len(samples)} sequences -> {out_dir}")
    return 0


def cmd_augment(args) -> int:
    vocab = _load_vocab(args)
    text = pathlib.Path(args.ckt).read_text(encoding="utf-8")
    g = build_graph(parse_netlist(text, vocab.terminals))
    seqs = augment_graph(g, args.target, args.seed)
    if args.out:
        corpusio.write_seq_file(args.out, seqs)
    else:
        for s in seqs:
            print(s.to_text())
    log.info("augment: %d/%d distinct walks", len(seqs), args.target)
    return 0


# --- parser wiring -----------------------------------------------------------


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="pinseq",
        description="circuit topologies as token sequences: corpus, baseline model, metrics",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    by_name: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, fn, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--vocab", default=None,
                       help="vocab file (default: built-in table or $GENIE_VOCAB)")
        p.add_argument("--config", default=None,
                       help="key=value file with extra defaults; flags win")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker threads; results are order-independent")
        p.add_argument("-v", "--verbose", action="store_true")
        by_name[name] = p
        return p

    p = sub("ingest", cmd_ingest, "parse netlists into a circuit store")
    p.add_argument("--netlists", nargs="*", default=[],
                   help="netlist files or directories of .ckt files")
    p.add_argument("--bundled", action="store_true", help="include the bundled corpus")
    p.add_argument("--out", required=True, help="store JSON path")
    p.add_argument("--skip-bad", action="store_true",
                   help="warn and continue past unparseable inputs")

    p = sub("corpus", cmd_corpus, "split and augment a store into id corpora")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--per-circuit", type=int, default=70)
    p.add_argument("--split", type=float, default=0.9)
    p.add_argument("--min-fraction", type=float, default=None,
                   help="fail if any circuit yields fewer than this fraction of walks")

    p = sub("fit", cmd_fit, "fit the n-gram baseline on a .bin corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.4)

    p = sub("generate", cmd_generate, "sample sequences from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=100, help="number of samples")
    p.add_argument("--out", required=True, help="output .seq path")
    p.add_argument("--emit-dir", default=None,
                   help="netlist directory for valid samples (default <out>_ckt)")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--no-mask", action="store_true", help="disable the legality mask")
    p.add_argument("--max-len", type=int, default=1024)

    p = sub("validate", cmd_validate, "per-sequence validity verdicts")
    p.add_argument("--seq", required=True)
    p.add_argument("--report", default=None, help="write JSON lines here instead of stdout")
    p.add_argument("--strict", action="store_true", help="exit 1 on any invalid sequence")

    p = sub("evaluate", cmd_evaluate, "summary metrics for a sample file")
    p.add_argument("--seq", required=True)
    p.add_argument("--hashes", default=None, help="known-topology digests for novelty")
    p.add_argument("--out", default=None, help="also write the summary JSON here")
    p.add_argument("--csv", default=None, help="also write the summary as CSV here")
    p.add_argument("--strict", action="store_true",
                   help="exit 1 unless every sample is valid")

    p = sub("stats", cmd_stats, "dataset profile CSV from a store")
    p.add_argument("--store", required=True)
    p.add_argument("--out", default=None)

    p = sub("encode", cmd_encode, "netlist to token walks")
    p.add_argument("--ckt", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub("decode", cmd_decode, "token walks back to netlists")
    p.add_argument("--seq", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub("augment", cmd_augment, "distinct walks of one circuit")
    p.add_argument("--ckt", required=True)
    p.add_argument("--target", type=int, default=70)
    p.add_argument("--out", default=None)

    return parser, by_name


def _apply_config(argv: list[str], by_name: dict[str, argparse.ArgumentParser]) -> None:
    """Fold --config file values in as subparser defaults (flags still win)."""
    if "--config" not in argv:
        return
    cfg_path = argv[argv.index("--config") + 1]
    command = next((a for a in argv if not a.startswith("-")), None)
    if command not in by_name:
        return
    values: dict[str, object] = {}
    with open(cfg_path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PinseqError(f"{cfg_path}:{line_no}: expected key = value")
            key, _, val = line.partition("=")
            dest = key.strip().replace("-", "_")
            text = val.strip()
            if text.lower() in ("true", "false"):
                parsed: object = text.lower() == "true"
            else:
                try:
                    parsed = int(text)
                except ValueError:
                    try:
                        parsed = float(text)
                    except ValueError:
                        parsed = text
            values[dest] = parsed
    sub = by_name[command]
    known = {a.dest for a in sub._actions}
    unknown = set(values) - known
    if unknown:
        raise PinseqError(f"{cfg_path}: unknown keys {sorted(unknown)}")
    sub.set_defaults(**values)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, by_name = _build_parser()
    try:
        _apply_config(argv, by_name)
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.INFO,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.fn(args)
    except PinseqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # the consumer (head, less, ...) closed the pipe; not our failure.
        # detach stdout so interpreter shutdown doesn't raise a second time
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
