"""Command line entry points: train a model, sample walks from it.

Exit codes follow the corpus tooling convention: 0 on success, 2 on any
deliberate error (bad files, mismatched digests, bad config).
"""

from __future__ import annotations

import argparse
import logging
import os
import pathlib
import sys

from . import corpus
from .config import load_config
from .errors import TrainerError
from .train import load_checkpoint, train
from .vocabfile import load_vocab

log = logging.getLogger(__name__)


def cmd_train(args) -> int:
    vocab = load_vocab(args.vocab)
    cfg = load_config(
        args.config,
        epochs=args.epochs,
        batch_size=args.batch_size,
        embed_dim=args.embed_dim,
        lr=args.lr,
        seed=args.seed,
    )
    corpus.check_manifest(args.train, vocab, cfg.context)
    train_rows = corpus.read_token_bin(args.train, vocab)
    val_rows = corpus.read_token_bin(args.val, vocab)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    csv_path = args.loss_csv or out.with_suffix(".loss.csv")
    history = train(
        train_rows, val_rows, cfg, vocab, out,
        csv_path=csv_path,
        resume=args.resume,
        time_budget=args.time_budget,
    )
    print(
        f"trained to epoch {history[-1].epoch}: "
        f"val loss {history[-1].val_loss:.4f} -> {out}"
    )
    return 0


def cmd_sample(args) -> int:
    vocab = load_vocab(args.vocab)
    model, cfg, _, _ = load_checkpoint(args.checkpoint, vocab)
    rows = model.generate(
        args.n,
        prompt_id=vocab.prompt_id,
        sentinel_id=vocab.sentinel_id,
        seed=args.seed,
        temperature=args.temperature,
        top_k=args.top_k,
        max_new=args.max_new,
    )
    corpus.write_seq_file(args.out, rows, vocab)
    print(f"sampled {len(rows)} walks -> {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pintrain",
        description="decoder-only transformer over walk token corpora",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("train", help="fit a model on .bin corpora")
    p.set_defaults(fn=cmd_train)
    p.add_argument("--train", required=True, help="training .bin stream")
    p.add_argument("--val", required=True, help="validation .bin stream")
    p.add_argument("--vocab", required=True, help="token table file")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--config", default=None, help="YAML config; flags win")
    p.add_argument("--loss-csv", default=None,
                   help="loss curve CSV (default <out>.loss.csv)")
    p.add_argument("--resume", default=None, help="checkpoint to continue")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--embed-dim", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None,
                   help="stop after the epoch that crosses this many seconds")
    p.add_argument("-v", "--verbose", action="store_true")

    p = subs.add_parser("sample", help="generate walks from a checkpoint")
    p.set_defaults(fn=cmd_sample)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True, help="token table file")
    p.add_argument("--out", required=True, help="output .seq path")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--max-new", type=int, default=None)
    p.add_argument("-v", "--verbose", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.INFO,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.fn(args)
    except TrainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # the consumer closed the pipe; detach stdout so interpreter
        # shutdown doesn't raise a second time
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
