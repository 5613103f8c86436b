"""Next-token training loop with per-epoch loss logging and checkpoints.

Each corpus sequence is one training row (no cross-sequence packing): the
model reads row[:-1] and predicts row[1:].  Rows are right-padded per
batch and padded targets are excluded from the loss, so short walks never
dilute the objective.  The checkpoint carries the config, the token-table
digest, the optimizer state, and the full loss history, which makes a
resumed run continue the same curve and makes mixing artifacts from
different tables a hard error instead of a quiet accuracy bug.
"""

from __future__ import annotations

import csv
import logging
import random
import time
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .config import TrainConfig
from .errors import CheckpointError, CorpusError, DigestMismatchError
from .model import WalkTransformer
from .vocabfile import VocabFile

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "pintrain-checkpoint-v1"
IGNORE_INDEX = -100


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float


def _check_rows(rows: list[list[int]], cfg: TrainConfig, name: str) -> None:
    if not rows:
        raise CorpusError(f"{name} corpus is empty")
    longest = max(len(r) for r in rows)
    if longest - 1 > cfg.context:
        raise CorpusError(
            f"{name} corpus has a {longest}-id sequence; context is {cfg.context}"
        )


def _pad_batch(rows: list[list[int]]) -> tuple[torch.Tensor, torch.Tensor]:
    """Right-pad rows to the batch maximum; targets hide the padding."""
    width = max(len(r) for r in rows) - 1
    x = torch.zeros(len(rows), width, dtype=torch.long)
    y = torch.full((len(rows), width), IGNORE_INDEX, dtype=torch.long)
    for i, row in enumerate(rows):
        t = len(row) - 1
        x[i, :t] = torch.tensor(row[:-1], dtype=torch.long)
        y[i, :t] = torch.tensor(row[1:], dtype=torch.long)
    return x, y


def _batches(rows, batch_size: int, rng: random.Random | None):
    """Group length-sorted rows so batches pad to near their own maximum.

    Walk lengths vary a lot; batching similar lengths together avoids
    spending most of the step on padded positions.  Training passes an
    rng to shuffle the batch order (and break length ties) per epoch;
    evaluation passes None and gets a fixed order.
    """
    order = list(range(len(rows)))
    if rng is not None:
        rng.shuffle(order)
    order.sort(key=lambda i: len(rows[i]))
    batches = [order[s:s + batch_size] for s in range(0, len(order), batch_size)]
    if rng is not None:
        rng.shuffle(batches)
    for batch in batches:
        yield [rows[i] for i in batch]


@torch.no_grad()
def mean_loss(model: WalkTransformer, rows: list[list[int]],
              batch_size: int = 64) -> float:
    """Token-averaged cross entropy over a corpus, padding excluded."""
    model.eval()
    total, count = 0.0, 0
    for chunk in _batches(rows, batch_size, rng=None):
        x, y = _pad_batch(chunk)
        logits = model(x)
        loss = F.cross_entropy(
            logits.transpose(1, 2), y,
            ignore_index=IGNORE_INDEX, reduction="sum",
        )
        total += float(loss)
        count += int((y != IGNORE_INDEX).sum())
    return total / count


def save_checkpoint(path, model, optimizer, cfg: TrainConfig,
                    vocab_sha256: str, history: list[EpochStats]) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "config": cfg.to_dict(),
            "vocab_sha256": vocab_sha256,
            "model": model.state_dict(),
            "optimizer": optimizer.state_dict(),
            "history": [(s.epoch, s.train_loss, s.val_loss) for s in history],
        },
        path,
    )


def load_checkpoint(path, vocab: VocabFile):
    """Rebuild (model, config, history, optimizer_state) from disk."""
    try:
        blob = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    if not isinstance(blob, dict) or blob.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a {CHECKPOINT_FORMAT} file")
    if blob["vocab_sha256"] != vocab.sha256():
        raise DigestMismatchError(
            f"{path} was trained against table {blob['vocab_sha256'][:12]}..., "
            f"loaded table is {vocab.sha256()[:12]}..."
        )
    cfg = TrainConfig(**blob["config"])
    model = WalkTransformer(cfg)
    model.load_state_dict(blob["model"])
    history = [EpochStats(*row) for row in blob["history"]]
    return model, cfg, history, blob["optimizer"]


def write_loss_csv(path, history: list[EpochStats]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "train_loss", "val_loss"])
        for s in history:
            w.writerow([s.epoch, f"{s.train_loss:.6f}", f"{s.val_loss:.6f}"])


def train(
    train_rows: list[list[int]],
    val_rows: list[list[int]],
    cfg: TrainConfig,
    vocab: VocabFile,
    out_path,
    csv_path=None,
    resume=None,
    time_budget: float | None = None,
) -> list[EpochStats]:
    """Run cfg.epochs of AdamW over the training rows; return the history.

    ``resume`` continues a previous run: the model, optimizer, and loss
    history come from the checkpoint (whose config must match) and epoch
    numbering carries on where it stopped.  ``time_budget`` (seconds)
    stops cleanly after the epoch that crosses it.
    """
    if cfg.vocab_size != len(vocab):
        raise DigestMismatchError(
            f"config expects {cfg.vocab_size} tokens, table has {len(vocab)}"
        )
    _check_rows(train_rows, cfg, "train")
    _check_rows(val_rows, cfg, "val")

    torch.manual_seed(cfg.seed)
    if resume is not None:
        model, prior_cfg, history, opt_state = load_checkpoint(resume, vocab)
        # schedule knobs (epochs, lr, batch, seed) may change between runs;
        # the network shape may not
        for name in ("layers", "heads", "vocab_size", "context",
                     "embed_dim", "dropout"):
            if getattr(prior_cfg, name) != getattr(cfg, name):
                raise CheckpointError(
                    f"resume changes {name}: checkpoint has "
                    f"{getattr(prior_cfg, name)}, config asks {getattr(cfg, name)}"
                )
        optimizer = torch.optim.AdamW(
            model.parameters(), lr=cfg.lr, weight_decay=cfg.weight_decay
        )
        optimizer.load_state_dict(opt_state)
    else:
        model = WalkTransformer(cfg)
        optimizer = torch.optim.AdamW(
            model.parameters(), lr=cfg.lr, weight_decay=cfg.weight_decay
        )
        history = []

    log.info(
        "training %d params on %d rows (%d val), %d epochs",
        model.parameter_count(), len(train_rows), len(val_rows), cfg.epochs,
    )
    start = time.perf_counter()
    first_epoch = history[-1].epoch + 1 if history else 1
    for epoch in range(first_epoch, first_epoch + cfg.epochs):
        model.train()
        rng = random.Random((cfg.seed << 16) + epoch)
        total, count = 0.0, 0
        for chunk in _batches(train_rows, cfg.batch_size, rng):
            x, y = _pad_batch(chunk)
            logits = model(x)
            loss = F.cross_entropy(
                logits.transpose(1, 2), y, ignore_index=IGNORE_INDEX
            )
            optimizer.zero_grad(set_to_none=True)
            loss.backward()
            if cfg.grad_clip:
                torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
            optimizer.step()
            n_tokens = int((y != IGNORE_INDEX).sum())
            total += float(loss.detach()) * n_tokens
            count += n_tokens
        stats = EpochStats(
            epoch=epoch,
            train_loss=total / count,
            val_loss=mean_loss(model, val_rows, cfg.batch_size),
        )
        history.append(stats)
        log.info(
            "epoch %d: train %.4f val %.4f (%.1fs)",
            stats.epoch, stats.train_loss, stats.val_loss,
            time.perf_counter() - start,
        )
        save_checkpoint(out_path, model, optimizer, cfg, vocab.sha256(), history)
        if csv_path is not None:
            write_loss_csv(csv_path, history)
        if time_budget is not None and time.perf_counter() - start > time_budget:
            log.info("time budget reached after epoch %d", stats.epoch)
            break
    return history
