"""Decoder-only transformer over walk token ids.

Plain pre-norm architecture: learned token and position embeddings,
causal self-attention blocks with a 4x GELU feed-forward, a final layer
norm, and an untied output head.  Nothing here knows about walks or
legality; structure is learned from data alone, which is the point of
the comparison against the count-based baseline.

Generation keeps per-block key/value caches so each new token costs one
single-position forward pass instead of re-reading the whole prefix.
"""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F
from torch import nn

from .config import TrainConfig

# per-block cache: (keys, values), each (batch, heads, positions, head_dim)
KV = tuple[torch.Tensor, torch.Tensor]


class Block(nn.Module):
    def __init__(self, cfg: TrainConfig) -> None:
        super().__init__()
        self.heads = cfg.heads
        self.ln_attn = nn.LayerNorm(cfg.embed_dim)
        self.qkv = nn.Linear(cfg.embed_dim, 3 * cfg.embed_dim)
        self.proj = nn.Linear(cfg.embed_dim, cfg.embed_dim)
        self.ln_mlp = nn.LayerNorm(cfg.embed_dim)
        self.mlp = nn.Sequential(
            nn.Linear(cfg.embed_dim, 4 * cfg.embed_dim),
            nn.GELU(),
            nn.Linear(4 * cfg.embed_dim, cfg.embed_dim),
        )
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, x: torch.Tensor, past: KV | None = None
                ) -> tuple[torch.Tensor, KV]:
        # with a cache, only single-position steps are causally sound
        b, t, d = x.shape
        assert past is None or t == 1
        q, k, v = self.qkv(self.ln_attn(x)).chunk(3, dim=-1)
        split = (b, t, self.heads, d // self.heads)
        q, k, v = (u.view(split).transpose(1, 2) for u in (q, k, v))
        if past is not None:
            k = torch.cat([past[0], k], dim=2)
            v = torch.cat([past[1], v], dim=2)
        attn = F.scaled_dot_product_attention(
            q, k, v, is_causal=past is None and t > 1
        )
        attn = attn.transpose(1, 2).reshape(b, t, d)
        x = x + self.dropout(self.proj(attn))
        return x + self.dropout(self.mlp(self.ln_mlp(x))), (k, v)


class WalkTransformer(nn.Module):
    def __init__(self, cfg: TrainConfig) -> None:
        super().__init__()
        self.cfg = cfg
        self.tok_emb = nn.Embedding(cfg.vocab_size, cfg.embed_dim)
        self.pos_emb = nn.Embedding(cfg.context, cfg.embed_dim)
        self.dropout = nn.Dropout(cfg.dropout)
        self.blocks = nn.ModuleList(Block(cfg) for _ in range(cfg.layers))
        self.ln_out = nn.LayerNorm(cfg.embed_dim)
        self.head = nn.Linear(cfg.embed_dim, cfg.vocab_size, bias=False)
        self.apply(self._init_weights)

    @staticmethod
    def _init_weights(module: nn.Module) -> None:
        if isinstance(module, (nn.Linear, nn.Embedding)):
            nn.init.normal_(module.weight, mean=0.0, std=0.02)
            if isinstance(module, nn.Linear) and module.bias is not None:
                nn.init.zeros_(module.bias)

    def _step(self, idx: torch.Tensor, pos_start: int,
              past: list[KV | None]) -> tuple[torch.Tensor, list[KV]]:
        t = idx.shape[1]
        if pos_start + t > self.cfg.context:
            raise ValueError(
                f"sequence of {pos_start + t} exceeds context {self.cfg.context}"
            )
        pos = torch.arange(pos_start, pos_start + t, device=idx.device)
        x = self.dropout(self.tok_emb(idx) + self.pos_emb(pos))
        present: list[KV] = []
        for block, p in zip(self.blocks, past):
            x, kv = block(x, p)
            present.append(kv)
        return self.head(self.ln_out(x)), present

    def forward(self, idx: torch.Tensor) -> torch.Tensor:
        logits, _ = self._step(idx, 0, [None] * len(self.blocks))
        return logits

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

    @torch.no_grad()
    def generate(
        self,
        n: int,
        prompt_id: int,
        sentinel_id: int,
        seed: int,
        temperature: float = 1.0,
        top_k: int | None = None,
        max_new: int | None = None,
    ) -> list[list[int]]:
        """Sample n rows from the single-token prompt, batched in lockstep.

        Every row starts at the prompt and grows until it emits the
        sentinel or hits the context bound; finished rows are frozen by
        forcing further picks to the sentinel, so one generator drawn in
        a fixed order yields the same batch for the same (n, seed).
        Returned rows include the prompt and exclude the sentinel.
        """
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        limit = self.cfg.context if max_new is None else min(
            max_new + 1, self.cfg.context
        )
        self.eval()
        gen = torch.Generator().manual_seed(seed)
        idx = torch.full((n, 1), prompt_id, dtype=torch.long)
        done = torch.zeros(n, dtype=torch.bool)
        rows = idx.tolist()
        logits, past = self._step(idx, 0, [None] * len(self.blocks))
        for step in range(1, limit):
            scaled = logits[:, -1, :] / temperature
            if top_k is not None and top_k < scaled.shape[-1]:
                cutoff = torch.topk(scaled, top_k, dim=-1).values[:, -1:]
                scaled = scaled.masked_fill(scaled < cutoff, -math.inf)
            probs = F.softmax(scaled, dim=-1)
            picks = torch.multinomial(probs, 1, generator=gen).squeeze(-1)
            picks = torch.where(done, torch.full_like(picks, sentinel_id), picks)
            done |= picks == sentinel_id
            for row, pick in zip(rows, picks.tolist()):
                if pick != sentinel_id:
                    row.append(pick)
            if bool(done.all()):
                break
            logits, past = self._step(picks.unsqueeze(-1), step, past)
        return rows
