"""Training configuration, loadable from a YAML file; flags still win.

The architecture shape (6 layers, 6 heads, table size 1029, context
1024) is the published reference point and the defaults here; with the
default width of 384 the network lands at about 11.8M parameters, the
reference scale.  Width and the optimizer schedule are deliberately free
so the same code covers desk-scale smoke runs and longer jobs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import yaml

from .errors import ConfigError


@dataclass(frozen=True)
class TrainConfig:
    layers: int = 6
    heads: int = 6
    vocab_size: int = 1029
    context: int = 1024
    embed_dim: int = 384
    dropout: float = 0.0
    lr: float = 1e-3
    weight_decay: float = 0.01
    grad_clip: float = 1.0
    batch_size: int = 32
    epochs: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.embed_dim % self.heads:
            raise ConfigError(
                f"embed_dim {self.embed_dim} not divisible by {self.heads} heads"
            )
        for name in ("layers", "heads", "vocab_size", "context", "embed_dim",
                     "batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path=None, **overrides) -> TrainConfig:
    """Build a config from an optional YAML file plus explicit overrides.

    YAML keys must be config field names; overrides (CLI flags) are
    applied after the file so they always win.  ``None`` overrides are
    treated as absent.
    """
    values: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: expected a mapping of config fields")
        values.update(loaded)
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(TrainConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    return TrainConfig(**values)
