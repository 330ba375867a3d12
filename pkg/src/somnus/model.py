"""Sequence-to-sequence sleep staging model.

A heap of epoch-level encoder blocks turns each spectrogram into a pooled
feature vector via softmax attention pooling; a heap of sequence-level
blocks mixes the epoch vectors across the context window; a shared
two-layer FC head with softmax emits one stage distribution per epoch.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import tensor as T
from .encoder import (AttentionRecord, EncoderBlockParams, encoder_block,
                      glorot_uniform, init_encoder_block, positional_encoding)
from .errors import ConfigError, UsageError
from .features import Spectrogram
from .tensor import Tensor

LOSS_PROB_FLOOR = 1e-8


@dataclass
class ModelConfig:
    seq_len: int = 21            # L, epochs per input sequence
    n_frames: int = 29           # T, spectrogram time frames
    n_bins: int = 128            # F, frequency bins == model width at both levels
    n_classes: int = 5
    n_epoch_blocks: int = 4      # N_E
    n_seq_blocks: int = 4        # N_S
    n_heads: int = 8
    d_ff: int = 1024
    fc_size: int = 1024
    attention_size: int = 64     # pooling projection width A
    dropout: float = 0.1
    scale_per_head: bool = False

    def validate(self) -> None:
        if self.n_bins % self.n_heads != 0:
            raise ConfigError(f"n_bins {self.n_bins} not divisible by "
                              f"n_heads {self.n_heads}")
        for name in ("seq_len", "n_epoch_blocks", "n_seq_blocks", "attention_size",
                     "n_frames", "n_classes", "d_ff", "fc_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass
class ForwardResult:
    """Output of one forward pass over a batch of sequences."""

    probs: Tensor                     # (B, L, C)
    epoch_scores: list[np.ndarray]    # per layer: (B, L, H, T, T), detached
    seq_scores: list[np.ndarray]      # per layer: (B, H, L, L), detached
    alphas: np.ndarray                # (B, L, T), detached


class SleepModel:
    def __init__(self, config: ModelConfig, rng: np.random.Generator,
                 dtype=np.float32):
        config.validate()
        self.config = config
        self.dtype = dtype
        c = config
        self.epoch_blocks = [
            init_encoder_block(c.n_bins, c.n_heads, c.d_ff, rng, dropout=c.dropout,
                               scale_per_head=c.scale_per_head, dtype=dtype)
            for _ in range(c.n_epoch_blocks)]
        self.seq_blocks = [
            init_encoder_block(c.n_bins, c.n_heads, c.d_ff, rng, dropout=c.dropout,
                               scale_per_head=c.scale_per_head, dtype=dtype)
            for _ in range(c.n_seq_blocks)]
        a = c.attention_size
        self.w_a = glorot_uniform(rng, c.n_bins, a, dtype=dtype)
        self.b_a = Tensor(np.zeros(a, dtype=dtype), requires_grad=True)
        self.a_e = glorot_uniform(rng, a, 1, shape=(a, 1), dtype=dtype)
        self.fc1_w = glorot_uniform(rng, c.n_bins, c.fc_size, dtype=dtype)
        self.fc1_b = Tensor(np.zeros(c.fc_size, dtype=dtype), requires_grad=True)
        self.fc2_w = glorot_uniform(rng, c.fc_size, c.fc_size, dtype=dtype)
        self.fc2_b = Tensor(np.zeros(c.fc_size, dtype=dtype), requires_grad=True)
        self.out_w = glorot_uniform(rng, c.fc_size, c.n_classes, dtype=dtype)
        self.out_b = Tensor(np.zeros(c.n_classes, dtype=dtype), requires_grad=True)
        self._pe_epoch = positional_encoding(c.n_frames, c.n_bins, dtype=dtype)
        self._pe_seq: dict[int, np.ndarray] = {}

    # -- parameters ---------------------------------------------------------

    def named_params(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for i, blk in enumerate(self.epoch_blocks):
            out.update(blk.named(f"epoch.{i}"))
        for i, blk in enumerate(self.seq_blocks):
            out.update(blk.named(f"seq.{i}"))
        out["pool.w_a"] = self.w_a
        out["pool.b_a"] = self.b_a
        out["pool.a_e"] = self.a_e
        out["head.fc1.w"] = self.fc1_w
        out["head.fc1.b"] = self.fc1_b
        out["head.fc2.w"] = self.fc2_w
        out["head.fc2.b"] = self.fc2_b
        out["head.out.w"] = self.out_w
        out["head.out.b"] = self.out_b
        return out

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        params = self.named_params()
        if set(state) != set(params):
            missing = set(params) - set(state)
            extra = set(state) - set(params)
            raise UsageError(f"checkpoint mismatch: missing={sorted(missing)}, "
                             f"extra={sorted(extra)}")
        for name, p in params.items():
            if state[name].shape != p.data.shape:
                raise UsageError(f"shape mismatch for {name}: checkpoint "
                                 f"{state[name].shape} vs model {p.data.shape}")
            p.data = state[name].astype(self.dtype, copy=True)
            p.grad = None

    def save(self, path) -> None:
        path = Path(path)
        T.save_params(path, self.named_params())
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(asdict(self.config), indent=2))

    @classmethod
    def load(cls, path, dtype=np.float32) -> "SleepModel":
        path = Path(path)
        cfg = ModelConfig.from_dict(
            json.loads(path.with_suffix(path.suffix + ".json").read_text()))
        model = cls(cfg, np.random.default_rng(0), dtype=dtype)
        state = T.load_params(path)
        model.load_state({k: v.astype(dtype) for k, v in state.items()})
        return model

    # -- forward ------------------------------------------------------------

    def _pe_for(self, l: int) -> np.ndarray:
        if l not in self._pe_seq:
            self._pe_seq[l] = positional_encoding(l, self.config.n_bins,
                                                  dtype=self.dtype)
        return self._pe_seq[l]

    def _epoch_stack(self, x: Tensor, train, rng):
        """(..., T, F) -> pooled (..., F), per-layer scores, alphas (..., T)."""
        z = T.add(x, Tensor(self._pe_epoch))
        layer_scores = []
        for blk in self.epoch_blocks:
            z, scores = encoder_block(z, blk, train=train, rng=rng)
            layer_scores.append(scores)
        a = T.tanh(T.add(T.matmul(z, self.w_a), self.b_a))      # (..., T, A)
        logits = T.matmul(a, self.a_e)                          # (..., T, 1)
        lead = logits.data.shape[:-2]
        alphas = T.softmax_rows(T.reshape(logits, lead + (self.config.n_frames,)))
        pooled = T.matmul(T.reshape(alphas, lead + (1, self.config.n_frames)), z)
        pooled = T.reshape(pooled, lead + (self.config.n_bins,))
        return pooled, layer_scores, alphas.data.copy()

    def encode_epoch(self, spec: Spectrogram, train: bool = False,
                     rng: np.random.Generator | None = None):
        """One normalized spectrogram -> (feature vector, records, alphas)."""
        if not spec.normalization_applied:
            raise UsageError("encode_epoch requires a normalized spectrogram")
        x = Tensor(spec.values.astype(self.dtype))
        pooled, layer_scores, alphas = self._epoch_stack(x, train, rng)
        records = [AttentionRecord(scores=s, layer_index=i, level="epoch")
                   for i, s in enumerate(layer_scores)]
        return pooled.data.copy(), records, alphas

    def forward(self, seqs: np.ndarray, train: bool = False,
                rng: np.random.Generator | None = None) -> ForwardResult:
        """seqs: (B, L, T, F) normalized spectrogram values."""
        c = self.config
        seqs = np.asarray(seqs, dtype=self.dtype)
        if seqs.ndim != 4 or seqs.shape[2:] != (c.n_frames, c.n_bins):
            raise UsageError(f"expected (B, L, {c.n_frames}, {c.n_bins}), "
                             f"got {seqs.shape}")
        b, l = seqs.shape[:2]
        if l != c.seq_len:
            raise UsageError(f"sequence length {l} does not match config "
                             f"seq_len {c.seq_len}")
        flat = Tensor(seqs.reshape(b * l, c.n_frames, c.n_bins))
        pooled, epoch_layer_scores, alphas = self._epoch_stack(flat, train, rng)
        x = T.reshape(pooled, (b, l, c.n_bins))
        z = T.add(x, Tensor(self._pe_for(l)))
        seq_scores = []
        for blk in self.seq_blocks:
            z, scores = encoder_block(z, blk, train=train, rng=rng)
            seq_scores.append(scores)
        h = T.relu(T.add(T.matmul(z, self.fc1_w), self.fc1_b))
        if train and c.dropout > 0:
            h = T.dropout(h, c.dropout, rng=rng, train=True)
        h = T.relu(T.add(T.matmul(h, self.fc2_w), self.fc2_b))
        if train and c.dropout > 0:
            h = T.dropout(h, c.dropout, rng=rng, train=True)
        probs = T.softmax_rows(T.add(T.matmul(h, self.out_w), self.out_b))
        return ForwardResult(
            probs=probs,
            epoch_scores=[s.reshape(b, l, *s.shape[1:]) for s in epoch_layer_scores],
            seq_scores=seq_scores,
            alphas=alphas.reshape(b, l, c.n_frames),
        )

    def predict(self, seqs: np.ndarray) -> ForwardResult:
        """Inference fast path: no graph construction, dropout off."""
        with T.no_grad():
            return self.forward(seqs, train=False)


def sequence_loss(probs: Tensor, labels_onehot: np.ndarray) -> Tensor:
    """Mean cross-entropy over every epoch of every sequence in the batch."""
    y = np.asarray(labels_onehot, dtype=probs.data.dtype)
    if y.shape != probs.data.shape:
        raise UsageError(f"labels shape {y.shape} does not match probs "
                         f"{probs.data.shape}")
    # y is one-hot, so summing after the mask picks the true-class log-prob
    return T.scale(T.tsum(T.mul(T.log(probs + LOSS_PROB_FLOOR), Tensor(y))),
                   -1.0 / (y.shape[0] * y.shape[1]))


def one_hot(labels: np.ndarray, n_classes: int = 5) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros(labels.shape + (n_classes,), dtype=np.float32)
    valid = (labels >= 0) & (labels < n_classes)
    idx = np.nonzero(valid)
    out[idx + (labels[valid],)] = 1.0
    return out
