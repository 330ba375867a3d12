"""Transformer encoder block: multi-head self-attention, residuals with
layer norm, position-wise feed-forward; plus sinusoidal positional encoding.

All functions accept stacked inputs (..., l, d) so a whole batch of
sequences is one graph node per operation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import ConfigError
from .tensor import Tensor

LN_EPS = 1e-5


@dataclass
class AttentionRecord:
    """Post-softmax attention scores of one block: (..., H, l, l), detached."""

    scores: np.ndarray
    layer_index: int = 0
    level: str = "epoch"  # "epoch" | "sequence"


@dataclass
class EncoderBlockParams:
    n_heads: int
    d: int
    d_ff: int
    wq: list[Tensor]        # per head, (d, d/H)
    wk: list[Tensor]
    wv: list[Tensor]
    wz: Tensor              # (d, d)
    w1: Tensor              # (d, d_ff)
    b1: Tensor
    w2: Tensor              # (d_ff, d)
    b2: Tensor
    ln1_gain: Tensor
    ln1_bias: Tensor
    ln2_gain: Tensor
    ln2_bias: Tensor
    dropout: float = 0.1
    scale_per_head: bool = False

    def named(self, prefix: str) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for i in range(self.n_heads):
            out[f"{prefix}.head{i}.wq"] = self.wq[i]
            out[f"{prefix}.head{i}.wk"] = self.wk[i]
            out[f"{prefix}.head{i}.wv"] = self.wv[i]
        out[f"{prefix}.wz"] = self.wz
        out[f"{prefix}.ffn.w1"] = self.w1
        out[f"{prefix}.ffn.b1"] = self.b1
        out[f"{prefix}.ffn.w2"] = self.w2
        out[f"{prefix}.ffn.b2"] = self.b2
        out[f"{prefix}.ln1.gain"] = self.ln1_gain
        out[f"{prefix}.ln1.bias"] = self.ln1_bias
        out[f"{prefix}.ln2.gain"] = self.ln2_gain
        out[f"{prefix}.ln2.bias"] = self.ln2_bias
        return out


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int,
                   shape=None, dtype=np.float32) -> Tensor:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    shape = shape if shape is not None else (fan_in, fan_out)
    return Tensor(rng.uniform(-limit, limit, size=shape).astype(dtype), requires_grad=True)


def init_encoder_block(d: int, n_heads: int, d_ff: int, rng: np.random.Generator,
                       dropout: float = 0.1, scale_per_head: bool = False,
                       dtype=np.float32) -> EncoderBlockParams:
    if d % n_heads != 0:
        raise ConfigError(f"model width {d} not divisible by head count {n_heads}")
    dh = d // n_heads
    mk = lambda fi, fo: glorot_uniform(rng, fi, fo, dtype=dtype)
    zeros = lambda n: Tensor(np.zeros(n, dtype=dtype), requires_grad=True)
    ones = lambda n: Tensor(np.ones(n, dtype=dtype), requires_grad=True)
    return EncoderBlockParams(
        n_heads=n_heads, d=d, d_ff=d_ff,
        wq=[mk(d, dh) for _ in range(n_heads)],
        wk=[mk(d, dh) for _ in range(n_heads)],
        wv=[mk(d, dh) for _ in range(n_heads)],
        wz=mk(d, d),
        w1=mk(d, d_ff), b1=zeros(d_ff),
        w2=mk(d_ff, d), b2=zeros(d),
        ln1_gain=ones(d), ln1_bias=zeros(d),
        ln2_gain=ones(d), ln2_bias=zeros(d),
        dropout=dropout, scale_per_head=scale_per_head,
    )


def positional_encoding(l: int, d: int, dtype=np.float32) -> np.ndarray:
    """Sinusoidal position matrix: p[i, 2j] = sin(i / 10000^(2j/d)), cos for odd."""
    if d % 2 != 0:
        raise ConfigError(f"positional encoding width must be even, got {d}")
    pos = np.arange(l)[:, None].astype(np.float64)
    j2 = np.arange(0, d, 2).astype(np.float64)
    angle = pos / np.power(10000.0, j2 / d)
    p = np.empty((l, d), dtype=np.float64)
    p[:, 0::2] = np.sin(angle)
    p[:, 1::2] = np.cos(angle)
    return p.astype(dtype)


def multi_head_attention(z: Tensor, params: EncoderBlockParams,
                         train: bool = False,
                         rng: np.random.Generator | None = None
                         ) -> tuple[Tensor, np.ndarray]:
    """Scaled dot-product attention over the last two axes of z (..., l, d).

    Returns the attentive output and the per-head post-softmax score
    stack (..., H, l, l); the record is detached from gradient flow.
    """
    scale_dim = params.d // params.n_heads if params.scale_per_head else params.d
    inv_scale = 1.0 / np.sqrt(scale_dim)
    heads = []
    scores = []
    for i in range(params.n_heads):
        q = T.matmul(z, params.wq[i])
        k = T.matmul(z, params.wk[i])
        v = T.matmul(z, params.wv[i])
        logits = T.scale(T.matmul(q, T.transpose(k)), inv_scale)
        a = T.softmax_rows(logits)
        scores.append(a.data.copy())
        if train and params.dropout > 0:
            a = T.dropout(a, params.dropout, rng=rng, train=True)
        heads.append(T.matmul(a, v))
    z_attn = T.matmul(T.concat_last_dim(heads), params.wz)
    return z_attn, np.stack(scores, axis=-3)


def encoder_block(z: Tensor, params: EncoderBlockParams, train: bool = False,
                  rng: np.random.Generator | None = None
                  ) -> tuple[Tensor, np.ndarray]:
    """One full encoder block; returns output (..., l, d) and attention scores."""
    z_attn, scores = multi_head_attention(z, params, train=train, rng=rng)
    if train and params.dropout > 0:
        z_attn = T.dropout(z_attn, params.dropout, rng=rng, train=True)
    z_mid = T.layer_norm(T.add(z, z_attn), params.ln1_gain, params.ln1_bias, eps=LN_EPS)
    hidden = T.relu(T.add(T.matmul(z_mid, params.w1), params.b1))
    z_ff = T.add(T.matmul(hidden, params.w2), params.b2)
    if train and params.dropout > 0:
        z_ff = T.dropout(z_ff, params.dropout, rng=rng, train=True)
    out = T.layer_norm(T.add(z_mid, z_ff), params.ln2_gain, params.ln2_bias, eps=LN_EPS)
    return out, scores
