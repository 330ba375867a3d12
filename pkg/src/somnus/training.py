"""Adam optimization of the sequence loss, validation-driven early stopping,
and fusion of overlapping window predictions."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import EpochSequence
from .errors import ConfigError, InternalError
from .model import SleepModel, one_hot, sequence_loss
from .tensor import Tensor

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7
    batch_size: int = 32
    validate_every: int = 100
    patience: int = 200            # validation steps without improvement
    min_validation_steps: int = 0  # 5000 for the large-database profile
    max_steps: int | None = None
    grad_clip: float | None = None  # optional global-norm clip, off by default
    seed: int = 0

    def validate(self) -> None:
        for name in ("lr", "beta1", "beta2", "epsilon", "batch_size",
                     "validate_every"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown train config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


class Adam:
    """Standard Adam with bias correction, acting on named parameter tensors."""

    def __init__(self, params: dict[str, Tensor], config: TrainConfig):
        self.params = params
        self.config = config
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self) -> None:
        cfg = self.config
        self.t += 1
        if cfg.grad_clip is not None:
            total = np.sqrt(sum(float((p.grad ** 2).sum())
                                for p in self.params.values()
                                if p.grad is not None))
            if total > cfg.grad_clip:
                factor = cfg.grad_clip / total
                for p in self.params.values():
                    if p.grad is not None:
                        p.grad = p.grad * factor
        bc1 = 1.0 - cfg.beta1 ** self.t
        bc2 = 1.0 - cfg.beta2 ** self.t
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                g = np.zeros_like(p.data)
            if g.shape != p.data.shape:
                raise InternalError(f"gradient shape mismatch for {name}")
            m = self.m[name]
            v = self.v[name]
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * g * g
            m_hat = m / bc1
            v_hat = v / bc2
            p.data = p.data - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
            p.grad = None


@dataclass
class TrainLogEntry:
    step: int
    train_loss: float
    val_accuracy: float


@dataclass
class TrainResult:
    best_state: dict[str, np.ndarray]
    best_val_accuracy: float
    log: list[TrainLogEntry] = field(default_factory=list)
    steps: int = 0

    def write_log(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["step", "train_loss", "val_accuracy"])
            for e in self.log:
                writer.writerow([e.step, f"{e.train_loss:.9g}",
                                 f"{e.val_accuracy:.9g}"])


def _stack(batch: list[EpochSequence]) -> tuple[np.ndarray, np.ndarray]:
    values = np.stack([s.values for s in batch])
    labels = np.stack([s.labels for s in batch])
    return values, labels


def sequence_accuracy(model: SleepModel, sequences: list[EpochSequence],
                      batch_size: int = 32) -> float:
    correct = 0
    total = 0
    from .features import EXCLUDED_CODE
    for i in range(0, len(sequences), batch_size):
        values, labels = _stack(sequences[i:i + batch_size])
        probs = model.predict(values).probs.data
        pred = probs.argmax(axis=-1)
        keep = labels != EXCLUDED_CODE
        correct += int((pred[keep] == labels[keep]).sum())
        total += int(keep.sum())
    return correct / total if total else 0.0


def train(model: SleepModel, train_seqs: list[EpochSequence],
          val_seqs: list[EpochSequence], config: TrainConfig,
          progress: bool = False) -> TrainResult:
    """Shuffled minibatch Adam with periodic validation and early stopping.

    The checkpoint with the best validation accuracy is retained; training
    stops once `patience` validation steps pass without improvement (but
    not before `min_validation_steps` validations).
    """
    config.validate()
    if not train_seqs:
        raise ConfigError("empty training set")
    rng = np.random.default_rng(config.seed)
    optimizer = Adam(model.named_params(), config)
    best_acc = -1.0
    best_state = {k: p.data.copy() for k, p in model.named_params().items()}
    since_improvement = 0
    validations = 0
    result = TrainResult(best_state=best_state, best_val_accuracy=0.0)

    step = 0
    stop = False
    while not stop:
        order = rng.permutation(len(train_seqs))
        for i in range(0, len(order), config.batch_size):
            batch = [train_seqs[j] for j in order[i:i + config.batch_size]]
            values, labels = _stack(batch)
            out = model.forward(values, train=True, rng=rng)
            loss = sequence_loss(out.probs, one_hot(labels, model.config.n_classes))
            loss_value = float(loss.data)
            loss.backward()
            optimizer.step()
            step += 1

            if step % config.validate_every == 0:
                val_acc = sequence_accuracy(model, val_seqs, config.batch_size) \
                    if val_seqs else 0.0
                validations += 1
                result.log.append(TrainLogEntry(step, loss_value, val_acc))
                if progress:
                    log.info("step %d loss %.4f val_acc %.4f", step, loss_value,
                             val_acc)
                if val_acc > best_acc:
                    best_acc = val_acc
                    best_state = {k: p.data.copy()
                                  for k, p in model.named_params().items()}
                    since_improvement = 0
                else:
                    since_improvement += 1
                if (since_improvement >= config.patience
                        and validations >= config.min_validation_steps):
                    stop = True
                    break
            if config.max_steps is not None and step >= config.max_steps:
                stop = True
                break

    result.best_state = best_state
    result.best_val_accuracy = max(best_acc, 0.0)
    result.steps = step
    model.load_state(best_state)
    return result


def fuse_predictions(window_outputs: list[tuple[int, np.ndarray]],
                     n_epochs: int) -> np.ndarray:
    """Average overlapping per-window probabilities into per-epoch vectors.

    window_outputs: (start_epoch_index, probs (L, C)) pairs covering the
    recording. Returns (n_epochs, C) renormalized probability rows.
    """
    if not window_outputs:
        raise InternalError("no window outputs to fuse")
    n_classes = window_outputs[0][1].shape[-1]
    acc = np.zeros((n_epochs, n_classes))
    count = np.zeros(n_epochs)
    for start, probs in window_outputs:
        l = probs.shape[0]
        acc[start:start + l] += probs
        count[start:start + l] += 1
    if (count == 0).any():
        missing = np.nonzero(count == 0)[0]
        raise InternalError(f"epochs not covered by any window: {missing[:5]}")
    fused = acc / count[:, None]
    return fused / fused.sum(axis=1, keepdims=True)


def predicted_stages(fused_probs: np.ndarray) -> np.ndarray:
    """Argmax per epoch; ties break toward the lower stage code."""
    return fused_probs.argmax(axis=1)
