#!/usr/bin/env python3
"""Memorization sanity check: four synthetic 21-epoch sequences must reach
99% training accuracy within 2000 optimizer steps.

Usage: python3 scripts/overfit_smoke.py [--seed 6]
"""

import argparse
import time

import numpy as np

from somnus.model import ModelConfig, SleepModel, one_hot, sequence_loss
from somnus.training import Adam, TrainConfig

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from test_acceptance import _synthetic_sequences  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=6)
    args = parser.parse_args()

    cfg = ModelConfig(seq_len=21, n_epoch_blocks=2, n_seq_blocks=2,
                      n_heads=8, d_ff=256, dropout=0.0)
    values, labels = _synthetic_sequences(4, cfg.seq_len, seed=args.seed)
    x, y = np.stack(values), np.stack(labels)
    targets = one_hot(y, cfg.n_classes)
    model = SleepModel(cfg, np.random.default_rng(args.seed + 1),
                       dtype=np.float32)
    opt = Adam(model.named_params(), TrainConfig(lr=1e-4))
    start = time.time()
    for step in range(1, 2001):
        loss = sequence_loss(model.forward(x).probs, targets)
        loss.backward()
        opt.step()
        if step % 50 == 0:
            preds = model.predict(x).probs.data.argmax(axis=-1)
            accuracy = (preds == y).mean()
            print(f"step {step:4d}  loss {float(loss.data):.4f}  "
                  f"accuracy {accuracy:.3f}  ({time.time() - start:.1f}s)")
            if accuracy >= 0.99:
                print("reached 99% training accuracy")
                return
    raise SystemExit("failed to reach 99% training accuracy in 2000 steps")


if __name__ == "__main__":
    main()
