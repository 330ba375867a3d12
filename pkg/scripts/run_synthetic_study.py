#!/usr/bin/env python3
"""Full synthetic study: generate recordings, extract features, train,
score the held-out split, and report accuracy plus triage behavior.

Usage: python3 scripts/run_synthetic_study.py --out /tmp/study [--seed 0]
"""

import argparse
import json
from pathlib import Path

from somnus.cli import (run_evaluate, run_extract, run_score, run_synth,
                        run_train, run_triage)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--train-recordings", type=int, default=40)
    parser.add_argument("--val-recordings", type=int, default=10)
    parser.add_argument("--test-recordings", type=int, default=10)
    parser.add_argument("--epochs-per-recording", type=int, default=96)
    parser.add_argument("--epoch-layers", type=int, default=2)
    parser.add_argument("--sequence-layers", type=int, default=2)
    parser.add_argument("--max-steps", type=int, default=600)
    args = parser.parse_args()

    out = args.out
    run_synth(out / "raw", args.seed, args.train_recordings,
              args.val_recordings, args.test_recordings,
              args.epochs_per_recording)
    run_extract(out / "raw" / "manifest.json", out / "feat")
    overrides = {"set": [
        ("model", "n_epoch_blocks", args.epoch_layers),
        ("model", "n_seq_blocks", args.sequence_layers),
        ("train", "validate_every", 25), ("train", "patience", 10),
        ("train", "max_steps", args.max_steps),
        ("train", "seed", args.seed),
    ]}
    summary = run_train(out / "feat" / "manifest.json", None,
                        out / "run", overrides)
    print(f"trained {summary['steps']} steps, "
          f"best val accuracy {summary['best_val_accuracy']:.3f}")
    run_score(out / "run" / "model.ckpt", out / "feat" / "manifest.json",
              out / "scored")
    report = run_evaluate(out / "scored", out / "eval.json")
    print(f"test accuracy {report['accuracy']:.3f}  "
          f"kappa {report['kappa']:.3f}  macro-F1 {report['macro_f1']:.3f}")
    for threshold in (0.4, 0.5, 0.6):
        t = run_triage(out / "scored", None,
                       out / f"triage_{threshold}.json",
                       {"set": [("triage", "threshold", threshold)]})
        print(f"threshold {threshold}: confident {t['n_confident']} "
              f"(acc {t['accuracy_confident']}), deferred {t['n_deferred']} "
              f"(acc {t['accuracy_deferred']})")
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
