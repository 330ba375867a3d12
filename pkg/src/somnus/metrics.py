"""Evaluation metrics: accuracy, Cohen's kappa, macro F1, macro-averaged
one-vs-rest sensitivity and specificity, per-class F1, confusion matrix."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DataError
from .features import EXCLUDED_CODE, STAGE_NAMES


@dataclass
class EvalReport:
    accuracy: float
    kappa: float
    macro_f1: float
    mean_sensitivity: float
    mean_specificity: float
    class_f1: dict[str, float]
    confusion: list[list[int]]
    n_epochs: int = 0

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=2)
        if path is not None:
            with open(path, "w") as f:
                f.write(text)
        return text


def confusion_matrix(predictions, labels, n_classes: int = 5) -> np.ndarray:
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (labels, predictions), 1)
    return cm


def evaluate(predictions, labels, n_classes: int = 5) -> EvalReport:
    """Compare predicted stages to reference stages (excluded epochs masked)."""
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.shape != labels.shape:
        raise DataError(f"length mismatch: {predictions.shape} vs {labels.shape}")
    keep = labels != EXCLUDED_CODE
    predictions, labels = predictions[keep], labels[keep]
    if len(labels) == 0:
        raise DataError("no usable epochs to evaluate")

    cm = confusion_matrix(predictions, labels, n_classes)
    total = cm.sum()
    accuracy = np.trace(cm) / total

    # Cohen's kappa from the marginals
    p_o = accuracy
    p_e = float((cm.sum(axis=1) * cm.sum(axis=0)).sum()) / (total * total)
    kappa = 1.0 if p_e == 1.0 else (p_o - p_e) / (1.0 - p_e)

    f1s, sens, spec = [], [], []
    for c in range(n_classes):
        tp = cm[c, c]
        fn = cm[c, :].sum() - tp
        fp = cm[:, c].sum() - tp
        tn = total - tp - fn - fp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1s.append(2 * precision * recall / (precision + recall)
                   if precision + recall > 0 else 0.0)
        sens.append(recall)
        spec.append(tn / (tn + fp) if tn + fp > 0 else 0.0)

    names = STAGE_NAMES if n_classes == len(STAGE_NAMES) \
        else tuple(str(c) for c in range(n_classes))
    return EvalReport(
        accuracy=float(accuracy),
        kappa=float(kappa),
        macro_f1=float(np.mean(f1s)),
        mean_sensitivity=float(np.mean(sens)),
        mean_specificity=float(np.mean(spec)),
        class_f1={name: float(f) for name, f in zip(names, f1s)},
        confusion=cm.tolist(),
        n_epochs=int(total),
    )
