"""Entropy-based confidence, low-confidence triage, and the two
attention-score interpretability exports (frame heat map, epoch influence),
plus the review-bundle JSON consumed by the expert workbench."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, UsageError
from .features import (EXCLUDED_CODE, NormStats, Spectrogram, istft,
                       magnitude_from_values)

REVIEW_SCHEMA_VERSION = 1


@dataclass
class TriageConfig:
    mode: str = "threshold"      # "threshold" | "percentile"
    threshold: float = 0.5
    percentile: float = 20.0

    def validate(self) -> None:
        if self.mode not in ("threshold", "percentile"):
            raise ConfigError(f"unknown triage mode {self.mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("triage threshold must be in [0, 1]")
        if not 0.0 < self.percentile < 100.0:
            raise ConfigError("triage percentile must be in (0, 100)")

    @classmethod
    def from_dict(cls, d: dict) -> "TriageConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown triage config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass
class ScoredEpoch:
    """Per-epoch scoring result with optional interpretability payloads."""

    epoch_index: int
    probs: np.ndarray                       # (C,)
    predicted_stage: int
    confidence: float
    triaged: bool = False
    transitioning: bool = False
    true_stage: int | None = None
    heatmap: np.ndarray | None = None       # (T,) in [0, 1]
    heatmap_degenerate: bool = False
    influence: np.ndarray | None = None     # (L,) sums to 1
    influence_offset: int = 0               # window start epoch of the row
    attended_eeg: np.ndarray | None = None  # (3000,)
    raw_eeg: np.ndarray | None = None


def confidence(probs: np.ndarray, method: str = "entropy") -> float:
    """1 minus the normalized Shannon entropy of the class distribution.

    `method="max_prob"` switches to the plain maximum probability; kept as
    a hook only, the entropy form is the default everywhere.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-6:
        raise DataError(f"not a probability distribution: {probs}")
    if method == "max_prob":
        return float(probs.max())
    if method != "entropy":
        raise ConfigError(f"unknown confidence method {method!r}")
    c = len(probs)
    terms = np.where(probs > 0, probs * np.log(np.where(probs > 0, probs, 1.0)), 0.0)
    entropy = -terms.sum() / np.log(c)
    # rounding can push the result a few ulp outside [0, 1]
    return float(np.clip(1.0 - entropy, 0.0, 1.0))


def triage(scored: list[ScoredEpoch], cfg: TriageConfig
           ) -> tuple[list[ScoredEpoch], list[ScoredEpoch]]:
    """Partition epochs into the confident set A and the deferred set A-bar.

    Threshold mode defers epochs with confidence < threshold; percentile
    mode defers the floor(p% * n) lowest-confidence epochs with stable
    tie-breaking by epoch index. Sets the `triaged` flag in place.
    """
    cfg.validate()
    if cfg.mode == "threshold":
        deferred = {id(s) for s in scored if s.confidence < cfg.threshold}
    else:
        k = int(np.floor(cfg.percentile / 100.0 * len(scored)))
        ranked = sorted(scored, key=lambda s: (s.confidence, s.epoch_index))
        deferred = {id(s) for s in ranked[:k]}
    confident, low = [], []
    for s in scored:
        s.triaged = id(s) in deferred
        (low if s.triaged else confident).append(s)
    return confident, low


def flag_transitioning(hypnogram: np.ndarray) -> np.ndarray:
    """Epoch i is transitioning iff its stage differs from either neighbor."""
    stages = np.asarray(hypnogram)
    n = len(stages)
    flags = np.zeros(n, dtype=bool)
    if n < 2:
        return flags
    flags[:-1] |= stages[:-1] != stages[1:]
    flags[1:] |= stages[1:] != stages[:-1]
    return flags


def _head_summed(scores: np.ndarray) -> np.ndarray:
    """(H, l, l) attention stack -> head-summed (l, l) matrix."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 3:
        raise UsageError(f"expected (H, l, l) scores, got {scores.shape}")
    return scores.sum(axis=0)


def epoch_heatmap(layer_scores: np.ndarray, aggregate: str = "sum"
                  ) -> tuple[np.ndarray, bool]:
    """Frame-level attention heat map from one epoch-encoder layer.

    Sums the head matrices (or averages, if `aggregate` is "mean"), sums
    the result over the first dimension and min-max normalizes to [0, 1].
    A constant profile returns zeros plus a degenerate flag.
    """
    summed = _head_summed(layer_scores)
    if aggregate == "mean":
        summed = summed / layer_scores.shape[0]
    elif aggregate != "sum":
        raise ConfigError(f"unknown head aggregate {aggregate!r}")
    profile = summed.sum(axis=0)
    lo, hi = profile.min(), profile.max()
    if hi - lo < 1e-12:
        return np.zeros_like(profile), True
    return (profile - lo) / (hi - lo), False


def heatmap_to_samples(heatmap: np.ndarray, n_samples: int = 3000,
                       frame_len: int = 200, hop: int = 100) -> np.ndarray:
    """Spread frame weights over the raw signal with linear cross-fades.

    Each frame weight covers its hop span; overlapping spans blend by
    normalized linear fade so the overlay is continuous.
    """
    heatmap = np.asarray(heatmap, dtype=np.float64)
    out = np.zeros(n_samples)
    wsum = np.zeros(n_samples)
    ramp = np.minimum(np.arange(1, frame_len + 1),
                      np.arange(frame_len, 0, -1)).astype(np.float64)
    for t, weight in enumerate(heatmap):
        s = t * hop
        e = min(s + frame_len, n_samples)
        out[s:e] += weight * ramp[:e - s]
        wsum[s:e] += ramp[:e - s]
    good = wsum > 0
    out[good] /= wsum[good]
    return out


def attended_eeg(spec: Spectrogram, layer_scores: list[np.ndarray],
                 stats: NormStats | None = None) -> np.ndarray:
    """Linear attention transform of the magnitude image, then ISTFT.

    Each layer's head-summed attention matrix is row-renormalized and
    applied from the left, mixing time frames; all nonlinear model
    operations are omitted. Reconstruction uses the original phase.
    """
    values = spec.values
    if spec.normalization_applied:
        if stats is None:
            raise UsageError("normalized spectrogram needs stats")
        values = values * stats.std + stats.mean
    magnitude = magnitude_from_values(values)          # (T, 129), DC zeroed
    for scores in layer_scores:
        mix = _head_summed(scores)
        mix = mix / mix.sum(axis=1, keepdims=True)
        magnitude = mix @ magnitude
    return istft(magnitude, spec.phase)


def influence_rows(layer_scores: np.ndarray) -> np.ndarray:
    """Sequence-level influence matrix: head-summed, rows renormalized to 1.

    Row i gives how much each context epoch contributes to epoch i.
    """
    summed = _head_summed(layer_scores)
    return summed / summed.sum(axis=1, keepdims=True)


# -- review bundle ----------------------------------------------------------

def _round(x, digits=9):
    return [float(f"{v:.{digits}g}") for v in np.asarray(x, dtype=np.float64)]


def write_review_bundle(path, recording_id: str, epochs: list[ScoredEpoch]
                        ) -> None:
    doc = {
        "schema_version": REVIEW_SCHEMA_VERSION,
        "recording_id": recording_id,
        "epochs": [],
    }
    for s in epochs:
        entry = {
            "index": s.epoch_index,
            "predicted_stage": int(s.predicted_stage),
            "probs": _round(s.probs),
            "confidence": float(f"{s.confidence:.9g}"),
            "triaged": bool(s.triaged),
            "transitioning": bool(s.transitioning),
        }
        if s.true_stage is not None and s.true_stage != EXCLUDED_CODE:
            entry["true_stage"] = int(s.true_stage)
        if s.heatmap is not None:
            entry["heatmap"] = _round(s.heatmap)
            entry["heatmap_degenerate"] = bool(s.heatmap_degenerate)
        if s.influence is not None:
            entry["influence"] = {"weights": _round(s.influence),
                                  "window_offset": int(s.influence_offset)}
        if s.attended_eeg is not None:
            entry["attended_eeg"] = _round(s.attended_eeg, 6)
        if s.raw_eeg is not None:
            entry["raw_eeg"] = _round(s.raw_eeg, 6)
        doc["epochs"].append(entry)
    Path(path).write_text(json.dumps(doc))


def read_review_bundle(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema_version") != REVIEW_SCHEMA_VERSION:
        raise DataError(f"unsupported review bundle schema: "
                        f"{doc.get('schema_version')}")
    return doc
