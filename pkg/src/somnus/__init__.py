"""Sequence-to-sequence sleep staging with confidence-based triage and
attention-score interpretability."""

from .errors import (ConfigError, DataError, InternalError, NumericError,
                     ShapeError, SomnusError, UsageError)
from .features import (EXCLUDED_CODE, STAGE_NAMES, NormStats, RawEpoch,
                       Spectrogram, istft, normalize, reconstruct, stft_epoch)
from .interpret import (ScoredEpoch, TriageConfig, attended_eeg, confidence,
                        epoch_heatmap, flag_transitioning, influence_rows,
                        triage)
from .metrics import EvalReport, evaluate
from .model import ModelConfig, SleepModel, sequence_loss
from .tensor import Tensor, no_grad
from .training import TrainConfig, fuse_predictions, predicted_stages, train

__all__ = [
    "ConfigError", "DataError", "InternalError", "NumericError", "ShapeError",
    "SomnusError", "UsageError",
    "EXCLUDED_CODE", "STAGE_NAMES", "NormStats", "RawEpoch", "Spectrogram",
    "istft", "normalize", "reconstruct", "stft_epoch",
    "ScoredEpoch", "TriageConfig", "attended_eeg", "confidence",
    "epoch_heatmap", "flag_transitioning", "influence_rows", "triage",
    "EvalReport", "evaluate",
    "ModelConfig", "SleepModel", "sequence_loss",
    "Tensor", "no_grad",
    "TrainConfig", "fuse_predictions", "predicted_stages", "train",
]

__version__ = "0.1.0"
