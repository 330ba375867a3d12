"""Log-spectrogram extraction from 30-second EEG epochs and ISTFT reconstruction.

A 3000-sample epoch (30 s at 100 Hz) is cut into 29 two-second frames with
50% overlap, Hamming-windowed, zero-padded to 256 points and transformed.
The DC bin is dropped from the magnitude image (keeping 128 bins) but its
phase is retained so the time-domain signal can be rebuilt.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError

EPOCH_SAMPLES = 3000
SAMPLE_RATE = 100
FRAME_LEN = 200
HOP = 100
NFFT = 256
N_FRAMES = 29          # (3000 - 200) / 100 + 1
N_BINS = 128           # one-sided bins minus the dropped DC bin
N_BINS_FULL = 129
LOG_FLOOR = 1e-12      # amplitude floor before the log transform
STD_FLOOR = 1e-8

STAGE_NAMES = ("W", "N1", "N2", "N3", "REM")
EXCLUDED_CODE = 255

_window = np.hamming(FRAME_LEN)  # symmetric 0.54 - 0.46 cos


@dataclass
class RawEpoch:
    """One 30-second single-channel EEG epoch (microvolts at 100 Hz)."""

    samples: np.ndarray
    channel: str = ""
    epoch_index: int = 0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.shape != (EPOCH_SAMPLES,):
            raise DataError(f"epoch must have {EPOCH_SAMPLES} samples, "
                            f"got shape {self.samples.shape}")
        if not np.isfinite(self.samples).all():
            raise DataError("epoch contains non-finite samples")


@dataclass
class Spectrogram:
    """T x F log-amplitude image plus the full-band phase kept for reconstruction."""

    values: np.ndarray                 # (29, 128) log amplitudes
    phase: np.ndarray                  # (29, 129) complex unit phases, DC included
    normalization_applied: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.phase = np.asarray(self.phase, dtype=np.complex128)
        if self.values.shape != (N_FRAMES, N_BINS):
            raise DataError(f"spectrogram values must be {N_FRAMES}x{N_BINS}, "
                            f"got {self.values.shape}")
        if self.phase.shape != (N_FRAMES, N_BINS_FULL):
            raise DataError(f"spectrogram phase must be {N_FRAMES}x{N_BINS_FULL}, "
                            f"got {self.phase.shape}")


@dataclass
class NormStats:
    """Per-frequency-bin normalization parameters, training split only."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.maximum(np.asarray(self.std, dtype=np.float64), STD_FLOOR)
        if self.mean.shape != (N_BINS,) or self.std.shape != (N_BINS,):
            raise DataError("norm stats must be per-frequency vectors of length "
                            f"{N_BINS}")

    @classmethod
    def from_values(cls, stacked_values: np.ndarray) -> "NormStats":
        """Fit from an (n_epochs*T, F) or (n_epochs, T, F) stack of raw log values."""
        flat = np.asarray(stacked_values, dtype=np.float64).reshape(-1, N_BINS)
        return cls(mean=flat.mean(axis=0), std=flat.std(axis=0))


def stft_epoch(epoch: RawEpoch) -> Spectrogram:
    """Extract the 29x128 log-amplitude spectrogram of one epoch."""
    x = epoch.samples
    starts = np.arange(N_FRAMES) * HOP
    frames = np.stack([x[s:s + FRAME_LEN] * _window for s in starts])
    spec = np.fft.rfft(frames, n=NFFT, axis=-1)        # (29, 129)
    amplitude = np.abs(spec)
    values = np.log(amplitude[:, 1:] + LOG_FLOOR)      # DC bin dropped
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.where(amplitude > 0, spec / np.maximum(amplitude, LOG_FLOOR), 1.0)
    return Spectrogram(values=values, phase=phase)


def normalize(spec: Spectrogram, stats: NormStats) -> Spectrogram:
    if spec.normalization_applied:
        raise UsageError("spectrogram already normalized")
    values = (spec.values - stats.mean) / stats.std
    return Spectrogram(values=values, phase=spec.phase, normalization_applied=True)


def denormalize(spec: Spectrogram, stats: NormStats) -> Spectrogram:
    if not spec.normalization_applied:
        raise UsageError("spectrogram is not normalized")
    values = spec.values * stats.std + stats.mean
    return Spectrogram(values=values, phase=spec.phase, normalization_applied=False)


def magnitude_from_values(values: np.ndarray) -> np.ndarray:
    """Invert the log transform and restore the DC column (as zeros).

    Input values must be raw (de-normalized) log amplitudes; returns
    a (29, 129) linear magnitude matrix.
    """
    mag = np.exp(np.asarray(values, dtype=np.float64)) - LOG_FLOOR
    mag = np.maximum(mag, 0.0)
    full = np.zeros((N_FRAMES, N_BINS_FULL))
    full[:, 1:] = mag
    return full


def istft(magnitude: np.ndarray, phase: np.ndarray) -> np.ndarray:
    """Weighted overlap-add reconstruction of the 3000-sample signal.

    magnitude: (29, 129) linear one-sided magnitudes (DC included, normally 0);
    phase: (29, 129) complex unit phases captured at analysis time.
    """
    magnitude = np.asarray(magnitude, dtype=np.float64)
    phase = np.asarray(phase, dtype=np.complex128)
    if phase.shape != (N_FRAMES, N_BINS_FULL):
        raise UsageError(f"phase must be {N_FRAMES}x{N_BINS_FULL}, got {phase.shape}")
    if magnitude.shape != (N_FRAMES, N_BINS_FULL):
        raise UsageError(f"magnitude must be {N_FRAMES}x{N_BINS_FULL}, "
                         f"got {magnitude.shape}")
    frames = np.fft.irfft(magnitude * phase, n=NFFT, axis=-1)[:, :FRAME_LEN]
    out = np.zeros(EPOCH_SAMPLES)
    wsum = np.zeros(EPOCH_SAMPLES)
    for t in range(N_FRAMES):
        s = t * HOP
        out[s:s + FRAME_LEN] += frames[t] * _window
        wsum[s:s + FRAME_LEN] += _window * _window
    good = wsum >= 1e-8
    out[good] /= wsum[good]
    out[~good] = 0.0
    return out


def reconstruct(spec: Spectrogram, stats: NormStats | None = None) -> np.ndarray:
    """Convenience roundtrip: undo normalization and log, then ISTFT."""
    values = spec.values
    if spec.normalization_applied:
        if stats is None:
            raise UsageError("normalized spectrogram needs stats to reconstruct")
        values = values * stats.std + stats.mean
    return istft(magnitude_from_values(values), spec.phase)


# -- feature file format ----------------------------------------------------

_FEAT_MAGIC = b"SOMNUSFT"
_FEAT_VERSION = 1


def write_feature_file(path, spectrograms: list[Spectrogram],
                       labels: np.ndarray) -> None:
    """One recording: header, then per epoch values, phase (cos,sin), stage byte."""
    labels = np.asarray(labels, dtype=np.uint8)
    if len(labels) != len(spectrograms):
        raise DataError("label count does not match spectrogram count")
    with open(path, "wb") as f:
        f.write(_FEAT_MAGIC)
        f.write(struct.pack("<HIHH", _FEAT_VERSION, len(spectrograms), N_FRAMES, N_BINS))
        for spec, label in zip(spectrograms, labels):
            f.write(spec.values.astype("<f4").tobytes())
            interleaved = np.empty((N_FRAMES, N_BINS_FULL, 2), dtype="<f4")
            interleaved[..., 0] = spec.phase.real
            interleaved[..., 1] = spec.phase.imag
            f.write(interleaved.tobytes())
            f.write(struct.pack("<B", int(label)))


def read_feature_file(path) -> tuple[list[Spectrogram], np.ndarray]:
    with open(path, "rb") as f:
        magic = f.read(len(_FEAT_MAGIC))
        if magic != _FEAT_MAGIC:
            raise DataError(f"not a feature file: {path}")
        version, n_epochs, t, fbins = struct.unpack("<HIHH", f.read(10))
        if version != _FEAT_VERSION:
            raise DataError(f"unsupported feature file version {version}")
        if (t, fbins) != (N_FRAMES, N_BINS):
            raise DataError(f"unexpected feature geometry {t}x{fbins}")
        specs: list[Spectrogram] = []
        labels = np.empty(n_epochs, dtype=np.uint8)
        val_bytes = N_FRAMES * N_BINS * 4
        ph_bytes = N_FRAMES * N_BINS_FULL * 2 * 4
        for i in range(n_epochs):
            values = np.frombuffer(f.read(val_bytes), dtype="<f4").reshape(N_FRAMES, N_BINS)
            ph = np.frombuffer(f.read(ph_bytes), dtype="<f4").reshape(N_FRAMES, N_BINS_FULL, 2)
            phase = ph[..., 0].astype(np.float64) + 1j * ph[..., 1].astype(np.float64)
            labels[i] = struct.unpack("<B", f.read(1))[0]
            specs.append(Spectrogram(values=values.astype(np.float64), phase=phase))
    return specs, labels
