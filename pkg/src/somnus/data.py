"""Recording ingestion, stage label policy, windowing, splits, and the
synthetic desk-scale dataset generator."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .features import EPOCH_SAMPLES, EXCLUDED_CODE, STAGE_NAMES

log = logging.getLogger(__name__)

RAW_STAGES = ("W", "N1", "N2", "N3", "N4", "REM", "MOVEMENT", "UNKNOWN")
TRIM_MARGIN_EPOCHS = 60  # 30 minutes of 30-second epochs

_STAGE_MAP = {
    "W": 0, "N1": 1, "N2": 2, "N3": 3, "N4": 3, "REM": 4,
    "MOVEMENT": EXCLUDED_CODE, "UNKNOWN": EXCLUDED_CODE,
}


def map_stages(raw_codes) -> np.ndarray:
    """R&K-style codes -> 5-class codes; N4 merges into N3, artifacts excluded.

    Accepts raw string codes or already-mapped integers (idempotent).
    """
    out = np.empty(len(raw_codes), dtype=np.uint8)
    for i, code in enumerate(raw_codes):
        if isinstance(code, str):
            name = code.strip().upper()
            if name not in _STAGE_MAP:
                raise DataError(f"unknown stage code {code!r} at epoch {i}")
            out[i] = _STAGE_MAP[name]
        else:
            value = int(code)
            if value != EXCLUDED_CODE and not 0 <= value <= 4:
                raise DataError(f"unknown stage code {code!r} at epoch {i}")
            out[i] = value
    return out


@dataclass
class Recording:
    """One night of single-channel EEG at 100 Hz with its raw hypnogram."""

    id: str
    channel: str
    samples: np.ndarray
    hypnogram: list        # raw stage codes, one per 30-second epoch
    in_bed: tuple[int, int] | None = None   # epoch indices, inclusive

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        n_epochs = len(self.samples) // EPOCH_SAMPLES
        if len(self.hypnogram) != n_epochs:
            raise DataError(f"{self.id}: hypnogram length {len(self.hypnogram)} "
                            f"!= epoch count {n_epochs}")

    @property
    def n_epochs(self) -> int:
        return len(self.hypnogram)


def trim_recording(rec: Recording) -> Recording:
    """Keep epochs from 30 minutes before to 30 minutes after the in-bed part."""
    if rec.in_bed is None:
        log.warning("%s: no in-bed metadata, skipping trim", rec.id)
        return rec
    start, end = rec.in_bed
    lo = max(0, start - TRIM_MARGIN_EPOCHS)
    hi = min(rec.n_epochs - 1, end + TRIM_MARGIN_EPOCHS)
    return Recording(
        id=rec.id, channel=rec.channel,
        samples=rec.samples[lo * EPOCH_SAMPLES:(hi + 1) * EPOCH_SAMPLES],
        hypnogram=list(rec.hypnogram[lo:hi + 1]),
        in_bed=(start - lo, end - lo),
    )


@dataclass
class EpochSequence:
    """L consecutive normalized spectrograms with their stage labels."""

    values: np.ndarray        # (L, T, F) normalized log spectrograms
    labels: np.ndarray        # (L,) mapped stage codes, 255 = excluded
    recording_id: str = ""
    start_epoch_index: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.values.ndim != 3:
            raise DataError(f"sequence values must be (L, T, F), "
                            f"got {self.values.shape}")
        if len(self.labels) != len(self.values):
            raise DataError("sequence labels length mismatch")


def window_sequences(values: np.ndarray, labels: np.ndarray, seq_len: int,
                     stride: int, recording_id: str = "",
                     skip_excluded: bool = False) -> list[EpochSequence]:
    """Cut a recording into length-L windows.

    Training uses stride == seq_len with excluded-epoch windows skipped;
    inference uses stride 1. A tail window aligned to the recording end is
    added when stride windows do not cover the last epochs.
    """
    if seq_len < 1 or stride < 1:
        raise ConfigError("seq_len and stride must be >= 1")
    n = len(labels)
    if n < seq_len:
        log.warning("%s: only %d epochs, shorter than window %d",
                    recording_id, n, seq_len)
        return []
    starts = list(range(0, n - seq_len + 1, stride))
    if starts[-1] + seq_len < n:
        starts.append(n - seq_len)
    out = []
    for s in starts:
        win_labels = labels[s:s + seq_len]
        if skip_excluded and (win_labels == EXCLUDED_CODE).any():
            continue
        out.append(EpochSequence(values=values[s:s + seq_len], labels=win_labels,
                                 recording_id=recording_id, start_epoch_index=s))
    return out


def has_all_stages(mapped_labels: np.ndarray) -> bool:
    usable = mapped_labels[mapped_labels != EXCLUDED_CODE]
    return len(np.unique(usable)) == len(STAGE_NAMES)


def exclude_incomplete_recordings(labels_by_id: dict[str, np.ndarray]
                                  ) -> dict[str, np.ndarray]:
    """Drop recordings whose mapped hypnogram lacks any of the 5 stages."""
    return {rid: labels for rid, labels in labels_by_id.items()
            if has_all_stages(labels)}


# -- splits and manifest ----------------------------------------------------

@dataclass
class DatasetSplit:
    train: list[str] = field(default_factory=list)
    validation: list[str] = field(default_factory=list)
    test: list[str] = field(default_factory=list)

    def validate(self) -> None:
        groups = [set(self.train), set(self.validation), set(self.test)]
        names = ["train", "validation", "test"]
        for i in range(3):
            for j in range(i + 1, 3):
                overlap = groups[i] & groups[j]
                if overlap:
                    raise DataError(f"recordings in both {names[i]} and "
                                    f"{names[j]}: {sorted(overlap)}")


@dataclass
class ManifestEntry:
    id: str
    hypnogram: Path | None
    split: str
    channel: str = ""
    edf: Path | None = None
    features: Path | None = None
    in_bed: tuple[int, int] | None = None


@dataclass
class Manifest:
    recordings: list[ManifestEntry]
    exclude_incomplete: bool = False
    trim: bool = False

    def split(self) -> DatasetSplit:
        s = DatasetSplit()
        for e in self.recordings:
            if e.split == "train":
                s.train.append(e.id)
            elif e.split in ("val", "validation"):
                s.validation.append(e.id)
            elif e.split == "test":
                s.test.append(e.id)
            else:
                raise DataError(f"{e.id}: unknown split {e.split!r}")
        s.validate()
        return s


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest {path}: invalid JSON ({exc})") from exc
    profile = doc.get("profile", {})
    entries = []
    for rec in doc.get("recordings", []):
        if "id" not in rec or "split" not in rec:
            raise DataError(f"manifest {path}: recording entries need id and split")
        resolve = lambda key: (path.parent / rec[key]) if rec.get(key) else None
        entries.append(ManifestEntry(
            id=rec["id"],
            hypnogram=resolve("hypnogram"),
            split=rec["split"],
            channel=rec.get("channel", ""),
            edf=resolve("edf"),
            features=resolve("features"),
            in_bed=tuple(rec["in_bed"]) if rec.get("in_bed") else None,
        ))
    manifest = Manifest(recordings=entries,
                        exclude_incomplete=bool(profile.get("exclude_incomplete", False)),
                        trim=bool(profile.get("trim", False)))
    manifest.split()
    return manifest


def read_hypnogram_csv(path) -> list[str]:
    """CSV `epoch_index,stage_code` with header; rows may arrive unordered."""
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or \
                [c.strip() for c in reader.fieldnames[:2]] != ["epoch_index", "stage_code"]:
            raise DataError(f"hypnogram {path}: expected header "
                            "'epoch_index,stage_code'")
        for row in reader:
            rows.append((int(row["epoch_index"]), row["stage_code"].strip()))
    rows.sort()
    if [i for i, _ in rows] != list(range(len(rows))):
        raise DataError(f"hypnogram {path}: epoch indices must be 0..n-1")
    return [code for _, code in rows]


def write_hypnogram_csv(path, codes) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["epoch_index", "stage_code"])
        for i, code in enumerate(codes):
            writer.writerow([i, code])


# -- synthetic dataset ------------------------------------------------------

# per-stage (band_lo, band_hz, amplitude) components; bursty parts get an
# on/off envelope so N2 spindles ride a theta background
_STAGE_BANDS = {
    "W":   [((8.0, 12.0), 40.0, True), ((2.0, 30.0), 10.0, False)],
    "N1":  [((4.0, 7.0), 20.0, False), ((2.0, 30.0), 8.0, False)],
    "N2":  [((4.0, 7.0), 20.0, False), ((11.0, 16.0), 35.0, True)],
    "N3":  [((0.5, 2.0), 60.0, False), ((2.0, 20.0), 8.0, False)],
    "REM": [((2.0, 25.0), 12.0, False), ((4.0, 8.0), 6.0, False)],
}

_MARKOV = {
    "W":   [("W", 0.90), ("N1", 0.08), ("N2", 0.01), ("REM", 0.01)],
    "N1":  [("N1", 0.50), ("N2", 0.30), ("W", 0.15), ("REM", 0.05)],
    "N2":  [("N2", 0.85), ("N3", 0.08), ("N1", 0.03), ("REM", 0.03), ("W", 0.01)],
    "N3":  [("N3", 0.88), ("N2", 0.10), ("W", 0.02)],
    "REM": [("REM", 0.85), ("N1", 0.05), ("N2", 0.05), ("W", 0.05)],
}


def _band_noise(rng: np.random.Generator, lo_hz: float, hi_hz: float,
                n: int, fs: float = 100.0) -> np.ndarray:
    """Gaussian noise restricted to [lo, hi] Hz, synthesized in the DFT domain."""
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    spec = np.zeros(len(freqs), dtype=np.complex128)
    band = (freqs >= lo_hz) & (freqs <= hi_hz)
    k = int(band.sum())
    spec[band] = rng.normal(size=k) + 1j * rng.normal(size=k)
    x = np.fft.irfft(spec, n=n)
    rms = np.sqrt(np.mean(x * x))
    return x / rms if rms > 0 else x


def synth_epoch(rng: np.random.Generator, stage: str,
                noise_amp: float = 0.0) -> np.ndarray:
    """One 30-second epoch of stage-coded band-limited noise.

    `noise_amp` adds stage-free broadband background, masking the coding
    bands the way a poor-quality channel would.
    """
    x = np.zeros(EPOCH_SAMPLES)
    for (lo, hi), amp, bursty in _STAGE_BANDS[stage]:
        component = _band_noise(rng, lo, hi, EPOCH_SAMPLES) * amp
        if bursty:
            envelope = np.zeros(EPOCH_SAMPLES)
            for _ in range(rng.integers(3, 7)):
                start = rng.integers(0, EPOCH_SAMPLES - 120)
                width = rng.integers(60, 150)
                envelope[start:start + width] = 1.0
            component = component * np.maximum(envelope, 0.15)
        x += component
    if noise_amp > 0:
        x += _band_noise(rng, 0.5, 45.0, EPOCH_SAMPLES) * noise_amp
    return x


def synth_hypnogram(rng: np.random.Generator, n_epochs: int,
                    artifact_rate: float = 0.01) -> list[str]:
    """Markov-chain raw hypnogram; N3 runs sometimes annotated as N4,
    with occasional MOVEMENT/UNKNOWN artifacts."""
    stage = "W"
    codes = []
    for _ in range(n_epochs):
        names, probs = zip(*_MARKOV[stage])
        stage = rng.choice(names, p=probs)
        code = stage
        if stage == "N3" and rng.random() < 0.3:
            code = "N4"
        if rng.random() < artifact_rate:
            code = "MOVEMENT" if rng.random() < 0.5 else "UNKNOWN"
        codes.append(code)
    return codes


def _coding_stage(code: str) -> str:
    if code in _STAGE_BANDS:
        return code
    return "N3" if code == "N4" else "W"


def synth_recording(rec_id: str, rng: np.random.Generator,
                    n_epochs: int = 120, channel: str = "EEG-SYN",
                    transition_blend: float = 0.7,
                    noise_range: tuple[float, float] = (5.0, 25.0),
                    transition_noise_range: tuple[float, float] = (25.0, 70.0),
                    bad_epoch_rate: float = 0.1,
                    bad_noise_range: tuple[float, float] = (50.0, 100.0)
                    ) -> Recording:
    """Night-long recording with ambiguous transition epochs.

    An epoch whose stage differs from its predecessor carries a residue of
    the previous stage's signal plus elevated movement-like noise (scorers
    label the dominant pattern, the EEG shows both and the subject moves);
    every epoch gets broadband background noise, and a `bad_epoch_rate`
    fraction gets enough of it to nearly mask the coding bands. These
    knobs produce the low-confidence epochs a triage policy is supposed
    to catch; zero them for clean epochs.
    """
    codes = synth_hypnogram(rng, n_epochs)
    pieces = []
    for i, code in enumerate(codes):
        transition = (i > 0 and
                      _coding_stage(codes[i - 1]) != _coding_stage(code))
        if rng.random() < bad_epoch_rate:
            noise = rng.uniform(*bad_noise_range)
        elif transition and transition_noise_range[1] > 0:
            noise = rng.uniform(*transition_noise_range)
        elif noise_range[1] > 0:
            noise = rng.uniform(*noise_range)
        else:
            noise = 0.0
        x = synth_epoch(rng, _coding_stage(code), noise_amp=noise)
        if transition and transition_blend > 0:
            mix = rng.uniform(0.3, transition_blend)
            x = (1.0 - mix) * x + mix * synth_epoch(
                rng, _coding_stage(codes[i - 1]), noise_amp=noise)
        pieces.append(x)
    return Recording(id=rec_id, channel=channel,
                     samples=np.concatenate(pieces), hypnogram=codes)
