"""Minimal EDF (European Data Format) support.

Restricted on purpose: continuous recordings, one extracted channel,
int16 samples. Signals not at 100 Hz are resampled by a polyphase filter.
Annotation (EDF+) parsing is out of scope; hypnograms travel as CSV.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.signal import resample_poly

from .errors import DataError
from .features import SAMPLE_RATE

_HEADER_LEN = 256
_PER_SIGNAL_LEN = 256


def _field(value: str, width: int) -> bytes:
    s = str(value)[:width]
    return s.ljust(width).encode("ascii")


def write_edf(path, samples: np.ndarray, channel: str,
              sample_rate: int = SAMPLE_RATE) -> None:
    """Single-channel EDF with 1-second data records."""
    samples = np.asarray(samples, dtype=np.float64)
    n_records = len(samples) // sample_rate
    samples = samples[:n_records * sample_rate]
    phys_max = max(float(np.abs(samples).max()), 1.0)
    phys_min = -phys_max
    dig_min, dig_max = -32768, 32767
    scaled = np.clip((samples - phys_min) / (phys_max - phys_min)
                     * (dig_max - dig_min) + dig_min, dig_min, dig_max)
    digital = np.round(scaled).astype("<i2")
    with open(path, "wb") as f:
        f.write(_field("0", 8))
        f.write(_field("X X X X", 80))
        f.write(_field("Startdate X X X X", 80))
        f.write(_field("01.01.00", 8))
        f.write(_field("00.00.00", 8))
        f.write(_field(str(_HEADER_LEN + _PER_SIGNAL_LEN), 8))
        f.write(_field("", 44))
        f.write(_field(str(n_records), 8))
        f.write(_field("1", 8))
        f.write(_field("1", 4))
        f.write(_field(channel, 16))
        f.write(_field("", 80))
        f.write(_field("uV", 8))
        f.write(_field(f"{phys_min:.1f}", 8))
        f.write(_field(f"{phys_max:.1f}", 8))
        f.write(_field(str(dig_min), 8))
        f.write(_field(str(dig_max), 8))
        f.write(_field("", 80))
        f.write(_field(str(sample_rate), 8))
        f.write(_field("", 32))
        f.write(digital.tobytes())


def read_edf(path, channel: str | None = None) -> np.ndarray:
    """Extract one channel as a float array resampled to 100 Hz."""
    with open(path, "rb") as f:
        header = f.read(_HEADER_LEN)
        if len(header) < _HEADER_LEN:
            raise DataError(f"{path}: truncated EDF header")
        try:
            n_records = int(header[236:244].decode("ascii").strip())
            record_duration = float(header[244:252].decode("ascii").strip())
            ns = int(header[252:256].decode("ascii").strip())
        except ValueError as exc:
            raise DataError(f"{path}: malformed EDF header") from exc
        if ns < 1 or n_records < 0:
            raise DataError(f"{path}: malformed EDF header")
        sig_header = f.read(ns * _PER_SIGNAL_LEN)
        if len(sig_header) < ns * _PER_SIGNAL_LEN:
            raise DataError(f"{path}: truncated EDF signal headers")

        def sig_fields(offset, width):
            base = offset * ns
            return [sig_header[base + i * width: base + (i + 1) * width]
                    .decode("ascii", "replace").strip() for i in range(ns)]

        labels = sig_fields(0, 16)
        phys_min = [float(v) for v in sig_fields(16 + 80 + 8, 8)]
        phys_max = [float(v) for v in sig_fields(16 + 80 + 8 + 8, 8)]
        dig_min = [int(float(v)) for v in sig_fields(16 + 80 + 8 + 16, 8)]
        dig_max = [int(float(v)) for v in sig_fields(16 + 80 + 8 + 24, 8)]
        samples_per_record = [int(v) for v in
                              sig_fields(16 + 80 + 8 + 32 + 80, 8)]

        if channel:
            matches = [i for i, lab in enumerate(labels) if lab == channel]
            if not matches:
                raise DataError(f"{path}: channel {channel!r} not found "
                                f"(have {labels})")
            target = matches[0]
        else:
            target = 0

        record_len = sum(samples_per_record)
        raw = np.frombuffer(f.read(n_records * record_len * 2), dtype="<i2")
        if len(raw) < n_records * record_len:
            raise DataError(f"{path}: truncated EDF data")
    records = raw.reshape(n_records, record_len)
    offset = sum(samples_per_record[:target])
    digital = records[:, offset:offset + samples_per_record[target]].reshape(-1)
    gain = ((phys_max[target] - phys_min[target])
            / (dig_max[target] - dig_min[target]))
    physical = (digital.astype(np.float64) - dig_min[target]) * gain \
        + phys_min[target]
    native_rate = samples_per_record[target] / record_duration
    if abs(native_rate - SAMPLE_RATE) > 1e-9:
        ratio = Fraction(SAMPLE_RATE / native_rate).limit_denominator(1000)
        physical = resample_poly(physical, ratio.numerator, ratio.denominator)
    return physical
