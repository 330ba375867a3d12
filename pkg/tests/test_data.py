import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from somnus.errors import DataError
from somnus import data as D
from somnus import edf as EDF
from somnus.features import EXCLUDED_CODE


class TestMapStages:
    def test_paper_policy(self):
        np.testing.assert_array_equal(D.map_stages(["W", "N4", "MOVEMENT"]),
                                      [0, 3, EXCLUDED_CODE])

    def test_all_unknown_gives_empty_usable_set(self):
        mapped = D.map_stages(["UNKNOWN"] * 4)
        assert (mapped == EXCLUDED_CODE).all()

    def test_idempotent_over_full_alphabet(self):
        mapped = D.map_stages(list(D.RAW_STAGES))
        np.testing.assert_array_equal(D.map_stages(mapped), mapped)

    def test_unknown_code_rejected(self):
        with pytest.raises(DataError):
            D.map_stages(["W", "S9"])


def make_recording(n_epochs, in_bed=None, rec_id="r0"):
    return D.Recording(id=rec_id, channel="C4", samples=np.zeros(n_epochs * 3000),
                       hypnogram=["W"] * n_epochs, in_bed=in_bed)


class TestTrim:
    def test_standard_margin(self):
        rec = trimmed = D.trim_recording(make_recording(1000, in_bed=(100, 800)))
        assert trimmed.n_epochs == 860 - 40 + 1
        assert trimmed.in_bed == (60, 760)
        assert len(trimmed.samples) == trimmed.n_epochs * 3000

    def test_whole_recording_in_bed(self):
        rec = make_recording(100, in_bed=(0, 99))
        assert D.trim_recording(rec).n_epochs == 100

    def test_missing_metadata_is_noop(self):
        rec = make_recording(50)
        assert D.trim_recording(rec) is rec


class TestWindowing:
    def seq_inputs(self, n):
        values = np.random.default_rng(0).normal(size=(n, 29, 128)).astype(np.float32)
        labels = np.zeros(n, dtype=np.uint8)
        return values, labels

    def test_tail_rule(self):
        values, labels = self.seq_inputs(100)
        seqs = D.window_sequences(values, labels, 21, 21)
        assert [s.start_epoch_index for s in seqs] == [0, 21, 42, 63, 79]

    def test_length_one(self):
        values, labels = self.seq_inputs(7)
        assert len(D.window_sequences(values, labels, 1, 1)) == 7

    def test_exact_length_recording(self):
        values, labels = self.seq_inputs(21)
        assert len(D.window_sequences(values, labels, 21, 21)) == 1

    def test_short_recording_warns_empty(self, caplog):
        values, labels = self.seq_inputs(5)
        assert D.window_sequences(values, labels, 21, 21, recording_id="r") == []

    def test_excluded_windows_skipped_in_training(self):
        values, labels = self.seq_inputs(40)
        labels[10] = EXCLUDED_CODE
        seqs = D.window_sequences(values, labels, 10, 10, skip_excluded=True)
        assert [s.start_epoch_index for s in seqs] == [0, 20, 30]

    @given(st.integers(21, 200))
    @settings(max_examples=20, deadline=None)
    def test_stride_one_count(self, n):
        values = np.zeros((n, 29, 128), dtype=np.float32)
        labels = np.zeros(n, dtype=np.uint8)
        assert len(D.window_sequences(values, labels, 21, 1)) == n - 21 + 1


class TestExcludeIncomplete:
    def test_missing_rem_dropped(self):
        kept = D.exclude_incomplete_recordings({
            "a": np.array([0, 1, 2, 3], dtype=np.uint8),
            "b": np.array([0, 1, 2, 3, 4], dtype=np.uint8),
        })
        assert list(kept) == ["b"]

    def test_empty_dataset(self):
        assert D.exclude_incomplete_recordings({}) == {}

    def test_excluded_epochs_ignored(self):
        labels = np.array([0, 1, 2, 3, 4, EXCLUDED_CODE], dtype=np.uint8)
        assert D.has_all_stages(labels)


class TestSplitsAndManifest:
    def test_overlapping_split_rejected(self):
        split = D.DatasetSplit(train=["a", "b"], validation=["b"], test=[])
        with pytest.raises(DataError):
            split.validate()

    def test_manifest_roundtrip(self, tmp_path):
        doc = {
            "profile": {"exclude_incomplete": True, "trim": False},
            "recordings": [
                {"id": "r0", "edf": "r0.edf", "hypnogram": "r0.csv",
                 "channel": "C4", "split": "train"},
                {"id": "r1", "edf": "r1.edf", "hypnogram": "r1.csv",
                 "channel": "C4", "split": "test"},
            ],
        }
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(doc))
        manifest = D.load_manifest(path)
        assert manifest.exclude_incomplete
        assert manifest.recordings[0].edf == tmp_path / "r0.edf"
        split = manifest.split()
        assert split.train == ["r0"] and split.test == ["r1"]

    def test_malformed_manifest_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(DataError):
            D.load_manifest(path)


class TestHypnogramCsv:
    def test_roundtrip(self, tmp_path):
        codes = ["W", "N1", "N4", "MOVEMENT", "REM"]
        path = tmp_path / "h.csv"
        D.write_hypnogram_csv(path, codes)
        assert D.read_hypnogram_csv(path) == codes

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("idx,stage\n0,W\n")
        with pytest.raises(DataError):
            D.read_hypnogram_csv(path)


class TestSynthetic:
    def test_recording_consistency(self):
        rec = D.synth_recording("s0", np.random.default_rng(0), n_epochs=40)
        assert rec.n_epochs == 40
        assert len(rec.samples) == 40 * 3000
        assert set(D.map_stages(rec.hypnogram)) <= {0, 1, 2, 3, 4, EXCLUDED_CODE}

    def test_deterministic_given_seed(self):
        a = D.synth_recording("s", np.random.default_rng(7), n_epochs=10)
        b = D.synth_recording("s", np.random.default_rng(7), n_epochs=10)
        assert a.samples.tobytes() == b.samples.tobytes()
        assert a.hypnogram == b.hypnogram

    def test_stage_spectra_are_distinct(self):
        # N3 delta power dominates low band; W alpha dominates 8-12 Hz
        rng = np.random.default_rng(1)
        n3 = D.synth_epoch(rng, "N3")
        w = D.synth_epoch(rng, "W")
        freqs = np.fft.rfftfreq(3000, d=0.01)
        def band_power(x, lo, hi):
            spec = np.abs(np.fft.rfft(x)) ** 2
            return spec[(freqs >= lo) & (freqs <= hi)].sum()
        assert band_power(n3, 0.5, 2) > band_power(w, 0.5, 2)
        assert band_power(w, 8, 12) > band_power(n3, 8, 12)


class TestEdf:
    def test_write_read_roundtrip(self, tmp_path):
        rng = np.random.default_rng(2)
        x = rng.normal(scale=40.0, size=30 * 100)
        path = tmp_path / "rec.edf"
        EDF.write_edf(path, x, channel="EEG C4-A1")
        back = EDF.read_edf(path, channel="EEG C4-A1")
        assert len(back) == len(x)
        # int16 quantization over +-~160 uV: resolution ~0.005 uV
        np.testing.assert_allclose(back, x, atol=0.02)

    def test_missing_channel_rejected(self, tmp_path):
        path = tmp_path / "rec.edf"
        EDF.write_edf(path, np.zeros(3000), channel="EEG A")
        with pytest.raises(DataError):
            EDF.read_edf(path, channel="EEG B")

    def test_resampling_to_100hz(self, tmp_path):
        t = np.arange(0, 30, 1 / 125.0)
        x = np.sin(2 * np.pi * 10.0 * t)
        path = tmp_path / "rec125.edf"
        EDF.write_edf(path, x, channel="C3", sample_rate=125)
        back = EDF.read_edf(path, channel="C3")
        assert len(back) == 3000
        peak = np.abs(np.fft.rfft(back)).argmax()
        assert abs(peak * 100.0 / 3000 - 10.0) < 0.2

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "bad.edf"
        path.write_bytes(b"0" * 100)
        with pytest.raises(DataError):
            EDF.read_edf(path)
