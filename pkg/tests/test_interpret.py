import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from somnus.errors import ConfigError, DataError
from somnus.features import RawEpoch, reconstruct, stft_epoch
from somnus.interpret import (ScoredEpoch, TriageConfig, attended_eeg,
                              confidence, epoch_heatmap, flag_transitioning,
                              heatmap_to_samples, influence_rows,
                              read_review_bundle, triage, write_review_bundle)


def random_distribution(rng, c=5):
    p = rng.random(c)
    return p / p.sum()


class TestConfidence:
    def test_uniform_is_zero(self):
        assert confidence(np.full(5, 0.2)) == 0.0

    def test_one_hot_is_one(self):
        assert confidence(np.array([0.0, 0.0, 1.0, 0.0, 0.0])) == 1.0

    def test_two_way_split_closed_form(self):
        got = confidence(np.array([0.5, 0.5, 0.0, 0.0, 0.0]))
        assert got == pytest.approx(1.0 - np.log(2) / np.log(5), abs=1e-9)

    def test_max_prob_variant(self):
        p = np.array([0.1, 0.6, 0.1, 0.1, 0.1])
        assert confidence(p, method="max_prob") == 0.6
        with pytest.raises(ConfigError):
            confidence(p, method="margin")

    def test_not_a_distribution_rejected(self):
        with pytest.raises(DataError):
            confidence(np.array([0.5, 0.6]))
        with pytest.raises(DataError):
            confidence(np.array([-0.1, 1.1, 0.0, 0.0, 0.0]))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_permutation_invariant_and_bounded(self, seed):
        rng = np.random.default_rng(seed)
        p = random_distribution(rng)
        c = confidence(p)
        assert 0.0 <= c <= 1.0
        assert confidence(p[rng.permutation(5)]) == pytest.approx(c, abs=1e-12)


def scored(index, conf):
    probs = np.zeros(5)
    probs[0] = conf
    probs[1] = 1 - conf
    return ScoredEpoch(epoch_index=index, probs=probs, predicted_stage=0,
                       confidence=conf)


class TestTriage:
    def test_threshold_partition(self):
        epochs = [scored(i, c) for i, c in enumerate([0.9, 0.3, 0.5, 0.1])]
        confident, deferred = triage(epochs, TriageConfig(threshold=0.5))
        assert [s.epoch_index for s in confident] == [0, 2]
        assert [s.epoch_index for s in deferred] == [1, 3]
        assert all(s.triaged for s in deferred)
        assert not any(s.triaged for s in confident)

    def test_percentile_takes_floor_count(self):
        epochs = [scored(i, 0.1 * i) for i in range(10)]
        _, deferred = triage(epochs,
                             TriageConfig(mode="percentile", percentile=25))
        assert len(deferred) == 2
        assert sorted(s.epoch_index for s in deferred) == [0, 1]

    def test_percentile_ties_break_by_index(self):
        epochs = [scored(i, 0.5) for i in range(4)]
        _, deferred = triage(epochs,
                             TriageConfig(mode="percentile", percentile=50))
        assert sorted(s.epoch_index for s in deferred) == [0, 1]

    def test_bad_config_rejected(self):
        with pytest.raises(ConfigError):
            TriageConfig(mode="magic").validate()
        with pytest.raises(ConfigError):
            TriageConfig(threshold=1.5).validate()
        with pytest.raises(ConfigError):
            TriageConfig.from_dict({"mode": "threshold", "cutoff": 0.5})


class TestTransitioning:
    def test_interior_change_flags_both_sides(self):
        flags = flag_transitioning(np.array([2, 2, 3, 3, 3]))
        assert flags.tolist() == [False, True, True, False, False]

    def test_constant_hypnogram_flags_nothing(self):
        assert not flag_transitioning(np.full(6, 2)).any()

    def test_short_inputs(self):
        assert flag_transitioning(np.array([1])).tolist() == [False]
        assert flag_transitioning(np.array([], dtype=int)).size == 0


class TestHeatmap:
    def test_uniform_attention_is_degenerate(self):
        scores = np.full((8, 29, 29), 1.0 / 29)
        heat, degenerate = epoch_heatmap(scores)
        assert degenerate
        np.testing.assert_array_equal(heat, 0.0)

    def test_peaked_column_dominates(self):
        scores = np.full((2, 6, 6), 0.1)
        scores[:, :, 3] = 0.5
        heat, degenerate = epoch_heatmap(scores)
        assert not degenerate
        assert heat[3] == 1.0
        assert heat.min() == 0.0 and heat.max() == 1.0

    def test_sum_and_mean_aggregates_agree(self):
        rng = np.random.default_rng(0)
        scores = rng.random((4, 7, 7))
        heat_sum, _ = epoch_heatmap(scores, aggregate="sum")
        heat_mean, _ = epoch_heatmap(scores, aggregate="mean")
        np.testing.assert_allclose(heat_sum, heat_mean, atol=1e-12)
        with pytest.raises(ConfigError):
            epoch_heatmap(scores, aggregate="max")

    def test_sample_upsampling_covers_signal(self):
        heat = np.linspace(0, 1, 29)
        samples = heatmap_to_samples(heat)
        assert samples.shape == (3000,)
        assert samples.min() >= 0.0 and samples.max() <= 1.0
        # first hop is covered only by frame 0, last only by frame 28
        assert samples[:100] == pytest.approx(heat[0])
        assert samples[-100:] == pytest.approx(heat[-1])


class TestAttendedEeg:
    def test_identity_attention_equals_roundtrip(self):
        rng = np.random.default_rng(1)
        spec = stft_epoch(RawEpoch(samples=rng.normal(size=3000)))
        eye = np.stack([np.eye(29)] * 8)
        recon = attended_eeg(spec, [eye, eye])
        np.testing.assert_allclose(recon, reconstruct(spec), atol=1e-12)

    def test_uniform_attention_averages_frames(self):
        rng = np.random.default_rng(2)
        spec = stft_epoch(RawEpoch(samples=rng.normal(size=3000)))
        uniform = np.full((8, 29, 29), 1.0 / 29)
        mixed = attended_eeg(spec, [uniform])
        # all frames share the averaged magnitude; phase still varies
        assert mixed.shape == (3000,)
        assert not np.allclose(mixed, reconstruct(spec))


class TestInfluence:
    def test_rows_renormalize_to_one(self):
        rng = np.random.default_rng(3)
        scores = rng.random((8, 21, 21))
        rows = influence_rows(scores)
        np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-12)
        assert (rows >= 0).all()

    def test_single_head_softmax_rows_unchanged(self):
        rng = np.random.default_rng(4)
        raw = rng.random((1, 5, 5))
        probs = raw / raw.sum(axis=2, keepdims=True)
        np.testing.assert_allclose(influence_rows(probs), probs[0], atol=1e-12)


class TestReviewBundle:
    def make_epochs(self, n=5):
        rng = np.random.default_rng(5)
        out = []
        for i in range(n):
            p = random_distribution(rng)
            out.append(ScoredEpoch(
                epoch_index=i, probs=p, predicted_stage=int(p.argmax()),
                confidence=confidence(p), triaged=i % 2 == 0,
                transitioning=i == 1, true_stage=i % 5,
                heatmap=rng.random(29), influence=np.full(21, 1 / 21),
                influence_offset=max(0, i - 10)))
        return out

    def test_roundtrip_preserves_fields(self, tmp_path):
        path = tmp_path / "bundle.json"
        epochs = self.make_epochs()
        write_review_bundle(path, "rec-01", epochs)
        doc = read_review_bundle(path)
        assert doc["recording_id"] == "rec-01"
        assert len(doc["epochs"]) == 5
        first = doc["epochs"][0]
        assert first["index"] == 0
        assert first["triaged"] is True
        assert first["confidence"] == pytest.approx(epochs[0].confidence,
                                                    rel=1e-8)
        assert len(first["probs"]) == 5
        assert len(first["heatmap"]) == 29
        assert first["influence"]["window_offset"] == 0

    def test_optional_fields_omitted(self, tmp_path):
        path = tmp_path / "bundle.json"
        write_review_bundle(path, "rec-02", [scored(0, 0.8)])
        entry = read_review_bundle(path)["epochs"][0]
        for key in ("true_stage", "heatmap", "influence", "attended_eeg",
                    "raw_eeg"):
            assert key not in entry

    def test_wrong_schema_version_rejected(self, tmp_path):
        path = tmp_path / "bundle.json"
        path.write_text(json.dumps({"schema_version": 99, "epochs": []}))
        with pytest.raises(DataError):
            read_review_bundle(path)
