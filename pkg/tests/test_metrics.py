import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from somnus.errors import DataError
from somnus.features import EXCLUDED_CODE
from somnus.metrics import EvalReport, confusion_matrix, evaluate


def oracle_metrics(predictions, labels, n_classes=5):
    """Brute-force metric computation by direct counting, no matrix algebra."""
    pairs = [(p, y) for p, y in zip(predictions, labels) if y != EXCLUDED_CODE]
    n = len(pairs)
    acc = sum(1 for p, y in pairs if p == y) / n
    # kappa via expected chance agreement from marginals
    p_e = 0.0
    for c in range(n_classes):
        row = sum(1 for _, y in pairs if y == c) / n
        col = sum(1 for p, _ in pairs if p == c) / n
        p_e += row * col
    kappa = 1.0 if p_e == 1.0 else (acc - p_e) / (1 - p_e)
    f1s, sens, spec = [], [], []
    for c in range(n_classes):
        tp = sum(1 for p, y in pairs if p == c and y == c)
        fp = sum(1 for p, y in pairs if p == c and y != c)
        fn = sum(1 for p, y in pairs if p != c and y == c)
        tn = n - tp - fp - fn
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
        sens.append(rec)
        spec.append(tn / (tn + fp) if tn + fp else 0.0)
    return dict(accuracy=acc, kappa=kappa, macro_f1=sum(f1s) / n_classes,
                mean_sensitivity=sum(sens) / n_classes,
                mean_specificity=sum(spec) / n_classes, class_f1=f1s)


def assert_matches_oracle(report: EvalReport, predictions, labels):
    expected = oracle_metrics(predictions, labels)
    assert report.accuracy == pytest.approx(expected["accuracy"], abs=1e-12)
    assert report.kappa == pytest.approx(expected["kappa"], abs=1e-12)
    assert report.macro_f1 == pytest.approx(expected["macro_f1"], abs=1e-12)
    assert report.mean_sensitivity == pytest.approx(
        expected["mean_sensitivity"], abs=1e-12)
    assert report.mean_specificity == pytest.approx(
        expected["mean_specificity"], abs=1e-12)
    for f_got, f_exp in zip(report.class_f1.values(), expected["class_f1"]):
        assert f_got == pytest.approx(f_exp, abs=1e-12)


class TestEvaluate:
    def test_perfect_predictions(self):
        labels = np.array([0, 1, 2, 3, 4, 2, 1])
        report = evaluate(labels, labels)
        assert report.accuracy == 1.0
        assert report.kappa == 1.0
        assert report.macro_f1 == 1.0

    def test_hand_computed_two_class_kappa(self):
        # confusion [[45, 5], [15, 35]]: p_o = 0.8, p_e = 0.5, kappa = 0.6
        labels = np.array([0] * 50 + [1] * 50)
        preds = np.array([0] * 45 + [1] * 5 + [0] * 15 + [1] * 35)
        report = evaluate(preds, labels, n_classes=2)
        assert report.accuracy == pytest.approx(0.8)
        assert report.kappa == pytest.approx(0.6)

    def test_confusion_matrix_orientation(self):
        cm = confusion_matrix([1, 1, 0], [0, 1, 0])
        assert cm[0, 1] == 1 and cm[0, 0] == 1 and cm[1, 1] == 1

    def test_absent_class_f1_is_zero(self):
        labels = np.array([0, 0, 1, 1])
        preds = np.array([0, 0, 1, 1])
        report = evaluate(preds, labels)
        assert report.class_f1["N2"] == 0.0

    def test_excluded_epochs_masked(self):
        labels = np.array([0, EXCLUDED_CODE, 1])
        preds = np.array([0, 3, 1])
        assert evaluate(preds, labels).accuracy == 1.0

    def test_empty_input_rejected(self):
        with pytest.raises(DataError):
            evaluate(np.array([]), np.array([]))
        with pytest.raises(DataError):
            evaluate(np.array([0]), np.array([EXCLUDED_CODE]))

    @given(st.integers(1, 200), st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_matches_brute_force_oracle(self, n, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 5, size=n)
        preds = rng.integers(0, 5, size=n)
        assert_matches_oracle(evaluate(preds, labels), preds, labels)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_degenerate_class_distributions(self, seed):
        rng = np.random.default_rng(seed)
        # at most 2 classes present: forces absent-class conventions
        labels = rng.integers(0, 2, size=50)
        preds = rng.integers(0, 2, size=50)
        assert_matches_oracle(evaluate(preds, labels), preds, labels)


class TestMetricInvariances:
    def test_kappa_one_iff_diagonal(self):
        labels = np.array([0, 1, 2, 2])
        assert evaluate(labels, labels).kappa == 1.0
        preds = labels.copy()
        preds[0] = 1
        assert evaluate(preds, labels).kappa < 1.0

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_invariance_under_class_relabeling(self, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 5, size=120)
        preds = rng.integers(0, 5, size=120)
        perm = rng.permutation(5)
        base = evaluate(preds, labels)
        renamed = evaluate(perm[preds], perm[labels])
        assert renamed.macro_f1 == pytest.approx(base.macro_f1, abs=1e-12)
        assert renamed.kappa == pytest.approx(base.kappa, abs=1e-12)
        assert renamed.accuracy == pytest.approx(base.accuracy, abs=1e-12)
