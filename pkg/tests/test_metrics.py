import math

import numpy as np
import pytest
import sklearn.metrics as skm

from eegeval.errors import MetricError
from eegeval.metrics import (
    MetricReport,
    accuracy,
    aggregate,
    compute_report,
    confusion_matrix,
    kappa,
    mcc,
    precision_recall_f1,
    report_from_dict,
    report_to_dict,
)


class TestConfusionMatrix:
    def test_hand_worked(self):
        cm = confusion_matrix([0, 0, 1, 1, 1], [0, 1, 1, 1, 0], 2)
        np.testing.assert_array_equal(cm, [[1, 1], [1, 2]])

    def test_orientation(self):
        # single sample: true 0 predicted 2 -> row 0, column 2
        cm = confusion_matrix([0], [2], 3)
        assert cm[0, 2] == 1 and cm.sum() == 1

    def test_brute_force_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n_classes = int(rng.integers(2, 6))
            n = int(rng.integers(1, 300))
            yt = rng.integers(0, n_classes, size=n)
            yp = rng.integers(0, n_classes, size=n)
            cm = confusion_matrix(yt, yp, n_classes)
            for i in range(n_classes):
                for j in range(n_classes):
                    assert cm[i, j] == np.sum((yt == i) & (yp == j))

    def test_errors(self):
        with pytest.raises(MetricError):
            confusion_matrix([], [], 2)
        with pytest.raises(MetricError):
            confusion_matrix([0, 1], [0], 2)
        with pytest.raises(MetricError):
            confusion_matrix([0, 2], [0, 0], 2)


class TestAgainstSklearn:
    def _random_case(self, rng):
        n_classes = int(rng.integers(2, 6))
        n = int(rng.integers(n_classes, 200))
        yt = rng.integers(0, n_classes, size=n)
        # guarantee every class appears as a true label so sklearn's implicit
        # class set matches ours
        yt[:n_classes] = np.arange(n_classes)
        yp = rng.integers(0, n_classes, size=n)
        return yt, yp, n_classes

    def test_1000_random_vectors(self):
        rng = np.random.default_rng(2024)
        labels_seen = 0
        for _ in range(1000):
            yt, yp, n_classes = self._random_case(rng)
            labels = list(range(n_classes))
            cm = confusion_matrix(yt, yp, n_classes)
            p, r, f1, macro, weighted = precision_recall_f1(cm)
            assert abs(accuracy(cm) - skm.accuracy_score(yt, yp)) < 1e-12
            sp, sr, sf, _ = skm.precision_recall_fscore_support(
                yt, yp, labels=labels, zero_division=0
            )
            np.testing.assert_allclose(p, sp, atol=1e-12)
            np.testing.assert_allclose(r, sr, atol=1e-12)
            np.testing.assert_allclose(f1, sf, atol=1e-12)
            assert abs(macro - skm.f1_score(yt, yp, labels=labels, average="macro", zero_division=0)) < 1e-12
            assert abs(weighted - skm.f1_score(yt, yp, labels=labels, average="weighted", zero_division=0)) < 1e-12
            assert abs(mcc(cm) - skm.matthews_corrcoef(yt, yp)) < 1e-12
            assert abs(kappa(cm) - skm.cohen_kappa_score(yt, yp, labels=labels)) < 1e-12
            labels_seen += 1
        assert labels_seen == 1000


class TestBinaryMcc:
    def test_four_term_formula(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            yt = rng.integers(0, 2, size=50)
            yp = rng.integers(0, 2, size=50)
            cm = confusion_matrix(yt, yp, 2)
            tn, fp, fn, tp = cm[0, 0], cm[0, 1], cm[1, 0], cm[1, 1]
            denom = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
            expected = 0.0 if denom == 0 else (tp * tn - fp * fn) / denom
            assert abs(mcc(cm) - expected) < 1e-12


class TestDegenerateCases:
    def test_perfect(self):
        cm = confusion_matrix([0, 1, 2], [0, 1, 2], 3)
        assert accuracy(cm) == 1.0
        assert abs(mcc(cm) - 1.0) < 1e-12
        assert kappa(cm) == 1.0

    def test_all_one_class_predictions(self):
        # predictor collapses to class 0: mcc and kappa denominators vanish
        cm = confusion_matrix([0, 0, 0, 0], [0, 0, 0, 0], 2)
        assert mcc(cm) == 0.0
        assert kappa(cm) == 0.0
        p, r, f1, macro, weighted = precision_recall_f1(cm)
        assert f1[1] == 0.0  # absent class contributes zero, not NaN

    def test_zero_division_precision(self):
        # class 1 never predicted -> precision[1] = 0
        cm = confusion_matrix([1, 1], [0, 0], 2)
        p, r, f1, _, _ = precision_recall_f1(cm)
        assert p[1] == 0.0 and r[1] == 0.0 and f1[1] == 0.0


class TestComputeReport:
    def test_binary_positive_f1(self):
        rep = compute_report([0, 1, 1, 0], [0, 1, 0, 0], 2)
        assert rep.positive_f1 == rep.f1[1]
        assert rep.support == (2, 2)

    def test_multiclass_positive_f1_none(self):
        rep = compute_report([0, 1, 2], [0, 1, 2], 3)
        assert rep.positive_f1 is None

    def test_round_trip(self):
        rep = compute_report([0, 1, 1, 0, 1], [0, 1, 1, 1, 0], 2)
        assert report_from_dict(report_to_dict(rep)) == rep


class TestAggregate:
    def test_mean_and_sample_std(self):
        reps = [
            compute_report([0, 1], [0, 1], 2),  # accuracy 1.0
            compute_report([0, 1], [0, 0], 2),  # accuracy 0.5
            compute_report([0, 1], [1, 0], 2),  # accuracy 0.0
        ]
        agg = aggregate(reps)
        assert agg.n_folds == 3
        assert abs(agg.mean["accuracy"] - 0.5) < 1e-12
        assert abs(agg.std["accuracy"] - np.std([1.0, 0.5, 0.0], ddof=1)) < 1e-12

    def test_single_fold_std_zero(self):
        agg = aggregate([compute_report([0, 1], [0, 1], 2)])
        assert agg.std["accuracy"] == 0.0

    def test_positive_f1_skipped_for_multiclass(self):
        agg = aggregate([compute_report([0, 1, 2], [0, 1, 2], 3)])
        assert "positive_f1" not in agg.mean
        assert "accuracy" in agg.mean and "mcc" in agg.mean

    def test_empty(self):
        with pytest.raises(MetricError):
            aggregate([])
