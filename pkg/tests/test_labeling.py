import numpy as np
import pytest

from eegeval.dataset import LabelRecord
from eegeval.errors import LabelError
from eegeval.labeling import (
    QUADRANT_NAMES,
    SEED_CLASSES,
    SEED_IV_CLASSES,
    ClassLabel,
    GroundTruthScheme,
    binarize,
    class_distribution,
    label_trial,
    map_categorical,
    quadrantize,
    scheme_from_dict,
    scheme_to_dict,
)


class TestBinarize:
    def test_boundary_is_low(self):
        assert binarize(4.5, 4.5).index == 0
        assert binarize(4.5, 4.5).name == "low"

    def test_just_above_is_high(self):
        assert binarize(np.nextafter(4.5, 9.0), 4.5) == ClassLabel(1, "high")

    def test_extremes(self):
        assert binarize(1.0, 4.5).index == 0
        assert binarize(9.0, 4.5).index == 1

    def test_dreamer_scale(self):
        assert binarize(3.0, 3.0, scale_min=1.0, scale_max=5.0).index == 0
        assert binarize(4.0, 3.0, scale_min=1.0, scale_max=5.0).index == 1

    def test_out_of_scale(self):
        with pytest.raises(LabelError):
            binarize(9.5, 4.5)
        with pytest.raises(LabelError):
            binarize(0.5, 4.5)

    def test_threshold_5_integer_sweep(self):
        # brute-force oracle on the 1..9 integer ratings
        for r in range(1, 10):
            assert binarize(float(r), 5.0).index == (1 if r > 5 else 0)


class TestQuadrantize:
    @pytest.mark.parametrize(
        "valence,arousal,expected",
        [
            (2.0, 2.0, "LALV"),
            (8.0, 2.0, "LAHV"),
            (2.0, 8.0, "HALV"),
            (8.0, 8.0, "HAHV"),
        ],
    )
    def test_quadrants(self, valence, arousal, expected):
        lab = quadrantize(valence, arousal, 4.5, 4.5)
        assert lab.name == expected
        assert QUADRANT_NAMES[lab.index] == expected

    def test_index_formula(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            v, a = rng.uniform(1.0, 9.0, size=2)
            lab = quadrantize(v, a, 4.5, 4.5)
            assert lab.index == 2 * (a > 4.5) + (v > 4.5)

    def test_both_on_boundary(self):
        assert quadrantize(4.5, 4.5, 4.5, 4.5).name == "LALV"


class TestCategorical:
    def test_seed(self):
        scheme = GroundTruthScheme(kind="categorical", class_names=SEED_CLASSES)
        assert map_categorical("positive", scheme) == ClassLabel(2, "positive")
        assert map_categorical("negative", scheme).index == 0

    def test_seed_iv(self):
        scheme = GroundTruthScheme(kind="categorical", class_names=SEED_IV_CLASSES)
        assert map_categorical("fear", scheme).index == 2

    def test_case_insensitive(self):
        scheme = GroundTruthScheme(kind="categorical", class_names=SEED_CLASSES)
        assert map_categorical("Neutral", scheme).index == 1

    def test_unknown(self):
        scheme = GroundTruthScheme(kind="categorical", class_names=SEED_CLASSES)
        with pytest.raises(LabelError, match="bored"):
            map_categorical("bored", scheme)


class TestScheme:
    def test_binary_defaults(self):
        s = GroundTruthScheme(kind="dimensional_binary", dimension="valence", threshold=4.5)
        assert s.class_names == ("low", "high")
        assert s.n_classes == 2

    def test_quadrant_defaults(self):
        s = GroundTruthScheme(
            kind="dimensional_quadrant", valence_threshold=4.5, arousal_threshold=4.5
        )
        assert s.class_names == QUADRANT_NAMES

    def test_invalid(self):
        with pytest.raises(LabelError):
            GroundTruthScheme(kind="dimensional_binary", dimension="valence")
        with pytest.raises(LabelError):
            GroundTruthScheme(kind="categorical")
        with pytest.raises(LabelError):
            GroundTruthScheme(kind="wavelet")

    def test_round_trip(self):
        for s in (
            GroundTruthScheme(kind="dimensional_binary", dimension="arousal", threshold=5.0),
            GroundTruthScheme(
                kind="dimensional_quadrant", valence_threshold=4.5, arousal_threshold=4.5
            ),
            GroundTruthScheme(kind="categorical", class_names=SEED_IV_CLASSES),
        ):
            assert scheme_from_dict(scheme_to_dict(s)) == s


class TestLabelTrial:
    def _rec(self, **kw):
        defaults = dict(dimensional={}, categorical=None, scale_min=1.0, scale_max=9.0)
        defaults.update(kw)
        return LabelRecord(**defaults)

    def test_binary(self):
        scheme = GroundTruthScheme(kind="dimensional_binary", dimension="valence", threshold=4.5)
        rec = self._rec(dimensional={"valence": 6.0, "arousal": 2.0})
        assert label_trial(rec, scheme).index == 1

    def test_missing_dimension(self):
        scheme = GroundTruthScheme(kind="dimensional_binary", dimension="dominance", threshold=4.5)
        with pytest.raises(LabelError, match="dominance"):
            label_trial(self._rec(dimensional={"valence": 6.0}), scheme)

    def test_quadrant(self):
        scheme = GroundTruthScheme(
            kind="dimensional_quadrant", valence_threshold=4.5, arousal_threshold=4.5
        )
        rec = self._rec(dimensional={"valence": 2.0, "arousal": 8.0})
        assert label_trial(rec, scheme).name == "HALV"

    def test_categorical_missing(self):
        scheme = GroundTruthScheme(kind="categorical", class_names=SEED_CLASSES)
        with pytest.raises(LabelError):
            label_trial(self._rec(dimensional={"valence": 5.0}), scheme)


class TestClassDistribution:
    def test_counts_and_proportions(self):
        labels = [0, 1, 1, 0, 1]
        dist = class_distribution(labels, 2)
        assert dist.counts == (2, 3)
        assert dist.proportions == (0.4, 0.6)

    def test_absent_class(self):
        dist = class_distribution([0, 0], 3)
        assert dist.counts == (2, 0, 0)

    def test_classlabel_inputs(self):
        labels = [ClassLabel(1, "high"), ClassLabel(0, "low")]
        assert class_distribution(labels, 2).counts == (1, 1)

    def test_random_brute_force(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n_classes = int(rng.integers(2, 6))
            labels = rng.integers(0, n_classes, size=int(rng.integers(1, 200))).tolist()
            dist = class_distribution(labels, n_classes)
            for c in range(n_classes):
                assert dist.counts[c] == sum(1 for x in labels if x == c)
            assert abs(sum(dist.proportions) - 1.0) < 1e-12

    def test_empty(self):
        with pytest.raises(LabelError):
            class_distribution([], 2)

    def test_out_of_range(self):
        with pytest.raises(LabelError):
            class_distribution([0, 3], 2)
