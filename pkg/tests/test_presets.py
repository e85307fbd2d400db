import pytest

from eegeval.labeling import SEED_CLASSES, SEED_IV_CLASSES
from eegeval.presets import DEFAULT_SCHEMES, PRESETS, get_preset
from eegeval.transform import (
    BandpassSpec,
    ChannelDropSpec,
    CropSpec,
    NotchSpec,
    ResampleSpec,
    WindowSpec,
)


def steps_of_kind(preset, cls):
    return [s for s in PRESETS[preset].steps if isinstance(s, cls)]


class TestPresetTable:
    def test_all_presets_have_schemes(self):
        assert set(PRESETS) == set(DEFAULT_SCHEMES)

    def test_all_end_with_128hz_4s_windows(self):
        for name, spec in PRESETS.items():
            assert isinstance(spec.steps[-1], WindowSpec), name
            assert spec.steps[-1] == WindowSpec(size_s=4.0, overlap_s=0.0)
            (res,) = [s for s in spec.steps if isinstance(s, ResampleSpec)]
            assert res.fs_out_hz == 128.0

    def test_mahnob_recipe(self):
        (crop,) = steps_of_kind("mahnob_hci", CropSpec)
        assert (crop.pre_s, crop.post_s) == (30.0, 30.0)
        (drop,) = steps_of_kind("mahnob_hci", ChannelDropSpec)
        assert len(drop.names) == 15
        assert "Status" in drop.names and "Erg2" in drop.names
        (bp,) = steps_of_kind("mahnob_hci", BandpassSpec)
        assert (bp.lo_hz, bp.hi_hz) == (0.3, 45.0)
        (notch,) = steps_of_kind("mahnob_hci", NotchSpec)
        assert notch.f0_hz == 50.0

    def test_deap_recipe(self):
        (crop,) = steps_of_kind("deap", CropSpec)
        assert (crop.pre_s, crop.post_s) == (3.0, 0.0)
        (drop,) = steps_of_kind("deap", ChannelDropSpec)
        assert len(drop.names) == 8
        assert not steps_of_kind("deap", BandpassSpec)

    def test_amigos_drops_peripherals(self):
        (drop,) = steps_of_kind("amigos", ChannelDropSpec)
        assert set(drop.names) == {"ECG_Right", "ECG_Left", "GSR"}
        assert not steps_of_kind("amigos", CropSpec)

    def test_seed_family_bandpass_only(self):
        for name in ("seed", "seed_iv", "dreamer"):
            (bp,) = steps_of_kind(name, BandpassSpec)
            assert (bp.lo_hz, bp.hi_hz) == (0.3, 45.0)
            assert not steps_of_kind(name, ChannelDropSpec)
            assert not steps_of_kind(name, CropSpec)

    def test_deap_validation_variant(self):
        (bp,) = steps_of_kind("deap_loto_validation", BandpassSpec)
        assert (bp.lo_hz, bp.hi_hz) == (4.0, 45.0)
        (drop,) = steps_of_kind("deap_loto_validation", ChannelDropSpec)
        for extra in ("Oz", "Pz", "Fz", "Cz"):
            assert extra in drop.names
        assert not steps_of_kind("deap_loto_validation", NotchSpec)
        assert DEFAULT_SCHEMES["deap_loto_validation"].threshold == 5.0


class TestDefaultSchemes:
    def test_dimensional_thresholds(self):
        for name in ("mahnob_hci", "deap", "amigos"):
            scheme = DEFAULT_SCHEMES[name]
            assert scheme.kind == "dimensional_binary"
            assert scheme.dimension == "valence"
            assert scheme.threshold == 4.5
        assert DEFAULT_SCHEMES["dreamer"].threshold == 3.0

    def test_categorical_orders(self):
        assert DEFAULT_SCHEMES["seed"].class_names == SEED_CLASSES
        assert DEFAULT_SCHEMES["seed_iv"].class_names == SEED_IV_CLASSES


class TestGetPreset:
    def test_known(self):
        assert get_preset("deap") is PRESETS["deap"]

    def test_unknown(self):
        with pytest.raises(KeyError, match="nope"):
            get_preset("nope")
