"""Named preprocessing recipes, one per supported dataset layout.

Each recipe follows the same column order as it is usually reported (crop,
channel drop, band-pass, notch), then resamples to 128 Hz and windows at
4 s / 0 s overlap.  `DEFAULT_SCHEMES` carries the matching ground-truth
defaults: 4.5 on 1-9 scales, 3.0 on the 1-5 scale, fixed categorical orders.

`deap_loto_validation` is the alternative DEAP recipe used for
subject-dependent validation (3 s crop, 4-45 Hz band-pass, extra midline
channels dropped, threshold 5); it intentionally differs from the `deap`
subject-independent recipe.
"""

from __future__ import annotations

from .labeling import SEED_CLASSES, SEED_IV_CLASSES, GroundTruthScheme
from .transform import (
    BandpassSpec,
    ChannelDropSpec,
    CropSpec,
    NotchSpec,
    ResampleSpec,
    TransformSpec,
    WindowSpec,
)

_RESAMPLE = ResampleSpec(fs_out_hz=128.0)
_WINDOW = WindowSpec(size_s=4.0, overlap_s=0.0)

_MAHNOB_DROP = (
    "EXG1", "EXG2", "EXG3", "EXG4", "EXG5", "EXG6", "EXG7", "EXG8",
    "GSR1", "GSR2", "Erg1", "Erg2", "Resp", "Temp", "Status",
)
_DEAP_DROP = ("EXG1", "EXG2", "EXG3", "EXG4", "GSR1", "Plet", "Resp", "Temp")
_AMIGOS_DROP = ("ECG_Right", "ECG_Left", "GSR")
_DEAP_VALIDATION_DROP = _DEAP_DROP + ("Oz", "Pz", "Fz", "Cz")

PRESETS: dict[str, TransformSpec] = {
    "mahnob_hci": TransformSpec(
        steps=(
            CropSpec(pre_s=30.0, post_s=30.0),
            ChannelDropSpec(names=_MAHNOB_DROP),
            BandpassSpec(lo_hz=0.3, hi_hz=45.0, order=4),
            NotchSpec(f0_hz=50.0),
            _RESAMPLE,
            _WINDOW,
        )
    ),
    "deap": TransformSpec(
        steps=(
            CropSpec(pre_s=3.0, post_s=0.0),
            ChannelDropSpec(names=_DEAP_DROP),
            NotchSpec(f0_hz=50.0),
            _RESAMPLE,
            _WINDOW,
        )
    ),
    "amigos": TransformSpec(
        steps=(
            ChannelDropSpec(names=_AMIGOS_DROP),
            NotchSpec(f0_hz=50.0),
            _RESAMPLE,
            _WINDOW,
        )
    ),
    "dreamer": TransformSpec(
        steps=(
            BandpassSpec(lo_hz=0.3, hi_hz=45.0, order=4),
            NotchSpec(f0_hz=50.0),
            _RESAMPLE,
            _WINDOW,
        )
    ),
    "seed": TransformSpec(
        steps=(
            BandpassSpec(lo_hz=0.3, hi_hz=45.0, order=4),
            NotchSpec(f0_hz=50.0),
            _RESAMPLE,
            _WINDOW,
        )
    ),
    "seed_iv": TransformSpec(
        steps=(
            BandpassSpec(lo_hz=0.3, hi_hz=45.0, order=4),
            NotchSpec(f0_hz=50.0),
            _RESAMPLE,
            _WINDOW,
        )
    ),
    "deap_loto_validation": TransformSpec(
        steps=(
            CropSpec(pre_s=3.0, post_s=0.0),
            ChannelDropSpec(names=_DEAP_VALIDATION_DROP),
            BandpassSpec(lo_hz=4.0, hi_hz=45.0, order=4),
            _RESAMPLE,
            _WINDOW,
        )
    ),
}

DEFAULT_SCHEMES: dict[str, GroundTruthScheme] = {
    "mahnob_hci": GroundTruthScheme(
        kind="dimensional_binary", dimension="valence", threshold=4.5
    ),
    "deap": GroundTruthScheme(kind="dimensional_binary", dimension="valence", threshold=4.5),
    "amigos": GroundTruthScheme(kind="dimensional_binary", dimension="valence", threshold=4.5),
    "dreamer": GroundTruthScheme(kind="dimensional_binary", dimension="valence", threshold=3.0),
    "seed": GroundTruthScheme(kind="categorical", class_names=SEED_CLASSES),
    "seed_iv": GroundTruthScheme(kind="categorical", class_names=SEED_IV_CLASSES),
    "deap_loto_validation": GroundTruthScheme(
        kind="dimensional_binary", dimension="valence", threshold=5.0
    ),
}


def get_preset(name: str) -> TransformSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; have {sorted(PRESETS)}") from None
