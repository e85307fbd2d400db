"""Ground-truth schemes: rating binarization, quadrant labels, categorical maps.

Boundary convention everywhere: a rating less than or equal to the threshold is
"low".  On an integer 1-9 scale the default 4.5 threshold makes the boundary
unreachable, which sidesteps tie ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import LabelRecord
from .errors import LabelError

QUADRANT_NAMES = ("LALV", "LAHV", "HALV", "HAHV")

# Fixed class orders so confusion matrices are comparable across runs.
SEED_CLASSES = ("negative", "neutral", "positive")
SEED_IV_CLASSES = ("neutral", "sadness", "fear", "happiness")


@dataclass(frozen=True)
class GroundTruthScheme:
    kind: str  # "dimensional_binary" | "dimensional_quadrant" | "categorical"
    dimension: str | None = None  # binary only
    threshold: float | None = None  # binary only
    valence_threshold: float | None = None  # quadrant only
    arousal_threshold: float | None = None  # quadrant only
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == "dimensional_binary":
            if self.dimension is None or self.threshold is None:
                raise LabelError("binary scheme needs a dimension and a threshold")
            if not self.class_names:
                object.__setattr__(self, "class_names", ("low", "high"))
            if len(self.class_names) != 2:
                raise LabelError("binary scheme needs exactly 2 class names")
        elif self.kind == "dimensional_quadrant":
            if self.valence_threshold is None or self.arousal_threshold is None:
                raise LabelError("quadrant scheme needs valence and arousal thresholds")
            if not self.class_names:
                object.__setattr__(self, "class_names", QUADRANT_NAMES)
            if len(self.class_names) != 4:
                raise LabelError("quadrant scheme needs exactly 4 class names")
        elif self.kind == "categorical":
            if not self.class_names:
                raise LabelError("categorical scheme needs class names")
        else:
            raise LabelError(f"unknown scheme kind {self.kind!r}")

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class ClassLabel:
    index: int
    name: str

    def __post_init__(self):
        if self.index < 0:
            raise LabelError("class index must be >= 0")


@dataclass(frozen=True)
class ClassDistribution:
    counts: tuple[int, ...]
    proportions: tuple[float, ...]


def _check_scale(rating: float, scale_min: float, scale_max: float) -> None:
    if not (scale_min <= rating <= scale_max):
        raise LabelError(f"rating {rating} outside scale [{scale_min}, {scale_max}]")


def binarize(
    rating: float,
    threshold: float,
    scale_min: float = 1.0,
    scale_max: float = 9.0,
    class_names: tuple[str, str] = ("low", "high"),
) -> ClassLabel:
    """rating <= threshold -> class 0 (low); rating > threshold -> class 1 (high)."""
    _check_scale(rating, scale_min, scale_max)
    idx = int(rating > threshold)
    return ClassLabel(index=idx, name=class_names[idx])


def quadrantize(
    valence: float,
    arousal: float,
    valence_threshold: float,
    arousal_threshold: float,
    scale_min: float = 1.0,
    scale_max: float = 9.0,
    class_names: tuple[str, ...] = QUADRANT_NAMES,
) -> ClassLabel:
    """Four-class valence/arousal quadrant: index = 2*(arousal high) + (valence high)."""
    _check_scale(valence, scale_min, scale_max)
    _check_scale(arousal, scale_min, scale_max)
    idx = 2 * int(arousal > arousal_threshold) + int(valence > valence_threshold)
    return ClassLabel(index=idx, name=class_names[idx])


def map_categorical(raw: str, scheme: GroundTruthScheme) -> ClassLabel:
    """Map a categorical tag to its position in the scheme's class list."""
    lowered = [c.lower() for c in scheme.class_names]
    try:
        idx = lowered.index(raw.lower())
    except ValueError:
        raise LabelError(
            f"unknown class {raw!r}; expected one of {list(scheme.class_names)}"
        ) from None
    return ClassLabel(index=idx, name=scheme.class_names[idx])


def label_trial(label: LabelRecord, scheme: GroundTruthScheme) -> ClassLabel:
    """Apply a scheme to one trial's raw label record."""
    if scheme.kind == "dimensional_binary":
        if scheme.dimension not in label.dimensional:
            raise LabelError(f"trial has no {scheme.dimension!r} rating")
        return binarize(
            label.dimensional[scheme.dimension],
            scheme.threshold,
            label.scale_min,
            label.scale_max,
            class_names=scheme.class_names,
        )
    if scheme.kind == "dimensional_quadrant":
        for dim in ("valence", "arousal"):
            if dim not in label.dimensional:
                raise LabelError(f"trial has no {dim!r} rating")
        return quadrantize(
            label.dimensional["valence"],
            label.dimensional["arousal"],
            scheme.valence_threshold,
            scheme.arousal_threshold,
            label.scale_min,
            label.scale_max,
            class_names=scheme.class_names,
        )
    if label.categorical is None:
        raise LabelError("trial has no categorical label")
    return map_categorical(label.categorical, scheme)


def class_distribution(labels, n_classes: int) -> ClassDistribution:
    """Exact counts and proportions over a nonempty label list."""
    if len(labels) == 0:
        raise LabelError("cannot compute a distribution over zero labels")
    indices = np.array([lb.index if isinstance(lb, ClassLabel) else int(lb) for lb in labels])
    if indices.min() < 0 or indices.max() >= n_classes:
        raise LabelError("label index outside [0, n_classes)")
    counts = np.bincount(indices, minlength=n_classes)
    props = counts / counts.sum()
    return ClassDistribution(counts=tuple(int(c) for c in counts), proportions=tuple(props))


def scheme_to_dict(scheme: GroundTruthScheme) -> dict:
    return {
        "kind": scheme.kind,
        "dimension": scheme.dimension,
        "threshold": scheme.threshold,
        "valence_threshold": scheme.valence_threshold,
        "arousal_threshold": scheme.arousal_threshold,
        "class_names": list(scheme.class_names),
    }


def scheme_from_dict(d: dict) -> GroundTruthScheme:
    return GroundTruthScheme(
        kind=d["kind"],
        dimension=d.get("dimension"),
        threshold=d.get("threshold"),
        valence_threshold=d.get("valence_threshold"),
        arousal_threshold=d.get("arousal_threshold"),
        class_names=tuple(d.get("class_names") or ()),
    )
