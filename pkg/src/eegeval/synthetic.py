"""Seeded synthetic dataset generator.

Each trial gets a uniformly drawn class; every channel is white Gaussian noise
plus a 10 Hz (alpha-band) sinusoid whose amplitude is the class's band-power
multiplier.  Identical spec + seed produce a byte-identical dataset tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import (
    ChannelSpec,
    DatasetManifest,
    LabelRecord,
    SessionRecord,
    SubjectRecord,
    TrialRecord,
    write_manifest,
    write_trial_signal,
    signal_relpath,
    SCHEMA_VERSION,
)
from .errors import ManifestError

ALPHA_TONE_HZ = 10.0


@dataclass(frozen=True)
class SyntheticSpec:
    n_subjects: int = 15
    n_sessions_per_subject: int = 1
    n_trials_per_session: int = 15
    n_channels: int = 14
    trial_length_s: float = 60.0
    sampling_rate_hz: float = 128.0
    label_schema: str = "dimensional"  # "dimensional" | "categorical"
    class_effect: tuple[float, ...] = (1.0, 3.0)  # alpha amplitude per class
    noise_sd: float = 1.0
    seed: int = 0
    # dimensional labels: low/high classes are drawn on either side of this
    # threshold on a 1-9 scale
    rating_threshold: float = 4.5

    def __post_init__(self):
        counts = (
            self.n_subjects,
            self.n_sessions_per_subject,
            self.n_trials_per_session,
            self.n_channels,
        )
        if any(c < 1 for c in counts):
            raise ManifestError("all synthetic counts must be >= 1")
        if self.trial_length_s <= 0 or self.sampling_rate_hz <= 0:
            raise ManifestError("trial length and sampling rate must be > 0")
        if len(self.class_effect) < 2:
            raise ManifestError("need at least 2 classes in class_effect")
        if any(m <= 0 for m in self.class_effect):
            raise ManifestError("class_effect multipliers must be > 0")
        if self.label_schema not in ("dimensional", "categorical"):
            raise ManifestError(f"unsupported synthetic label_schema {self.label_schema!r}")

    @property
    def n_classes(self) -> int:
        return len(self.class_effect)


def _make_label(spec: SyntheticSpec, cls: int, rng: np.random.Generator) -> LabelRecord:
    if spec.label_schema == "categorical":
        return LabelRecord(categorical=f"class{cls}", scale_min=1.0, scale_max=9.0)
    # binary valence/arousal around the threshold; class 0 rates low, else high
    if spec.n_classes != 2:
        raise ManifestError("dimensional synthetic labels support exactly 2 classes")
    lo, hi = (1.0, spec.rating_threshold) if cls == 0 else (
        np.nextafter(spec.rating_threshold, 9.0),
        9.0,
    )
    return LabelRecord(
        dimensional={
            "valence": float(rng.uniform(lo, hi)),
            "arousal": float(rng.uniform(lo, hi)),
        },
        scale_min=1.0,
        scale_max=9.0,
    )


def generate_synthetic(spec: SyntheticSpec, out: str | Path) -> DatasetManifest:
    """Write a complete dataset (manifest + signal files) under `out`."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    n_samples = round(spec.trial_length_s * spec.sampling_rate_hz)
    t = np.arange(n_samples) / spec.sampling_rate_hz
    channels = tuple(ChannelSpec(name=f"ch{c:02d}") for c in range(spec.n_channels))

    subjects = []
    for s in range(spec.n_subjects):
        subject_id = f"s{s + 1:02d}"
        sessions = []
        for e in range(spec.n_sessions_per_subject):
            session_id = f"sess{e + 1:02d}"
            trials = []
            for k in range(spec.n_trials_per_session):
                trial_id = f"t{k + 1:02d}"
                cls = int(rng.integers(spec.n_classes))
                label = _make_label(spec, cls, rng)
                amp = spec.class_effect[cls]
                phases = rng.uniform(0.0, 2.0 * np.pi, size=spec.n_channels)
                tone = amp * np.sin(
                    2.0 * np.pi * ALPHA_TONE_HZ * t[None, :] + phases[:, None]
                )
                noise = rng.normal(0.0, spec.noise_sd, size=(spec.n_channels, n_samples))
                relpath = signal_relpath(subject_id, session_id, trial_id)
                write_trial_signal(out / relpath, tone + noise)
                trials.append(
                    TrialRecord(
                        trial_id=trial_id,
                        signal_path=relpath,
                        n_samples=n_samples,
                        label=label,
                    )
                )
            sessions.append(SessionRecord(session_id=session_id, trials=tuple(trials)))
        subjects.append(SubjectRecord(subject_id=subject_id, sessions=tuple(sessions)))

    manifest = DatasetManifest(
        schema_version=SCHEMA_VERSION,
        dataset_name="synthetic",
        sampling_rate_hz=spec.sampling_rate_hz,
        channels=channels,
        label_schema=spec.label_schema,
        categorical_classes=tuple(f"class{c}" for c in range(spec.n_classes))
        if spec.label_schema == "categorical"
        else None,
        subjects=tuple(subjects),
        root=out,
    )
    write_manifest(manifest, out)
    return manifest


def synthetic_spec_from_dict(d: dict) -> SyntheticSpec:
    known = {f for f in SyntheticSpec.__dataclass_fields__}
    unknown = set(d) - known
    if unknown:
        raise ManifestError(f"unknown synthetic spec fields: {sorted(unknown)}")
    if "class_effect" in d:
        d = dict(d)
        d["class_effect"] = tuple(float(x) for x in d["class_effect"])
    return SyntheticSpec(**d)


def synthetic_spec_to_dict(spec: SyntheticSpec) -> dict:
    return {
        "n_subjects": spec.n_subjects,
        "n_sessions_per_subject": spec.n_sessions_per_subject,
        "n_trials_per_session": spec.n_trials_per_session,
        "n_channels": spec.n_channels,
        "trial_length_s": spec.trial_length_s,
        "sampling_rate_hz": spec.sampling_rate_hz,
        "label_schema": spec.label_schema,
        "class_effect": list(spec.class_effect),
        "noise_sd": spec.noise_sd,
        "seed": spec.seed,
        "rating_threshold": spec.rating_threshold,
    }
