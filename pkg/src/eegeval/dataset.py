"""Canonical dataset interchange format: manifest loading, validation, signal IO.

A dataset on disk is a `manifest.json` at the root plus one raw signal file per
trial at ``<root>/<subject_id>/<session_id>/<trial_id>.f32raw``.  Signal files
are little-endian IEEE-754 float32, channel-major (all samples of channel 0,
then channel 1, ...), in microvolts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ManifestError, SignalReadError

SCHEMA_VERSION = 1

DIMENSIONS = ("valence", "arousal", "dominance", "liking", "familiarity", "predictability")


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    kind: str = "eeg"  # "eeg" | "peripheral"

    def __post_init__(self):
        if not self.name:
            raise ManifestError("channel name must be nonempty")
        if self.kind not in ("eeg", "peripheral"):
            raise ManifestError(f"unknown channel kind {self.kind!r}")


@dataclass(frozen=True)
class LabelRecord:
    """Self-assessment ratings and/or a categorical tag for one trial."""

    dimensional: dict[str, float] = field(default_factory=dict)
    categorical: str | None = None
    scale_min: float = 1.0
    scale_max: float = 9.0

    def __post_init__(self):
        if not self.dimensional and self.categorical is None:
            raise ManifestError("label needs at least one of dimensional/categorical")
        for dim, r in self.dimensional.items():
            if dim not in DIMENSIONS:
                raise ManifestError(f"unknown rating dimension {dim!r}")
            if not (self.scale_min <= r <= self.scale_max):
                raise ManifestError(
                    f"rating {dim}={r} outside scale [{self.scale_min}, {self.scale_max}]"
                )


@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    signal_path: str  # relative to the manifest root
    n_samples: int
    label: LabelRecord

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ManifestError(f"trial {self.trial_id!r}: n_samples must be > 0")
        if Path(self.signal_path).is_absolute() or ".." in Path(self.signal_path).parts:
            raise ManifestError(f"trial {self.trial_id!r}: signal_path must stay under the root")


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    trials: tuple[TrialRecord, ...]

    def __post_init__(self):
        if not self.trials:
            raise ManifestError(f"session {self.session_id!r} has no trials")
        ids = [t.trial_id for t in self.trials]
        if len(set(ids)) != len(ids):
            raise ManifestError(f"session {self.session_id!r}: duplicate trial ids")


@dataclass(frozen=True)
class SubjectRecord:
    subject_id: str
    sessions: tuple[SessionRecord, ...]

    def __post_init__(self):
        if not self.sessions:
            raise ManifestError(f"subject {self.subject_id!r} has no sessions")
        ids = [s.session_id for s in self.sessions]
        if len(set(ids)) != len(ids):
            raise ManifestError(f"subject {self.subject_id!r}: duplicate session ids")


@dataclass(frozen=True)
class DatasetManifest:
    schema_version: int
    dataset_name: str
    sampling_rate_hz: float
    channels: tuple[ChannelSpec, ...]
    label_schema: str  # "dimensional" | "categorical" | "both"
    subjects: tuple[SubjectRecord, ...]
    categorical_classes: tuple[str, ...] | None = None
    root: Path | None = None  # set when loaded from disk

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ManifestError(f"unsupported schema_version {self.schema_version}")
        if self.sampling_rate_hz <= 0:
            raise ManifestError("sampling_rate_hz must be > 0")
        if self.label_schema not in ("dimensional", "categorical", "both"):
            raise ManifestError(f"unknown label_schema {self.label_schema!r}")
        names = [c.name for c in self.channels]
        if len(set(names)) != len(names):
            raise ManifestError("duplicate channel names")
        sids = [s.subject_id for s in self.subjects]
        if len(set(sids)) != len(sids):
            dup = sorted({i for i in sids if sids.count(i) > 1})
            raise ManifestError(f"duplicate subject ids: {dup}")

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def channel_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.channels)

    def iter_trials(self):
        """Yield (subject, session, trial) triples in manifest order."""
        for subj in self.subjects:
            for sess in subj.sessions:
                for trial in sess.trials:
                    yield subj, sess, trial

    def find_trial(self, subject_id: str, session_id: str, trial_id: str) -> TrialRecord:
        for subj in self.subjects:
            if subj.subject_id != subject_id:
                continue
            for sess in subj.sessions:
                if sess.session_id != session_id:
                    continue
                for trial in sess.trials:
                    if trial.trial_id == trial_id:
                        return trial
                raise ManifestError(f"unknown trial id {trial_id!r}")
            raise ManifestError(f"unknown session id {session_id!r}")
        raise ManifestError(f"unknown subject id {subject_id!r}")


@dataclass(frozen=True)
class SignalBlock:
    """One trial's multichannel series; ``data`` has shape (n_channels, n_samples)."""

    channels: tuple[str, ...]
    data: np.ndarray
    sampling_rate_hz: float

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] != len(self.channels):
            raise SignalReadError(
                f"data shape {self.data.shape} does not match {len(self.channels)} channels"
            )
        if self.sampling_rate_hz <= 0:
            raise SignalReadError("sampling_rate_hz must be > 0")

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sampling_rate_hz


@dataclass(frozen=True)
class Finding:
    subject_id: str
    session_id: str
    trial_id: str
    problem: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings


# ---------------------------------------------------------------------------
# serialization


def _label_to_dict(label: LabelRecord) -> dict:
    return {
        "dimensional": dict(label.dimensional),
        "categorical": label.categorical,
        "scale_min": label.scale_min,
        "scale_max": label.scale_max,
    }


def _label_from_dict(d: dict) -> LabelRecord:
    return LabelRecord(
        dimensional=dict(d.get("dimensional") or {}),
        categorical=d.get("categorical"),
        scale_min=float(d.get("scale_min", 1.0)),
        scale_max=float(d.get("scale_max", 9.0)),
    )


def manifest_to_dict(manifest: DatasetManifest) -> dict:
    return {
        "schema_version": manifest.schema_version,
        "dataset_name": manifest.dataset_name,
        "sampling_rate_hz": manifest.sampling_rate_hz,
        "channels": [{"name": c.name, "kind": c.kind} for c in manifest.channels],
        "label_schema": manifest.label_schema,
        "categorical_classes": list(manifest.categorical_classes)
        if manifest.categorical_classes
        else None,
        "subjects": [
            {
                "subject_id": subj.subject_id,
                "sessions": [
                    {
                        "session_id": sess.session_id,
                        "trials": [
                            {
                                "trial_id": t.trial_id,
                                "signal_path": t.signal_path,
                                "n_samples": t.n_samples,
                                "label": _label_to_dict(t.label),
                            }
                            for t in sess.trials
                        ],
                    }
                    for sess in subj.sessions
                ],
            }
            for subj in manifest.subjects
        ],
    }


def manifest_from_dict(d: dict, root: Path | None = None) -> DatasetManifest:
    try:
        subjects = tuple(
            SubjectRecord(
                subject_id=subj["subject_id"],
                sessions=tuple(
                    SessionRecord(
                        session_id=sess["session_id"],
                        trials=tuple(
                            TrialRecord(
                                trial_id=t["trial_id"],
                                signal_path=t["signal_path"],
                                n_samples=int(t["n_samples"]),
                                label=_label_from_dict(t["label"]),
                            )
                            for t in sess["trials"]
                        ),
                    )
                    for sess in subj["sessions"]
                ),
            )
            for subj in d["subjects"]
        )
        return DatasetManifest(
            schema_version=int(d["schema_version"]),
            dataset_name=d["dataset_name"],
            sampling_rate_hz=float(d["sampling_rate_hz"]),
            channels=tuple(
                ChannelSpec(name=c["name"], kind=c.get("kind", "eeg")) for c in d["channels"]
            ),
            label_schema=d["label_schema"],
            categorical_classes=tuple(d["categorical_classes"])
            if d.get("categorical_classes")
            else None,
            subjects=subjects,
            root=root,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"malformed manifest: {exc}") from exc


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and structurally validate `manifest.json`; never touches signal files."""
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return manifest_from_dict(doc, root=path.parent)
    except ManifestError as exc:
        raise ManifestError(f"{path}: {exc}") from exc


def write_manifest(manifest: DatasetManifest, root: str | Path) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    out = root / "manifest.json"
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(manifest_to_dict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


# ---------------------------------------------------------------------------
# signal IO

BYTES_PER_SAMPLE = 4  # float32


def signal_relpath(subject_id: str, session_id: str, trial_id: str) -> str:
    return f"{subject_id}/{session_id}/{trial_id}.f32raw"


def write_trial_signal(path: Path, data: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.asarray(data, dtype="<f4").tofile(path)


def read_trial_signal(
    manifest: DatasetManifest, subject_id: str, session_id: str, trial_id: str
) -> SignalBlock:
    """Read one trial's raw file and decode it into a SignalBlock."""
    if manifest.root is None:
        raise SignalReadError("manifest has no on-disk root")
    trial = manifest.find_trial(subject_id, session_id, trial_id)
    path = manifest.root / trial.signal_path
    expected = manifest.n_channels * trial.n_samples * BYTES_PER_SAMPLE
    if not path.is_file():
        raise SignalReadError(f"signal file missing: {path}")
    actual = path.stat().st_size
    if actual != expected:
        raise SignalReadError(f"{path}: expected {expected} bytes, found {actual}")
    raw = np.fromfile(path, dtype="<f4")
    data = raw.reshape(manifest.n_channels, trial.n_samples).astype(np.float64)
    return SignalBlock(
        channels=manifest.channel_names,
        data=data,
        sampling_rate_hz=manifest.sampling_rate_hz,
    )


def validate_manifest(manifest: DatasetManifest, root: str | Path | None = None) -> ValidationReport:
    """Check every trial's file presence, byte length, and rating bounds.

    Findings are data, not exceptions; ``report.ok`` is True iff there are none.
    """
    root = Path(root) if root is not None else manifest.root
    if root is None:
        raise ManifestError("no dataset root to validate against")
    findings: list[Finding] = []
    for subj, sess, trial in manifest.iter_trials():
        where = (subj.subject_id, sess.session_id, trial.trial_id)
        path = root / trial.signal_path
        if not path.is_file():
            findings.append(Finding(*where, f"signal file missing: {trial.signal_path}"))
        else:
            expected = manifest.n_channels * trial.n_samples * BYTES_PER_SAMPLE
            actual = path.stat().st_size
            if actual != expected:
                findings.append(
                    Finding(*where, f"byte length {actual} != expected {expected}")
                )
        label = trial.label
        for dim, r in label.dimensional.items():
            if not (label.scale_min <= r <= label.scale_max):
                findings.append(
                    Finding(
                        *where,
                        f"rating {dim}={r} outside scale [{label.scale_min}, {label.scale_max}]",
                    )
                )
    return ValidationReport(findings=tuple(findings))


# ---------------------------------------------------------------------------
# summary


@dataclass(frozen=True)
class SummaryStats:
    dataset_name: str
    n_subjects: int
    trials_per_subject: dict[str, int]
    n_channels: int
    sampling_rate_hz: float
    total_trial_seconds: float
    class_distribution: "object | None" = None  # labeling.ClassDistribution when a scheme is given


def dataset_summary(manifest: DatasetManifest, scheme=None) -> SummaryStats:
    """Headline counts for a manifest, optionally with the class balance a
    ground-truth scheme would induce."""
    trials_per_subject = {
        subj.subject_id: sum(len(sess.trials) for sess in subj.sessions)
        for subj in manifest.subjects
    }
    total_samples = sum(t.n_samples for _, _, t in manifest.iter_trials())
    dist = None
    if scheme is not None:
        from .labeling import class_distribution, label_trial

        labels = [label_trial(t.label, scheme) for _, _, t in manifest.iter_trials()]
        dist = class_distribution(labels, len(scheme.class_names))
    return SummaryStats(
        dataset_name=manifest.dataset_name,
        n_subjects=len(manifest.subjects),
        trials_per_subject=trials_per_subject,
        n_channels=manifest.n_channels,
        sampling_rate_hz=manifest.sampling_rate_hz,
        total_trial_seconds=total_samples / manifest.sampling_rate_hz,
        class_distribution=dist,
    )
