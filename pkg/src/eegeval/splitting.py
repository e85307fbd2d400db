"""Leakage-safe cross-validation planning.

Folds are planned over whole units (subjects, trials, or sessions) before any
window ever exists; windows are then routed to the side their parent unit
belongs to, so overlapping windows from one trial can never straddle a split.

Unit id formats: subjects "s01"; sessions "s01/sess01"; trials
"s01/sess01/t03".
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import DatasetManifest
from .errors import SplitError
from .transform import WindowSegment


@dataclass(frozen=True)
class SplitScheme:
    kind: str  # "loso" | "lkso" | "loto" | "lkto" | "leave_one_session_out" | "fixed"
    k: int = 1  # lkso/lkto group size
    train_ids: tuple[str, ...] = ()  # fixed only (subject ids)
    test_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("loso", "lkso", "loto", "lkto", "leave_one_session_out", "fixed"):
            raise SplitError(f"unknown split kind {self.kind!r}")
        if self.kind in ("lkso", "lkto") and self.k < 1:
            raise SplitError("k must be >= 1")
        if self.kind == "fixed":
            if not self.train_ids or not self.test_ids:
                raise SplitError("fixed split needs nonempty train and test id sets")
            if set(self.train_ids) & set(self.test_ids):
                raise SplitError("fixed split train/test ids overlap")

    @property
    def unit(self) -> str:
        if self.kind in ("loso", "lkso", "fixed"):
            return "subject"
        if self.kind in ("loto", "lkto"):
            return "trial"
        return "session"


@dataclass(frozen=True)
class FoldPlan:
    fold_index: int
    unit: str  # "subject" | "trial" | "session"
    train_units: frozenset[str]
    test_units: frozenset[str]
    scope: str | None = None  # owning subject for subject-dependent schemes

    def __post_init__(self):
        if not self.test_units:
            raise SplitError("fold has an empty test set")
        if self.train_units & self.test_units:
            raise SplitError("fold train/test units overlap")


@dataclass(frozen=True)
class TrainValSplit:
    train_units: tuple[str, ...]
    val_units: tuple[str, ...]
    ratio: float


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _subject_ids(manifest: DatasetManifest) -> list[str]:
    return [s.subject_id for s in manifest.subjects]


def _trial_units_of_subject(subj) -> list[str]:
    return [
        f"{subj.subject_id}/{sess.session_id}/{t.trial_id}"
        for sess in subj.sessions
        for t in sess.trials
    ]


def plan_folds(manifest: DatasetManifest, scheme: SplitScheme) -> list[FoldPlan]:
    """Produce the fold plans for a scheme, deterministically (no RNG)."""
    folds: list[FoldPlan] = []
    if scheme.kind in ("loso", "lkso"):
        subjects = _subject_ids(manifest)
        k = 1 if scheme.kind == "loso" else scheme.k
        if len(subjects) < 2 or k >= len(subjects):
            raise SplitError(
                f"{scheme.kind} needs more subjects than k={k}; have {len(subjects)}"
            )
        ordered = sorted(subjects)
        for i, start in enumerate(range(0, len(ordered), k)):
            test = frozenset(ordered[start : start + k])
            folds.append(
                FoldPlan(
                    fold_index=i,
                    unit="subject",
                    train_units=frozenset(ordered) - test,
                    test_units=test,
                )
            )
    elif scheme.kind in ("loto", "lkto"):
        k = 1 if scheme.kind == "loto" else scheme.k
        i = 0
        for subj in manifest.subjects:
            units = sorted(_trial_units_of_subject(subj))
            if len(units) < 2 or k >= len(units):
                raise SplitError(
                    f"{scheme.kind} needs more trials than k={k} for subject "
                    f"{subj.subject_id!r}; have {len(units)}"
                )
            for start in range(0, len(units), k):
                test = frozenset(units[start : start + k])
                folds.append(
                    FoldPlan(
                        fold_index=i,
                        unit="trial",
                        train_units=frozenset(units) - test,
                        test_units=test,
                        scope=subj.subject_id,
                    )
                )
                i += 1
    elif scheme.kind == "leave_one_session_out":
        i = 0
        for subj in manifest.subjects:
            units = sorted(f"{subj.subject_id}/{s.session_id}" for s in subj.sessions)
            if len(units) < 2:
                raise SplitError(
                    f"leave_one_session_out needs >= 2 sessions for subject "
                    f"{subj.subject_id!r}; have {len(units)}"
                )
            for unit in units:
                folds.append(
                    FoldPlan(
                        fold_index=i,
                        unit="session",
                        train_units=frozenset(units) - {unit},
                        test_units=frozenset({unit}),
                        scope=subj.subject_id,
                    )
                )
                i += 1
    else:  # fixed
        known = set(_subject_ids(manifest))
        unknown = (set(scheme.train_ids) | set(scheme.test_ids)) - known
        if unknown:
            raise SplitError(f"fixed split references unknown subjects: {sorted(unknown)}")
        folds.append(
            FoldPlan(
                fold_index=0,
                unit="subject",
                train_units=frozenset(scheme.train_ids),
                test_units=frozenset(scheme.test_ids),
            )
        )
    return folds


def train_val_split(
    units_with_labels: list[tuple[str, int]], ratio: float, seed: int
) -> TrainValSplit:
    """Class-balanced train/validation subdivision of trial units.

    Per class, floor(count*ratio) units go to train via a seeded shuffle (with
    at least one unit left for validation when the class has >= 2); the rest
    go to validation.  A single-unit class goes entirely to train with a
    warning.
    """
    if not (0 < ratio < 1):
        raise SplitError(f"ratio must be in (0, 1), got {ratio}")
    by_class: dict[int, list[str]] = {}
    for unit, cls in units_with_labels:
        by_class.setdefault(cls, []).append(unit)
    rng = np.random.default_rng(seed)
    train: list[str] = []
    val: list[str] = []
    for cls in sorted(by_class):
        members = sorted(by_class[cls])
        perm = rng.permutation(len(members))
        shuffled = [members[i] for i in perm]
        n_train = int(len(members) * ratio)
        if len(members) >= 2:
            n_train = min(max(n_train, 1), len(members) - 1)
        else:
            n_train = 1
            warnings.warn(
                f"class {cls} has a single unit; it goes to train and is "
                f"absent from validation",
                stacklevel=2,
            )
        train.extend(shuffled[:n_train])
        val.extend(shuffled[n_train:])
    return TrainValSplit(train_units=tuple(train), val_units=tuple(val), ratio=ratio)


def _window_unit(segment: WindowSegment, unit: str) -> str:
    if unit == "subject":
        return segment.subject_id
    if unit == "session":
        return f"{segment.subject_id}/{segment.session_id}"
    return segment.trial_key


def materialize_fold(
    fold: FoldPlan, windows: list[WindowSegment], allow_unassigned: bool = False
) -> tuple[list[WindowSegment], list[WindowSegment]]:
    """Route windows to the side their parent unit belongs to.

    Windows from units outside the fold's scope (other subjects, for
    subject-dependent folds) are dropped.  A window whose unit is in neither
    set but inside scope is a routing error unless `allow_unassigned` (fixed
    splits may legitimately exclude subjects).
    """
    train: list[WindowSegment] = []
    test: list[WindowSegment] = []
    for seg in windows:
        unit = _window_unit(seg, fold.unit)
        if unit in fold.test_units:
            test.append(seg)
        elif unit in fold.train_units:
            train.append(seg)
        elif fold.scope is not None and seg.subject_id != fold.scope:
            continue  # other subjects are out of scope for this fold
        elif allow_unassigned:
            continue
        else:
            raise SplitError(f"window unit {unit!r} not in either side of fold")
    return train, test


def verify_disjoint(folds: list[FoldPlan]) -> VerificationReport:
    """Check per-fold disjointness and cross-fold test coverage/uniqueness."""
    violations: list[str] = []
    seen_test: dict[str, set[str]] = {}
    for fold in folds:
        overlap = fold.train_units & fold.test_units
        if overlap:
            violations.append(
                f"fold {fold.fold_index}: train/test overlap {sorted(overlap)}"
            )
        scope = fold.scope or ""
        for unit in fold.test_units:
            seen = seen_test.setdefault(scope, set())
            if unit in seen:
                violations.append(
                    f"fold {fold.fold_index}: unit {unit!r} tested more than once"
                )
            seen.add(unit)
    # exhaustive schemes: every unit mentioned anywhere must be tested once
    all_units: dict[str, set[str]] = {}
    for fold in folds:
        scope = fold.scope or ""
        all_units.setdefault(scope, set()).update(fold.train_units | fold.test_units)
    for scope, units in all_units.items():
        missing = units - seen_test.get(scope, set())
        if missing and len(folds) > 1:
            violations.append(f"units never tested: {sorted(missing)}")
    return VerificationReport(violations=tuple(violations))


def scheme_to_dict(scheme: SplitScheme) -> dict:
    return {
        "kind": scheme.kind,
        "k": scheme.k,
        "train_ids": list(scheme.train_ids),
        "test_ids": list(scheme.test_ids),
    }


def scheme_from_dict(d: dict) -> SplitScheme:
    return SplitScheme(
        kind=d["kind"],
        k=int(d.get("k", 1)),
        train_ids=tuple(d.get("train_ids") or ()),
        test_ids=tuple(d.get("test_ids") or ()),
    )
