"""End-to-end experiment orchestration from a single TOML configuration.

All artifacts are assembled in memory and written only after every fold has
succeeded, so a failed run leaves no partial outputs.  Per-fold seeds are
derived from the master seed and the fold index with a 64-bit multiply-xor-
shift chain, making fold results independent of execution order.
"""

from __future__ import annotations

import hashlib
import json
import os
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, labeling, metrics, models, presets, splitting, synthetic, transform
from .dataset import DatasetManifest, load_manifest, read_trial_signal
from .errors import ConfigError, EegEvalError, RunError

WORKERS_ENV = "EEGEVAL_WORKERS"

_MIX_MULT_1 = 0xBF58476D1CE4E5B9
_MIX_MULT_2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def mix_seed(master_seed: int, fold_index: int) -> int:
    """splitmix64-style mixing of (master_seed, fold_index) into a 64-bit seed."""
    z = (master_seed + (fold_index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_MULT_1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_MULT_2) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RunConfig:
    dataset_manifest: Path | None
    synthetic_spec: synthetic.SyntheticSpec | None
    transform_preset: str | None
    transform_spec: transform.TransformSpec
    ground_truth: labeling.GroundTruthScheme
    split: splitting.SplitScheme
    train_val_ratio: float
    model: models.ClassifierSpec
    training: models.TrainingSpec
    seed: int
    output_dir: Path
    log_predictions: bool = True

    def __post_init__(self):
        if (self.dataset_manifest is None) == (self.synthetic_spec is None):
            raise ConfigError("config needs exactly one of a manifest path or a synthetic spec")
        if not (0 < self.train_val_ratio < 1):
            raise ConfigError("train_val_ratio must be in (0, 1)")


@dataclass(frozen=True)
class RunArtifacts:
    run_id: str
    output_dir: Path
    predictions_path: Path | None
    summary_path: Path
    fold_log_paths: tuple[Path, ...]
    aggregate: metrics.AggregateReport


# ---------------------------------------------------------------------------
# configuration parsing


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML ({exc})") from exc
    try:
        return config_from_dict(doc, base_dir=path.parent)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_from_dict(doc: dict, base_dir: Path | None = None) -> RunConfig:
    base = Path(base_dir) if base_dir is not None else Path(".")

    def _resolve(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    ds = doc.get("dataset") or {}
    manifest_path = _resolve(ds["manifest"]) if "manifest" in ds else None
    synth = (
        synthetic.synthetic_spec_from_dict(ds["synthetic"]) if "synthetic" in ds else None
    )

    tr = doc.get("transform") or {}
    preset_name = tr.get("preset")
    if preset_name is not None and "steps" in tr:
        raise ConfigError("[transform] takes either a preset or explicit steps, not both")
    if preset_name is not None:
        tspec = presets.get_preset(preset_name)
    elif "steps" in tr:
        tspec = transform.spec_from_dicts(tr["steps"])
    else:
        tspec = transform.TransformSpec()

    gt = doc.get("ground_truth")
    if gt:
        scheme = labeling.scheme_from_dict(gt)
    elif preset_name is not None:
        scheme = presets.DEFAULT_SCHEMES[preset_name]
    else:
        scheme = labeling.GroundTruthScheme(
            kind="dimensional_binary", dimension="valence", threshold=4.5
        )

    sp = doc.get("split") or {"kind": "loso"}
    sp = dict(sp)
    train_val_ratio = float(sp.pop("train_val_ratio", 0.8))
    split = splitting.scheme_from_dict(sp)

    model_spec = models.classifier_spec_from_dict(doc.get("model") or {"kind": "bandpower_mlp"})
    training = models.training_spec_from_dict(doc.get("training") or {})
    logging_cfg = doc.get("logging") or {}

    return RunConfig(
        dataset_manifest=manifest_path,
        synthetic_spec=synth,
        transform_preset=preset_name,
        transform_spec=tspec,
        ground_truth=scheme,
        split=split,
        train_val_ratio=train_val_ratio,
        model=model_spec,
        training=training,
        seed=int(doc.get("seed", 0)),
        output_dir=_resolve(doc.get("output_dir", "runs/out")),
        log_predictions=bool(logging_cfg.get("log_predictions", True)),
    )


def config_to_dict(config: RunConfig) -> dict:
    """Resolved config as plain data; presets are expanded into their steps."""
    return {
        "dataset": {
            "manifest": str(config.dataset_manifest) if config.dataset_manifest else None,
            "synthetic": synthetic.synthetic_spec_to_dict(config.synthetic_spec)
            if config.synthetic_spec
            else None,
        },
        "transform": {
            "preset": config.transform_preset,
            "steps": transform.spec_to_dicts(config.transform_spec),
        },
        "ground_truth": labeling.scheme_to_dict(config.ground_truth),
        "split": {
            **splitting.scheme_to_dict(config.split),
            "train_val_ratio": config.train_val_ratio,
        },
        "model": models.classifier_spec_to_dict(config.model),
        "training": models.training_spec_to_dict(config.training),
        "seed": config.seed,
        "logging": {"log_predictions": config.log_predictions},
    }


def config_from_resolved_dict(d: dict, output_dir: Path) -> RunConfig:
    """Inverse of config_to_dict (used for summary round-trip checks)."""
    ds = d["dataset"]
    return RunConfig(
        dataset_manifest=Path(ds["manifest"]) if ds.get("manifest") else None,
        synthetic_spec=synthetic.synthetic_spec_from_dict(ds["synthetic"])
        if ds.get("synthetic")
        else None,
        transform_preset=d["transform"].get("preset"),
        transform_spec=transform.spec_from_dicts(d["transform"]["steps"]),
        ground_truth=labeling.scheme_from_dict(d["ground_truth"]),
        split=splitting.scheme_from_dict(d["split"]),
        train_val_ratio=float(d["split"]["train_val_ratio"]),
        model=models.classifier_spec_from_dict(d["model"]),
        training=models.training_spec_from_dict(d["training"]),
        seed=int(d["seed"]),
        output_dir=output_dir,
        log_predictions=bool(d["logging"]["log_predictions"]),
    )


def compute_run_id(config: RunConfig) -> str:
    """Content hash of the resolved config plus the code version.

    The output directory is excluded so the same experiment keeps its id
    wherever its artifacts land.
    """
    blob = json.dumps(config_to_dict(config), sort_keys=True) + f"|eegeval-{__version__}"
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# execution


@dataclass
class _FoldResult:
    fold_index: int
    selected_epoch: int
    val_history: tuple[float, ...]
    report: metrics.MetricReport
    rows: list[tuple]  # prediction rows sans run_id


def _transform_all(manifest: DatasetManifest, config: RunConfig, trial_labels):
    windows = []
    for subj, sess, trial in manifest.iter_trials():
        block = read_trial_signal(manifest, subj.subject_id, sess.session_id, trial.trial_id)
        segs = transform.apply_pipeline(
            block,
            config.transform_spec,
            subject_id=subj.subject_id,
            session_id=sess.session_id,
            trial_id=trial.trial_id,
            label=trial_labels[f"{subj.subject_id}/{sess.session_id}/{trial.trial_id}"],
        )
        windows.extend(segs)
    return windows


def _run_fold(
    fold: splitting.FoldPlan,
    all_windows,
    features: np.ndarray | None,
    window_index: dict,
    config: RunConfig,
    n_classes: int,
) -> _FoldResult:
    fold_seed = mix_seed(config.seed, fold.fold_index)
    allow_unassigned = config.split.kind == "fixed"
    train_w, test_w = splitting.materialize_fold(fold, all_windows, allow_unassigned)
    if not test_w:
        raise RunError("materialize", "fold has no test windows", fold.fold_index)

    units = sorted({(w.trial_key, w.label.index) for w in train_w})
    tv = splitting.train_val_split(list(units), config.train_val_ratio, fold_seed)
    train_keys = set(tv.train_units)
    val_keys = set(tv.val_units)
    fit_train = [w for w in train_w if w.trial_key in train_keys]
    fit_val = [w for w in train_w if w.trial_key in val_keys]
    if not fit_val:  # degenerate tiny folds: validate on the training windows
        fit_val = fit_train
    tspec = replace(config.training, seed=fold_seed)

    y_test = np.asarray([w.label.index for w in test_w], dtype=np.int64)
    if config.model.kind == "bandpower_mlp":
        idx = lambda ws: [window_index[(w.trial_key, w.window_index)] for w in ws]
        model = models.fit_mlp_on_features(
            features[idx(fit_train)],
            np.asarray([w.label.index for w in fit_train], dtype=np.int64),
            features[idx(fit_val)],
            np.asarray([w.label.index for w in fit_val], dtype=np.int64),
            n_classes,
            config.model,
            tspec,
        )
        pred = models.predict_features(model, features[idx(test_w)])
    else:
        model = models.fit(config.model, fit_train, fit_val, tspec, n_classes)
        pred = models.predict(model, test_w)

    report = metrics.compute_report(y_test, pred.classes, n_classes)
    rows = []
    for w, cls, probs in zip(test_w, pred.classes, pred.probabilities):
        rows.append(
            (
                fold.fold_index,
                w.subject_id,
                w.session_id,
                w.trial_id,
                w.window_index,
                model.selected_epoch,
                int(w.label.index),
                int(cls),
                tuple(float(p) for p in probs),
            )
        )
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4]))
    return _FoldResult(
        fold_index=fold.fold_index,
        selected_epoch=model.selected_epoch,
        val_history=model.val_accuracy_history,
        report=report,
        rows=rows,
    )


def execute_run(config: RunConfig) -> RunArtifacts:
    """Run the whole experiment and write predictions, summary, and per-fold
    validation-curve sidecars under ``config.output_dir``."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()

    def _mark(stage: str):
        nonlocal t0
        now = time.perf_counter()
        timings[stage] = now - t0
        t0 = now

    run_id = compute_run_id(config)
    out_dir = config.output_dir

    try:
        if config.synthetic_spec is not None:
            dataset_dir = out_dir / "synthetic"
            manifest = synthetic.generate_synthetic(config.synthetic_spec, dataset_dir)
        else:
            manifest = load_manifest(config.dataset_manifest)
    except EegEvalError as exc:
        raise RunError("dataset", str(exc)) from exc
    _mark("dataset")

    try:
        trial_labels = {
            f"{subj.subject_id}/{sess.session_id}/{trial.trial_id}": labeling.label_trial(
                trial.label, config.ground_truth
            )
            for subj, sess, trial in manifest.iter_trials()
        }
    except EegEvalError as exc:
        raise RunError("labeling", str(exc)) from exc
    n_classes = config.ground_truth.n_classes
    _mark("labeling")

    try:
        folds = splitting.plan_folds(manifest, config.split)
    except EegEvalError as exc:
        raise RunError("split", str(exc)) from exc
    _mark("split")

    try:
        all_windows = _transform_all(manifest, config, trial_labels)
    except EegEvalError as exc:
        raise RunError("transform", str(exc)) from exc
    _mark("transform")

    features = None
    window_index = {(w.trial_key, w.window_index): i for i, w in enumerate(all_windows)}
    if config.model.kind == "bandpower_mlp":
        try:
            features = models.feature_matrix(all_windows, config.model.bands)
        except EegEvalError as exc:
            raise RunError("features", str(exc)) from exc
    _mark("features")

    n_workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    results: list[_FoldResult] = []
    try:
        if n_workers == 1:
            for fold in folds:
                results.append(
                    _run_fold(fold, all_windows, features, window_index, config, n_classes)
                )
        else:
            with ThreadPoolExecutor(max_workers=n_workers) as pool:
                futures = [
                    pool.submit(
                        _run_fold, fold, all_windows, features, window_index, config, n_classes
                    )
                    for fold in folds
                ]
                results = [f.result() for f in futures]
    except RunError:
        raise
    except EegEvalError as exc:
        raise RunError("fold", str(exc)) from exc
    results.sort(key=lambda r: r.fold_index)
    _mark("folds")

    agg = metrics.aggregate([r.report for r in results])

    out_dir.mkdir(parents=True, exist_ok=True)
    predictions_path = None
    if config.log_predictions:
        predictions_path = out_dir / "predictions.csv"
        _write_predictions(predictions_path, run_id, results, config.ground_truth.class_names)

    fold_log_paths = []
    fold_dir = out_dir / "folds"
    for r in results:
        if r.val_history:
            fold_dir.mkdir(exist_ok=True)
            p = fold_dir / f"fold_{r.fold_index:03d}_epochs.csv"
            with open(p, "w", encoding="utf-8", newline="") as fh:
                fh.write("epoch,val_accuracy\n")
                for e, acc in enumerate(r.val_history):
                    fh.write(f"{e},{acc:.9f}\n")
            fold_log_paths.append(p)

    summary_path = out_dir / "summary.json"
    _mark("write")
    _write_summary(summary_path, run_id, config, folds, results, agg, timings)

    return RunArtifacts(
        run_id=run_id,
        output_dir=out_dir,
        predictions_path=predictions_path,
        summary_path=summary_path,
        fold_log_paths=tuple(fold_log_paths),
        aggregate=agg,
    )


def _write_predictions(path: Path, run_id: str, results, class_names) -> None:
    header = [
        "run_id",
        "fold_index",
        "subject_id",
        "session_id",
        "trial_id",
        "window_index",
        "selected_epoch",
        "true_label",
        "predicted_label",
    ] + [f"prob_{name}" for name in class_names]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in results:
            for fold_index, subj, sess, trial, widx, epoch, yt, yp, probs in r.rows:
                cells = [
                    run_id,
                    str(fold_index),
                    subj,
                    sess,
                    trial,
                    str(widx),
                    str(epoch),
                    str(yt),
                    str(yp),
                ] + [f"{p:.9f}" for p in probs]
                fh.write(",".join(cells) + "\n")


def _write_summary(path, run_id, config, folds, results, agg, timings) -> None:
    doc = {
        "schema_version": 1,
        "run_id": run_id,
        "code_version": __version__,
        "config": config_to_dict(config),
        "fold_plan": [
            {
                "fold_index": f.fold_index,
                "unit": f.unit,
                "train_units": sorted(f.train_units),
                "test_units": sorted(f.test_units),
                "scope": f.scope,
            }
            for f in folds
        ],
        "per_fold": [
            {
                "fold_index": r.fold_index,
                "selected_epoch": r.selected_epoch,
                "metrics": metrics.report_to_dict(r.report),
            }
            for r in results
        ],
        "aggregate": {"n_folds": agg.n_folds, "mean": agg.mean, "std": agg.std},
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_summary(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
