"""Thin bindings around the ``eegeval`` harness for callers that want plain
native structures (dicts, lists, floats) instead of the package's dataclasses.

Exactly four entry points are exposed:

- :func:`load_manifest` — parse a dataset manifest into a nested dict.
- :func:`generate_synthetic` — write a synthetic dataset, returning its manifest dict.
- :func:`run` — execute an experiment config end to end, returning the
  aggregate results and artifact paths.
- :func:`metrics` — compute the full classification metric set for one pair
  of label vectors.

The bindings never compute anything themselves; every value is produced by
the primary package, so equality with its outputs is exact rather than
approximate.  Each call is independent; concurrent calls with distinct
output directories are safe.
"""

from __future__ import annotations

from pathlib import Path

from eegeval import dataset as _dataset
from eegeval import metrics as _metrics
from eegeval import runner as _runner
from eegeval import synthetic as _synthetic

__all__ = ["load_manifest", "generate_synthetic", "run", "metrics"]
__version__ = "0.1.0"


def load_manifest(path: str) -> dict:
    """Load and validate a ``manifest.json``, returned as a plain dict.

    Raises eegeval.errors.ManifestError for structural problems, with the
    offending field named in the message.
    """
    manifest = _dataset.load_manifest(path)
    return _dataset.manifest_to_dict(manifest)


def generate_synthetic(spec: dict, out_dir: str) -> dict:
    """Generate a synthetic dataset from a spec dict; returns its manifest.

    Unknown spec keys raise with the key named, so typos never silently fall
    back to defaults.
    """
    parsed = _synthetic.synthetic_spec_from_dict(spec)
    manifest = _synthetic.generate_synthetic(parsed, Path(out_dir))
    return _dataset.manifest_to_dict(manifest)


def run(config_path: str) -> dict:
    """Execute a TOML experiment config through the primary harness.

    Returns a mapping with the run identity, the aggregate metrics (bit-exact
    copies of the summary values), and the paths of every written artifact::

        {
          "run_id": str,
          "n_folds": int,
          "mean": {metric: float, ...},
          "std": {metric: float, ...},
          "per_fold": [{metric: value, ...}, ...],
          "artifacts": {
            "output_dir": str,
            "summary": str,
            "predictions": str | None,
            "fold_logs": [str, ...],
          },
        }

    Configuration problems raise eegeval.errors.ConfigError naming the
    offending key; execution failures raise eegeval.errors.RunError carrying
    the pipeline stage that failed.
    """
    config = _runner.load_config(config_path)
    artifacts = _runner.execute_run(config)
    agg = artifacts.aggregate
    return {
        "run_id": artifacts.run_id,
        "n_folds": agg.n_folds,
        "mean": dict(agg.mean),
        "std": dict(agg.std),
        "per_fold": [_metrics.report_to_dict(r) for r in agg.per_fold],
        "artifacts": {
            "output_dir": str(artifacts.output_dir),
            "summary": str(artifacts.summary_path),
            "predictions": str(artifacts.predictions_path)
            if artifacts.predictions_path is not None
            else None,
            "fold_logs": [str(p) for p in artifacts.fold_log_paths],
        },
    }


def metrics(y_true, y_pred, n_classes: int) -> dict:
    """Full metric set for one pair of integer label sequences.

    Values are exactly those of the primary metrics module.  Length
    mismatches and out-of-range labels raise eegeval.errors.MetricError.
    """
    report = _metrics.compute_report(y_true, y_pred, n_classes)
    return _metrics.report_to_dict(report)
