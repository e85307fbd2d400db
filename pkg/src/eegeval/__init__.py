"""Reproducible evaluation harness for EEG-based emotion recognition.

Standardizes the five stages where published pipelines diverge: dataset
ingestion (one canonical on-disk format), preprocessing (explicit, logged
recipes), train/test splitting (leakage-safe LOSO/LOTO planning), ground-truth
definition (thresholds recorded next to every number), and metric reporting
(full confusion-matrix suite with cross-fold mean and std).
"""

__version__ = "0.1.0"

from .dataset import (  # noqa: F401
    DatasetManifest,
    SignalBlock,
    ValidationReport,
    dataset_summary,
    load_manifest,
    read_trial_signal,
    validate_manifest,
    write_manifest,
)
from .labeling import GroundTruthScheme, binarize, class_distribution, quadrantize  # noqa: F401
from .metrics import aggregate, compute_report, confusion_matrix  # noqa: F401
from .models import ClassifierSpec, TrainingSpec  # noqa: F401
from .runner import RunConfig, execute_run, load_config  # noqa: F401
from .splitting import SplitScheme, plan_folds, train_val_split  # noqa: F401
from .synthetic import SyntheticSpec, generate_synthetic  # noqa: F401
from .transform import TransformSpec, apply_pipeline  # noqa: F401
