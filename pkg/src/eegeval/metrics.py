"""Confusion-matrix metrics and cross-fold aggregation.

Division-by-zero conventions: a class with a zero denominator gets
precision/recall/f1 = 0; MCC and kappa return 0 when their denominator
vanishes.  Cross-fold spread is the sample standard deviation (n-1), 0 for a
single fold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MetricError


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """counts[i, j] = number of samples with true class i predicted as j."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise MetricError("empty label vectors")
    if y_true.shape != y_pred.shape:
        raise MetricError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    for name, v in (("true", y_true), ("predicted", y_pred)):
        if v.min() < 0 or v.max() >= n_classes:
            raise MetricError(f"{name} label outside [0, {n_classes})")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def accuracy(cm: np.ndarray) -> float:
    total = cm.sum()
    if total == 0:
        raise MetricError("empty confusion matrix")
    return float(np.trace(cm) / total)


def precision_recall_f1(cm: np.ndarray):
    """Per-class precision/recall/f1 plus macro and support-weighted F1."""
    total = cm.sum()
    if total == 0:
        raise MetricError("empty confusion matrix")
    diag = np.diag(cm).astype(np.float64)
    col = cm.sum(axis=0).astype(np.float64)  # predicted counts
    row = cm.sum(axis=1).astype(np.float64)  # true counts (support)
    precision = np.divide(diag, col, out=np.zeros_like(diag), where=col > 0)
    recall = np.divide(diag, row, out=np.zeros_like(diag), where=row > 0)
    pr = precision + recall
    f1 = np.divide(2 * precision * recall, pr, out=np.zeros_like(diag), where=pr > 0)
    macro_f1 = float(f1.mean())
    weighted_f1 = float((row / total * f1).sum())
    return precision, recall, f1, macro_f1, weighted_f1


def mcc(cm: np.ndarray) -> float:
    """Multiclass Matthews correlation from the confusion matrix."""
    total = float(cm.sum())
    if total == 0:
        raise MetricError("empty confusion matrix")
    c = float(np.trace(cm))
    p = cm.sum(axis=0).astype(np.float64)  # predicted counts
    t = cm.sum(axis=1).astype(np.float64)  # true counts
    cov = c * total - float(p @ t)
    denom = math.sqrt(total**2 - float(p @ p)) * math.sqrt(total**2 - float(t @ t))
    if denom == 0:
        return 0.0
    return cov / denom


def kappa(cm: np.ndarray) -> float:
    """Cohen's kappa; 0 by convention when expected agreement is 1."""
    total = float(cm.sum())
    if total == 0:
        raise MetricError("empty confusion matrix")
    p_o = float(np.trace(cm)) / total
    row = cm.sum(axis=1) / total
    col = cm.sum(axis=0) / total
    p_e = float(row @ col)
    if p_e == 1.0:
        return 0.0
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class MetricReport:
    n_classes: int
    support: tuple[int, ...]
    accuracy: float
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    macro_f1: float
    weighted_f1: float
    positive_f1: float | None  # class-1 F1 for binary tasks, else None
    mcc: float
    kappa: float
    confusion: tuple[tuple[int, ...], ...]


AGGREGATED_METRICS = ("accuracy", "macro_f1", "weighted_f1", "positive_f1", "mcc", "kappa")


@dataclass(frozen=True)
class AggregateReport:
    n_folds: int
    mean: dict[str, float]
    std: dict[str, float]
    per_fold: tuple[MetricReport, ...]


def compute_report(y_true, y_pred, n_classes: int) -> MetricReport:
    cm = confusion_matrix(y_true, y_pred, n_classes)
    precision, recall, f1, macro_f1, weighted_f1 = precision_recall_f1(cm)
    return MetricReport(
        n_classes=n_classes,
        support=tuple(int(s) for s in cm.sum(axis=1)),
        accuracy=accuracy(cm),
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        macro_f1=macro_f1,
        weighted_f1=weighted_f1,
        positive_f1=float(f1[1]) if n_classes == 2 else None,
        mcc=mcc(cm),
        kappa=kappa(cm),
        confusion=tuple(tuple(int(v) for v in row) for row in cm),
    )


def aggregate(reports: list[MetricReport]) -> AggregateReport:
    """Mean and sample standard deviation per metric across folds."""
    if not reports:
        raise MetricError("no fold reports to aggregate")
    mean: dict[str, float] = {}
    std: dict[str, float] = {}
    for name in AGGREGATED_METRICS:
        values = [getattr(r, name) for r in reports]
        if any(v is None for v in values):
            continue
        arr = np.asarray(values, dtype=np.float64)
        mean[name] = float(arr.mean())
        std[name] = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return AggregateReport(
        n_folds=len(reports), mean=mean, std=std, per_fold=tuple(reports)
    )


def report_to_dict(r: MetricReport) -> dict:
    return {
        "n_classes": r.n_classes,
        "support": list(r.support),
        "accuracy": r.accuracy,
        "precision": list(r.precision),
        "recall": list(r.recall),
        "f1": list(r.f1),
        "macro_f1": r.macro_f1,
        "weighted_f1": r.weighted_f1,
        "positive_f1": r.positive_f1,
        "mcc": r.mcc,
        "kappa": r.kappa,
        "confusion": [list(row) for row in r.confusion],
    }


def report_from_dict(d: dict) -> MetricReport:
    return MetricReport(
        n_classes=d["n_classes"],
        support=tuple(d["support"]),
        accuracy=d["accuracy"],
        precision=tuple(d["precision"]),
        recall=tuple(d["recall"]),
        f1=tuple(d["f1"]),
        macro_f1=d["macro_f1"],
        weighted_f1=d["weighted_f1"],
        positive_f1=d["positive_f1"],
        mcc=d["mcc"],
        kappa=d["kappa"],
        confusion=tuple(tuple(row) for row in d["confusion"]),
    )
