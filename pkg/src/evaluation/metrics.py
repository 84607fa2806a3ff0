# src/evaluation/metrics.py
# Confusion counts, accuracy/precision/recall/F1 and ROC/AUC for binary labels (1 = bankrupt).

from dataclasses import dataclass
from typing import Dict

import numpy as np

from src.errors import EvaluationError, ShapeError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def normalized(self) -> Dict[str, float]:
        """Rates per true class: tpr/fnr over actual positives, fpr/tnr over actual negatives."""
        pos = self.tp + self.fn
        neg = self.fp + self.tn
        return {
            "tpr": self.tp / pos if pos else 0.0,
            "fnr": self.fn / pos if pos else 0.0,
            "fpr": self.fp / neg if neg else 0.0,
            "tnr": self.tn / neg if neg else 0.0,
        }

    def as_dict(self) -> Dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def _binary(values, name: str) -> np.ndarray:
    arr = np.asarray(values).ravel()
    if not np.all(np.isin(arr, (0, 1))):
        raise ShapeError(f"{name} must contain only 0 and 1.")
    return arr.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    truth = _binary(y_true, "y_true")
    pred = _binary(y_pred, "y_pred")
    if truth.shape[0] != pred.shape[0]:
        raise ShapeError(f"y_true has {truth.shape[0]} entries, y_pred has {pred.shape[0]}.")
    return ConfusionMatrix(
        tp=int(np.sum((truth == 1) & (pred == 1))),
        fp=int(np.sum((truth == 0) & (pred == 1))),
        fn=int(np.sum((truth == 1) & (pred == 0))),
        tn=int(np.sum((truth == 0) & (pred == 0))),
    )


def binary_metrics(cm: ConfusionMatrix) -> Dict[str, float]:
    """Accuracy, precision, recall and F1; an undefined ratio is reported as 0."""
    if cm.total <= 0:
        raise EvaluationError("Cannot compute metrics on an empty confusion matrix.")
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {
        "accuracy": (cm.tp + cm.tn) / cm.total,
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Points from (0, 0) to (1, 1); thresholds[0] is +inf, thresholds[i] is the score cut for point i."""
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float


def roc_auc(scores, y_true) -> RocCurve:
    """
    Sweeps every distinct score as a threshold (score ≥ t is positive), grouping
    tied scores into one step, and integrates with the trapezoid rule.
    """
    s = np.asarray(scores, dtype=float).ravel()
    truth = _binary(y_true, "y_true")
    if s.shape[0] != truth.shape[0]:
        raise ShapeError(f"{s.shape[0]} scores for {truth.shape[0]} labels.")
    if not np.all(np.isfinite(s)):
        raise EvaluationError("ROC scores must be finite.")
    n_pos = int(truth.sum())
    n_neg = truth.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("ROC needs both classes in the true labels.")
    order = np.argsort(-s, kind="stable")
    ranked = s[order]
    hits = truth[order]
    last_of_group = np.concatenate([np.flatnonzero(ranked[1:] != ranked[:-1]), [ranked.shape[0] - 1]])
    tps = np.cumsum(hits)[last_of_group]
    fps = (last_of_group + 1) - tps
    tpr = np.concatenate([[0.0], tps / n_pos])
    fpr = np.concatenate([[0.0], fps / n_neg])
    thresholds = np.concatenate([[np.inf], ranked[last_of_group]])
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) * 0.5))
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, auc=auc)


def pairwise_auc(scores, y_true) -> float:
    """Probability a random positive outscores a random negative, ties counted ½."""
    s = np.asarray(scores, dtype=float).ravel()
    truth = _binary(y_true, "y_true")
    pos = s[truth == 1]
    neg = s[truth == 0]
    if pos.size == 0 or neg.size == 0:
        raise EvaluationError("AUC needs both classes in the true labels.")
    diff = pos[:, None] - neg[None, :]
    return float((np.sum(diff > 0) + 0.5 * np.sum(diff == 0)) / diff.size)
