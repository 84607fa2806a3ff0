# src/evaluation package
# Quality control metrics and cross-validated model selection.

from src.evaluation.metrics import (
    ConfusionMatrix,
    RocCurve,
    binary_metrics,
    confusion,
    pairwise_auc,
    roc_auc,
)
from src.evaluation.selection import (
    CV_METRICS,
    CvResult,
    CvRocResult,
    GridSearchResult,
    cross_val_roc,
    cross_validate,
    grid_search,
    kfold_indices,
)

__all__ = [
    "ConfusionMatrix",
    "RocCurve",
    "binary_metrics",
    "confusion",
    "pairwise_auc",
    "roc_auc",
    "CV_METRICS",
    "CvResult",
    "CvRocResult",
    "GridSearchResult",
    "cross_val_roc",
    "cross_validate",
    "grid_search",
    "kfold_indices",
]
