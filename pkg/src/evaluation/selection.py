# src/evaluation/selection.py
# Stratified k-fold splitting, cross-validated grid search and per-fold ROC.

import itertools
import numbers
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.errors import BankruptcyForecastError, EvaluationError, ParameterError, ShapeError
from src.evaluation.metrics import RocCurve, binary_metrics, confusion, roc_auc
from src.models.base import fit_model
from src.numerics import RngStream
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

CV_METRICS = ("accuracy", "auc", "f1")


def kfold_indices(n: int, k: int, rng: RngStream, labels: Optional[Sequence[int]] = None) -> List[np.ndarray]:
    """
    k disjoint validation folds covering range(n), each sorted.

    Each class is shuffled and cut into k nearly equal chunks; the chunk-to-fold
    mapping rotates by the running member count so fold totals stay within one
    sample of each other as well.
    """
    if k < 2:
        raise ParameterError(f"k must be at least 2, got {k}.")
    y = np.zeros(n, dtype=np.int64) if labels is None else np.asarray(labels).astype(np.int64).ravel()
    if y.shape[0] != n:
        raise ShapeError(f"{y.shape[0]} labels for n={n}.")
    gen = rng.generator()
    folds: List[List[np.ndarray]] = [[] for _ in range(k)]
    offset = 0
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        if members.size < k:
            raise ParameterError(f"Class {cls} has {members.size} member(s), fewer than k={k} folds.")
        shuffled = members[gen.permutation(members.size)]
        for j, chunk in enumerate(np.array_split(shuffled, k)):
            folds[(j + offset) % k].append(chunk)
        offset = (offset + members.size) % k
    return [np.sort(np.concatenate(parts)) for parts in folds]


@dataclass
class CvResult:
    params: Dict[str, Any]
    fold_scores: List[float] = field(default_factory=list)
    mean: float = float("nan")
    std: float = float("nan")
    failed: bool = False
    error: Optional[str] = None

    def as_row(self) -> Dict[str, Any]:
        row = dict(self.params)
        row.update({"mean": self.mean, "std": self.std, "failed": self.failed})
        return row


@dataclass
class GridSearchResult:
    best_params: Dict[str, Any]
    best: CvResult
    results: List[CvResult]
    param_names: Tuple[str, ...]
    metric: str


def fold_score(metric: str, model, x_val: np.ndarray, y_val: np.ndarray) -> float:
    if metric == "auc":
        return roc_auc(model.score(x_val), y_val).auc
    metrics = binary_metrics(confusion(y_val, model.predict(x_val)))
    return metrics[metric]


def cross_validate(kind: str, params: Mapping[str, Any], x, y, folds: Sequence[np.ndarray],
                   metric: str, rng: RngStream) -> CvResult:
    """Scores one hyperparameter point on precomputed folds; any failing fold fails the point."""
    data = np.asarray(x, dtype=float)
    labels = np.asarray(y).astype(np.int64).ravel()
    result = CvResult(params=dict(params))
    all_idx = np.arange(labels.shape[0])
    for i, val_idx in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, val_idx, assume_unique=True)
        try:
            model = fit_model(kind, data[train_idx], labels[train_idx], dict(params), rng.substream(f"fold-{i}"))
            result.fold_scores.append(float(fold_score(metric, model, data[val_idx], labels[val_idx])))
        except (BankruptcyForecastError, ArithmeticError, ValueError) as e:
            result.failed = True
            result.error = f"fold {i}: {type(e).__name__}: {e}"
            logger.warning(f"Grid point {dict(params)} for {kind} failed on {result.error}")
            return result
    scores = np.asarray(result.fold_scores)
    result.mean = float(scores.mean())
    result.std = float(scores.std())
    return result


def _tie_key(point: Dict[str, Any], grid: Mapping[str, Sequence[Any]]) -> Tuple:
    """Smaller values first, in declared parameter order; None (unbounded) sorts last."""
    key = []
    for name, values in grid.items():
        value = point[name]
        if value is None:
            key.append((1, float("inf")))
        elif isinstance(value, numbers.Real) and not isinstance(value, bool):
            key.append((0, float(value)))
        else:
            key.append((0, float(list(values).index(value))))
    return tuple(key)


def grid_search(kind: str, grid: Mapping[str, Sequence[Any]], x, y, k: int = 10, metric: str = "accuracy",
                rng: Optional[RngStream] = None, base_params: Optional[Mapping[str, Any]] = None) -> GridSearchResult:
    """
    k-fold CV for every point of the Cartesian grid (declared parameter order).

    All points share one fold assignment. Best = highest mean score; ties go to
    smaller hyperparameter values, then to grid order.
    """
    if rng is None:
        raise ParameterError("grid_search needs a random stream.")
    if metric not in CV_METRICS:
        raise ParameterError(f"Unknown CV metric '{metric}'. Allowed: {', '.join(CV_METRICS)}.")
    if not grid or any(len(list(v)) == 0 for v in grid.values()):
        raise ParameterError("Hyperparameter grid must be non-empty.")
    names = tuple(grid.keys())
    labels = np.asarray(y).astype(np.int64).ravel()
    folds = kfold_indices(labels.shape[0], k, rng.substream("folds"), labels)

    results: List[CvResult] = []
    for values in itertools.product(*(list(grid[n]) for n in names)):
        point = dict(base_params or {})
        point.update(zip(names, values))
        result = cross_validate(kind, point, x, labels, folds, metric, rng)
        logger.debug(f"CV {kind} {dict(zip(names, values))}: mean={result.mean:.4f} std={result.std:.4f}")
        results.append(result)

    ok = [(i, r) for i, r in enumerate(results) if not r.failed]
    if not ok:
        raise EvaluationError(f"Every grid point for {kind} failed during cross-validation.")
    best_index, best = min(ok, key=lambda item: (-item[1].mean, _tie_key(item[1].params, grid), item[0]))
    logger.info(f"Grid search for {kind} ({metric}, {k}-fold): best {dict((n, best.params[n]) for n in names)} "
                f"mean={best.mean:.4f} (point {best_index + 1}/{len(results)}).")
    return GridSearchResult(best_params=dict(best.params), best=best, results=results,
                            param_names=names, metric=metric)


@dataclass(frozen=True, eq=False)
class CvRocResult:
    curves: Tuple[RocCurve, ...]
    aucs: np.ndarray
    mean_auc: float
    std_auc: float


def cross_val_roc(kind: str, params: Mapping[str, Any], x, y, k: int, rng: RngStream) -> CvRocResult:
    """One ROC curve per validation fold, from models fitted on the other k − 1 folds."""
    data = np.asarray(x, dtype=float)
    labels = np.asarray(y).astype(np.int64).ravel()
    folds = kfold_indices(labels.shape[0], k, rng.substream("folds"), labels)
    all_idx = np.arange(labels.shape[0])
    curves = []
    for i, val_idx in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, val_idx, assume_unique=True)
        model = fit_model(kind, data[train_idx], labels[train_idx], dict(params), rng.substream(f"fold-{i}"))
        curves.append(roc_auc(model.score(data[val_idx]), labels[val_idx]))
    aucs = np.array([c.auc for c in curves])
    logger.info(f"Cross-validated ROC for {kind}: mean AUC {aucs.mean():.4f} ± {aucs.std():.4f} over {k} folds.")
    return CvRocResult(curves=tuple(curves), aucs=aucs, mean_auc=float(aucs.mean()), std_auc=float(aucs.std()))
