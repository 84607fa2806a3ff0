# src/pipeline/reports.py
# CSV report writers and console formatting for run outputs.

import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from src.evaluation.metrics import ConfusionMatrix, RocCurve
from src.evaluation.selection import CvRocResult, GridSearchResult

SUMMARY_COLUMNS = ["dimred", "model", "accuracy", "precision", "recall", "f1", "auc", "cv_auc_mean",
                   "status", "report_path"]


def _write(frame: pd.DataFrame, path: str) -> str:
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_confusion_csv(cm: ConfusionMatrix, path: str) -> str:
    """Counts plus the row-normalized rates, one row per (actual, predicted) cell."""
    rates = cm.normalized()
    frame = pd.DataFrame({
        "actual": ["bankrupt", "bankrupt", "not bankrupt", "not bankrupt"],
        "predicted": ["bankrupt", "not bankrupt", "bankrupt", "not bankrupt"],
        "cell": ["tp", "fn", "fp", "tn"],
        "count": [cm.tp, cm.fn, cm.fp, cm.tn],
        "rate": [rates["tpr"], rates["fnr"], rates["fpr"], rates["tnr"]],
    })
    return _write(frame, path)


def write_roc_csv(curve: RocCurve, path: str) -> str:
    return _write(pd.DataFrame({"fpr": curve.fpr, "tpr": curve.tpr, "threshold": curve.thresholds}), path)


def write_cv_curve_csv(search: GridSearchResult, path: str) -> str:
    rows = []
    for result in search.results:
        row = {name: result.params[name] for name in search.param_names}
        row.update({"mean": result.mean, "std": result.std, "failed": result.failed,
                    "fold_scores": " ".join(f"{s:.10g}" for s in result.fold_scores)})
        rows.append(row)
    return _write(pd.DataFrame(rows, columns=list(search.param_names) + ["mean", "std", "failed", "fold_scores"]), path)


def write_cv_roc_csv(cv_roc: CvRocResult, path: str) -> str:
    frames = [
        pd.DataFrame({"fold": i, "fpr": c.fpr, "tpr": c.tpr, "threshold": c.thresholds, "auc": c.auc})
        for i, c in enumerate(cv_roc.curves)
    ]
    return _write(pd.concat(frames, ignore_index=True), path)


def write_embedding_csv(train: np.ndarray, train_labels: np.ndarray, test: np.ndarray, test_labels: np.ndarray,
                        path: str) -> str:
    """One row per sample: coordinates, then label, then partition."""
    columns = [f"c{i + 1}" for i in range(train.shape[1])]
    frame = pd.concat([
        pd.DataFrame(train, columns=columns).assign(label=train_labels, partition="train"),
        pd.DataFrame(test, columns=columns).assign(label=test_labels, partition="test"),
    ], ignore_index=True)
    return _write(frame, path)


def write_explained_variance_csv(profile: Mapping[str, Sequence[float]], path: str) -> str:
    return _write(pd.DataFrame(profile), path)


def write_summary_csv(rows: Iterable[Dict[str, Any]], path: str) -> str:
    frame = pd.DataFrame(list(rows))
    for column in SUMMARY_COLUMNS:
        if column not in frame.columns:
            frame[column] = None
    extra = [c for c in frame.columns if c not in SUMMARY_COLUMNS]
    return _write(frame[SUMMARY_COLUMNS + extra], path)


def read_summary_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path)


def sig(value: Optional[float], digits: int = 4) -> str:
    """Number with `digits` significant digits; blanks for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.{digits}g}"


def format_report(report: Dict[str, Any]) -> str:
    test = report.get("test_metrics", {})
    lines = [
        f"Run '{report.get('name')}' ({report.get('dimred')} + {report.get('model')}, seed {report.get('seed')})",
        "  test  " + "  ".join(f"{k}={sig(test.get(k))}" for k in ("accuracy", "precision", "recall", "f1", "auc")),
    ]
    if report.get("cv_auc_mean") is not None:
        lines.append(f"  cv auc {sig(report['cv_auc_mean'])} ± {sig(report.get('cv_auc_std'))}")
    if report.get("chosen_params"):
        lines.append(f"  chosen {report['chosen_params']}")
    for note in report.get("warnings", []):
        lines.append(f"  warning: {note}")
    return "\n".join(lines)


def format_summary(rows: List[Dict[str, Any]]) -> str:
    header = f"{'dimred':<10}{'model':<10}{'accuracy':>10}{'precision':>10}{'recall':>10}{'f1':>10}{'auc':>10}  status"
    lines = [header]
    for row in rows:
        lines.append(
            f"{str(row.get('dimred')):<10}{str(row.get('model')):<10}"
            + "".join(f"{sig(row.get(k)):>10}" for k in ("accuracy", "precision", "recall", "f1", "auc"))
            + f"  {row.get('status')}"
        )
    return "\n".join(lines)


def output_paths(run_dir: str) -> Dict[str, str]:
    names = ["metrics.json", "confusion.csv", "roc.csv", "cv_curve.csv", "cv_roc.csv", "embedding.csv",
             "explained_variance.csv", "tree.dot", "model.json", "transforms.json"]
    return {name: os.path.join(run_dir, name) for name in names}
