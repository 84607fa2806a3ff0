# src/data/preprocessing.py
# Median imputation and feature scaling, fitted on training data and replayed anywhere.

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.data.dataset import Dataset
from src.errors import FitError, ParameterError, ShapeError
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

SCALER_KINDS = ("minmax", "standardize")


@serializable
@dataclass(frozen=True, eq=False)
class ImputeParams:
    medians: np.ndarray
    feature_names: Tuple[str, ...] = ()

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.array(x, dtype=float, copy=True)
        if x.shape[1] != self.medians.shape[0]:
            raise ShapeError(f"Imputer fitted on {self.medians.shape[0]} features, got {x.shape[1]}.")
        rows, cols = np.nonzero(np.isnan(x))
        x[rows, cols] = self.medians[cols]
        return x


def impute_fit(train: Dataset) -> ImputeParams:
    """Per-feature median of the observed training values."""
    observed = ~train.missing_mask
    counts = observed.sum(axis=0)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        name = train.feature_names[int(empty[0])]
        raise FitError(f"Feature '{name}' has no observed training values; cannot impute.", feature=name)
    medians = np.nanmedian(train.features, axis=0)
    logger.info(f"Fitted median imputer on {train.n_samples} rows ({train.n_missing} missing cells).")
    return ImputeParams(medians=medians, feature_names=train.feature_names)


def impute_apply(params: ImputeParams, ds: Dataset) -> Dataset:
    return ds.with_features(params.transform(ds.features))


@serializable
@dataclass(frozen=True, eq=False)
class ScalerParams:
    """
    minmax:      x' = (x − min)/(max − min) · (hi − lo) + lo
    standardize: x' = (x − mean)/σ   (population σ)

    Stored as the affine map x' = x · scale + offset; constant features get
    scale 0 and land on the range midpoint (minmax) or 0 (standardize).
    """
    kind: str
    stat_a: np.ndarray  # min or mean
    stat_b: np.ndarray  # max or std
    scale: np.ndarray
    offset: np.ndarray
    desired_range: Tuple[float, float] = (-1.0, 1.0)

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[1] != self.scale.shape[0]:
            raise ShapeError(f"Scaler fitted on {self.scale.shape[0]} features, got {x.shape[1]}.")
        if np.any(np.isnan(x)):
            raise ShapeError("Scaling needs imputed data; found missing cells.")
        return x * self.scale + self.offset


def scale_fit(train: Dataset, kind: str = "minmax", desired_range: Tuple[float, float] = (-1.0, 1.0)) -> ScalerParams:
    if kind not in SCALER_KINDS:
        raise ParameterError(f"Unknown scaler '{kind}'. Allowed: {', '.join(SCALER_KINDS)}.")
    lo, hi = float(desired_range[0]), float(desired_range[1])
    if not lo < hi:
        raise ParameterError(f"Desired range must satisfy min < max, got [{lo}, {hi}].")
    x = train.features
    if np.any(np.isnan(x)):
        raise ShapeError("Scaling needs imputed data; found missing cells.")
    if kind == "minmax":
        a = x.min(axis=0)
        b = x.max(axis=0)
        span = b - a
        constant = span == 0
        scale = np.where(constant, 0.0, (hi - lo) / np.where(constant, 1.0, span))
        offset = np.where(constant, 0.5 * (lo + hi), lo - a * scale)
    else:
        a = x.mean(axis=0)
        b = x.std(axis=0)
        constant = b == 0
        scale = np.where(constant, 0.0, 1.0 / np.where(constant, 1.0, b))
        offset = -a * scale
    if np.any(constant):
        names = [train.feature_names[i] for i in np.flatnonzero(constant)]
        logger.debug(f"Constant features under {kind} scaling: {names}")
    logger.info(f"Fitted {kind} scaler on {train.n_samples} rows × {train.n_features} features.")
    return ScalerParams(kind=kind, stat_a=a, stat_b=b, scale=scale, offset=offset, desired_range=(lo, hi))


def scale_apply(params: ScalerParams, ds: Dataset) -> Dataset:
    return ds.with_features(params.transform(ds.features))
