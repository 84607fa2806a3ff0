# src/models/adaboost.py
# Discrete AdaBoost over one-feature decision stumps.

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from src.errors import ParameterError, ShapeError
from src.numerics import as_matrix
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

ERROR_CLAMP = 1e-10


@serializable
@dataclass(frozen=True, eq=False)
class AdaBoostModel:
    """Stump t predicts polarity[t] when x[feature[t]] > threshold[t], else −polarity[t]."""
    features: np.ndarray
    thresholds: np.ndarray
    polarities: np.ndarray
    alphas: np.ndarray
    errors: np.ndarray
    warnings: Tuple[str, ...] = field(default=())

    @property
    def n_rounds(self) -> int:
        return self.alphas.shape[0]

    def stump_outputs(self, x: np.ndarray) -> np.ndarray:
        """N×T matrix of ±1 stump predictions."""
        data = as_matrix(x, "AdaBoost input")
        if self.n_rounds == 0:
            return np.zeros((data.shape[0], 0))
        above = data[:, self.features] > self.thresholds[None, :]
        return np.where(above, 1.0, -1.0) * self.polarities[None, :]

    def score(self, x: np.ndarray) -> np.ndarray:
        return self.stump_outputs(x) @ self.alphas

    def staged_scores(self, x: np.ndarray) -> np.ndarray:
        """Column t is the ensemble score after t + 1 rounds."""
        return np.cumsum(self.stump_outputs(x) * self.alphas[None, :], axis=1)


def best_stump(x: np.ndarray, y: np.ndarray, weights: np.ndarray, sorted_index: np.ndarray) -> Tuple[int, float, float, float]:
    """
    Lowest weighted-error stump as (feature, threshold, polarity, error).

    Candidate thresholds per feature: min − 1 (constant rule) and midpoints of
    consecutive distinct values. Ties keep the earliest feature, then the lowest
    threshold, then polarity +1.
    """
    total = float(weights.sum())
    best = None
    for f in range(x.shape[1]):
        order = sorted_index[:, f]
        values = x[order, f]
        w_pos = np.where(y[order] > 0, weights[order], 0.0)
        w_neg = np.where(y[order] < 0, weights[order], 0.0)
        cut = np.flatnonzero(values[1:] > values[:-1])
        # polarity +1 at min − 1 predicts +1 everywhere, so it errs on every negative
        thresholds = np.concatenate([[values[0] - 1.0], 0.5 * (values[cut] + values[cut + 1])])
        err_plus = np.concatenate([[w_neg.sum()], np.cumsum(w_pos)[cut] + (w_neg.sum() - np.cumsum(w_neg)[cut])])
        interleaved = np.column_stack([err_plus, total - err_plus]).ravel()
        k = int(np.argmin(interleaved))
        err = float(interleaved[k])
        if best is None or err < best[3]:
            best = (f, float(thresholds[k // 2]), 1.0 if k % 2 == 0 else -1.0, err)
    return best


def adaboost_fit(x, y, n_rounds: int = 100) -> AdaBoostModel:
    """
    Labels are ±1. α_t = ½ ln((1 − ε_t)/ε_t) with ε clamped to [1e-10, 1 − 1e-10];
    a round with ε ≥ 0.5 ends training unrecorded, a perfect stump ends it after being recorded.
    """
    data = as_matrix(x, "AdaBoost input")
    labels = np.asarray(y, dtype=float).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ParameterError("AdaBoost labels must be -1 or +1.")
    if n_rounds < 1:
        raise ParameterError(f"n_rounds must be at least 1, got {n_rounds}.")

    n = data.shape[0]
    weights = np.full(n, 1.0 / n)
    sorted_index = np.argsort(data, axis=0, kind="stable")
    stumps, alphas, errors, notes = [], [], [], []
    for round_no in range(1, n_rounds + 1):
        feature, threshold, polarity, eps = best_stump(data, labels, weights, sorted_index)
        if eps >= 0.5:
            note = f"AdaBoost stopped at round {round_no}: best stump error {eps:.4f} ≥ 0.5."
            notes.append(note)
            logger.warning(note)
            break
        clamped = min(max(eps, ERROR_CLAMP), 1.0 - ERROR_CLAMP)
        alpha = 0.5 * np.log((1.0 - clamped) / clamped)
        stumps.append((feature, threshold, polarity))
        alphas.append(alpha)
        errors.append(eps)
        if eps <= ERROR_CLAMP:
            logger.debug(f"AdaBoost round {round_no}: perfect stump, stopping.")
            break
        prediction = np.where(data[:, feature] > threshold, polarity, -polarity)
        weights = weights * np.exp(-alpha * labels * prediction)
        weights = weights / weights.sum()
        logger.debug(f"AdaBoost round {round_no}: feature {feature}, threshold {threshold:.4g}, ε={eps:.4f}")

    logger.info(f"Fitted AdaBoost on {n}×{data.shape[1]}: {len(alphas)} rounds.")
    return AdaBoostModel(
        features=np.array([s[0] for s in stumps], dtype=np.int64),
        thresholds=np.array([s[1] for s in stumps], dtype=float),
        polarities=np.array([s[2] for s in stumps], dtype=float),
        alphas=np.array(alphas, dtype=float),
        errors=np.array(errors, dtype=float),
        warnings=tuple(notes),
    )
