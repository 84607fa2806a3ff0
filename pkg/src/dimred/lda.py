# src/dimred/lda.py
# Fisher linear discriminant analysis.

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from src.errors import FitError, ParameterError, ShapeError
from src.numerics import as_matrix, cholesky, solve_lower, solve_upper, sym_eigen
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

WITHIN_SCATTER_RIDGE = 1e-6


@serializable
@dataclass(frozen=True, eq=False)
class LdaModel:
    directions: np.ndarray  # n×D, unit rows
    class_means: np.ndarray  # C×D
    classes: np.ndarray
    overall_mean: np.ndarray
    warnings: Tuple[str, ...] = field(default=())

    @property
    def n_components(self) -> int:
        return self.directions.shape[0]

    def transform(self, x: np.ndarray) -> np.ndarray:
        return lda_apply(self, x)


def scatter_matrices(x: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Within-class and between-class scatter, plus the class list and class means."""
    classes = np.unique(labels)
    overall = x.mean(axis=0)
    d = x.shape[1]
    within = np.zeros((d, d))
    between = np.zeros((d, d))
    means = []
    for cls in classes:
        rows = x[labels == cls]
        mu = rows.mean(axis=0)
        centered = rows - mu
        within += centered.T @ centered
        diff = (mu - overall)[:, None]
        between += rows.shape[0] * (diff @ diff.T)
        means.append(mu)
    return within, between, classes, np.array(means)


def fisher_ratio(direction: np.ndarray, within: np.ndarray, between: np.ndarray) -> float:
    w = np.asarray(direction, dtype=float)
    return float(w @ between @ w) / float(w @ within @ w)


def lda_fit(x, labels, n_components: int = 1) -> LdaModel:
    """
    Directions maximizing between-class over within-class scatter.

    Solves S_b w = λ (S_w + εI) w through the Cholesky factor of the regularized
    S_w, so the reduced problem stays symmetric. At most C − 1 axes exist; a
    larger request is truncated and noted in `warnings`.
    """
    data = as_matrix(x, "LDA input")
    y = np.asarray(labels).ravel()
    if y.shape[0] != data.shape[0]:
        raise ShapeError(f"{y.shape[0]} labels for {data.shape[0]} rows.")
    if n_components < 1:
        raise ParameterError(f"n_components must be at least 1, got {n_components}.")
    within, between, classes, means = scatter_matrices(data, y)
    if classes.size < 2:
        raise FitError("LDA needs at least two classes in the training labels.")
    d = data.shape[1]
    notes = []
    max_axes = min(classes.size - 1, d)
    kept = n_components
    if n_components > max_axes:
        kept = max_axes
        note = f"LDA can produce at most {max_axes} axis(es) for {classes.size} classes; requested {n_components}, returned {kept}."
        notes.append(note)
        logger.warning(note)

    eps = WITHIN_SCATTER_RIDGE * float(np.trace(within)) / d
    if eps <= 0:
        eps = WITHIN_SCATTER_RIDGE
    low = cholesky(within + eps * np.eye(d))
    half = solve_lower(low, between)          # L⁻¹ S_b
    reduced = solve_lower(low, half.T).T      # L⁻¹ S_b L⁻ᵀ
    eig = sym_eigen(0.5 * (reduced + reduced.T))
    directions = np.empty((kept, d))
    for i in range(kept):
        w = solve_upper(low.T, eig.vectors[:, i])
        w = w / np.linalg.norm(w)
        if w[int(np.argmax(np.abs(w)))] < 0:
            w = -w
        directions[i] = w
    logger.info(f"Fitted LDA on {data.shape[0]}×{d} with {classes.size} classes: {kept} axis(es), "
                f"leading ratio {eig.values[0]:.4g}.")
    return LdaModel(directions=directions, class_means=means, classes=classes,
                    overall_mean=data.mean(axis=0), warnings=tuple(notes))


def lda_apply(model: LdaModel, x) -> np.ndarray:
    data = as_matrix(x, "LDA input")
    if data.shape[1] != model.overall_mean.shape[0]:
        raise ShapeError(f"LDA fitted on {model.overall_mean.shape[0]} features, got {data.shape[1]}.")
    return (data - model.overall_mean) @ model.directions.T
