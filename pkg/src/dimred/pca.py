# src/dimred/pca.py
# Principal component analysis via the covariance eigensystem.

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from src.errors import ParameterError, ShapeError
from src.numerics import as_matrix, sym_eigen
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)


@serializable
@dataclass(frozen=True, eq=False)
class PcaModel:
    """
    components: n×D orthonormal rows (top-n covariance eigenvectors).
    all_eigenvalues: every covariance eigenvalue, kept for the variance profile.
    """
    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    all_eigenvalues: np.ndarray
    total_variance: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def transform(self, x: np.ndarray) -> np.ndarray:
        return pca_apply(self, x)


def pca_fit(x, n_components: int) -> PcaModel:
    data = as_matrix(x, "PCA input")
    n, d = data.shape
    if not 1 <= n_components <= min(n, d):
        raise ParameterError(f"n_components must be in [1, {min(n, d)}], got {n_components}.")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / n
    eig = sym_eigen(0.5 * (cov + cov.T))
    values = np.maximum(eig.values, 0.0)
    total = float(np.trace(cov))
    logger.info(f"Fitted PCA on {n}×{d}: kept {n_components} components "
                f"({float(values[:n_components].sum() / total) if total > 0 else 0.0:.4f} of variance).")
    return PcaModel(
        mean=mean,
        components=eig.vectors[:, :n_components].T.copy(),
        eigenvalues=values[:n_components].copy(),
        all_eigenvalues=values,
        total_variance=total,
    )


def pca_apply(model: PcaModel, x) -> np.ndarray:
    data = as_matrix(x, "PCA input")
    if data.shape[1] != model.mean.shape[0]:
        raise ShapeError(f"PCA fitted on {model.mean.shape[0]} features, got {data.shape[1]}.")
    return (data - model.mean) @ model.components.T


def explained_variance(model: PcaModel) -> List[float]:
    """Cumulative explained fraction over the retained components."""
    if model.total_variance <= 0:
        return [0.0] * model.n_components
    return np.cumsum(model.eigenvalues / model.total_variance).tolist()


def variance_profile(model: PcaModel) -> Dict[str, List[float]]:
    """Individual and cumulative explained fractions for every component, retained or not."""
    if model.total_variance <= 0:
        fractions = np.zeros_like(model.all_eigenvalues)
    else:
        fractions = model.all_eigenvalues / model.total_variance
    return {
        "component": list(range(1, fractions.shape[0] + 1)),
        "fraction": fractions.tolist(),
        "cumulative": np.cumsum(fractions).tolist(),
    }
