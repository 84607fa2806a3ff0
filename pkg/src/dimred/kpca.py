# src/dimred/kpca.py
# Kernel PCA on the double-centred training kernel matrix.

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.errors import FitError, ParameterError, ShapeError
from src.kernels import KernelSpec, kernel_matrix
from src.numerics import as_matrix, sym_eigen
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

EIGENVALUE_FLOOR = 1e-12


@serializable
@dataclass(frozen=True, eq=False)
class KpcaModel:
    train_points: np.ndarray
    kernel: KernelSpec
    eigenvalues: np.ndarray      # of K_c / N, retained only
    eigenvectors: np.ndarray     # N×n unit columns
    kernel_col_means: np.ndarray
    kernel_grand_mean: float
    warnings: Tuple[str, ...] = field(default=())

    @property
    def n_components(self) -> int:
        return self.eigenvalues.shape[0]

    def transform(self, x: np.ndarray) -> np.ndarray:
        return kpca_apply(self, x)


def kpca_fit(x, kernel: Optional[KernelSpec] = None, n_components: int = 2) -> KpcaModel:
    """Scores come out with unit variance per axis on the training rows."""
    data = as_matrix(x, "KPCA input")
    n, d = data.shape
    if n_components < 1:
        raise ParameterError(f"n_components must be at least 1, got {n_components}.")
    spec = (kernel or KernelSpec("rbf")).resolved(d)
    spec.validate()

    gram = kernel_matrix(spec, data, data)
    col_means = gram.mean(axis=0)
    grand = float(gram.mean())
    centered = gram - col_means[None, :] - col_means[:, None] + grand
    eig = sym_eigen(0.5 * (centered + centered.T) / n)

    positive = int(np.sum(eig.values > EIGENVALUE_FLOOR))
    if positive == 0:
        raise FitError("Kernel PCA: every centred-kernel eigenvalue is ≤ 1e-12.")
    kept = min(n_components, positive)
    notes = []
    if kept < n_components:
        note = f"Kernel PCA has only {positive} eigenvalue(s) above 1e-12; returning {kept} of {n_components} requested axes."
        notes.append(note)
        logger.warning(note)
    logger.info(f"Fitted kernel PCA ({spec.kind}) on {n}×{d}: {kept} axis(es).")
    return KpcaModel(
        train_points=data.copy(),
        kernel=spec,
        eigenvalues=eig.values[:kept].copy(),
        eigenvectors=eig.vectors[:, :kept].copy(),
        kernel_col_means=col_means,
        kernel_grand_mean=grand,
        warnings=tuple(notes),
    )


def kpca_apply(model: KpcaModel, x) -> np.ndarray:
    data = as_matrix(x, "KPCA input")
    if data.shape[1] != model.train_points.shape[1]:
        raise ShapeError(f"Kernel PCA fitted on {model.train_points.shape[1]} features, got {data.shape[1]}.")
    cross = kernel_matrix(model.kernel, data, model.train_points)
    centered = (cross - cross.mean(axis=1)[:, None]
                - model.kernel_col_means[None, :] + model.kernel_grand_mean)
    n = model.train_points.shape[0]
    return centered @ model.eigenvectors / (np.sqrt(n) * model.eigenvalues)
