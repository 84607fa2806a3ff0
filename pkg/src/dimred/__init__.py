# src/dimred package
# PCA, LDA, ISOMAP and kernel PCA behind one fit_projection() entry point.

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.dimred.isomap import DEFAULT_NEIGHBORS, IsomapModel, isomap_apply, isomap_fit
from src.dimred.kpca import KpcaModel, kpca_apply, kpca_fit
from src.dimred.lda import LdaModel, fisher_ratio, lda_apply, lda_fit, scatter_matrices
from src.dimred.pca import PcaModel, explained_variance, pca_apply, pca_fit, variance_profile
from src.errors import ParameterError, ShapeError
from src.kernels import KernelSpec
from src.utils.serialization import serializable

DIMRED_METHODS = ("none", "pca", "lda", "isomap", "kpca")


@serializable
@dataclass(frozen=True, eq=False)
class IdentityProjection:
    n_features: int

    @property
    def n_components(self) -> int:
        return self.n_features

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[1] != self.n_features:
            raise ShapeError(f"Projection expects {self.n_features} features, got {x.shape[1]}.")
        return x


def fit_projection(method: str, x: np.ndarray, labels: np.ndarray, n_components: Optional[int],
                   params: Optional[Dict[str, Any]] = None):
    """Fits the named projection on training rows; the result exposes `.transform(x)`."""
    params = dict(params or {})
    if method == "none":
        return IdentityProjection(n_features=int(np.asarray(x).shape[1]))
    if n_components is None:
        raise ParameterError(f"Dimensionality reduction '{method}' needs n_components.")
    if method == "pca":
        return pca_fit(x, n_components)
    if method == "lda":
        return lda_fit(x, labels, n_components)
    if method == "isomap":
        return isomap_fit(x, int(params.get("k_neighbors", DEFAULT_NEIGHBORS)), n_components)
    if method == "kpca":
        kernel = KernelSpec(
            kind=params.get("kernel", "rbf"),
            gamma=params.get("gamma"),
            variance=float(params.get("variance", 1.0)),
        )
        return kpca_fit(x, kernel, n_components)
    raise ParameterError(f"Unknown dimensionality reduction '{method}'. Allowed: {', '.join(DIMRED_METHODS)}.")


__all__ = [
    "DIMRED_METHODS",
    "IdentityProjection",
    "fit_projection",
    "PcaModel",
    "pca_fit",
    "pca_apply",
    "explained_variance",
    "variance_profile",
    "LdaModel",
    "lda_fit",
    "lda_apply",
    "fisher_ratio",
    "scatter_matrices",
    "IsomapModel",
    "isomap_fit",
    "isomap_apply",
    "KpcaModel",
    "kpca_fit",
    "kpca_apply",
]
