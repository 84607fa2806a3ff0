# src/kernels.py
# Kernel functions shared by the SVM, the Gaussian process classifier and kernel PCA.

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from src.errors import NumericalError, ParameterError
from src.utils.serialization import serializable

KERNEL_KINDS = ("linear", "rbf", "arcsine")


@serializable
@dataclass(frozen=True, eq=False)
class KernelSpec:
    """
    kind: "linear", "rbf" or "arcsine".

    rbf:     variance · exp(-gamma · ‖x − x′‖²)
    arcsine: (2/π) · asin(2 xᵀΣx′ / sqrt((1 + 2 xᵀΣx)(1 + 2 x′ᵀΣx′))), Σ = diag(sigma)
    """
    kind: str = "rbf"
    gamma: Optional[float] = None
    variance: float = 1.0
    sigma: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ParameterError(f"Unknown kernel '{self.kind}'. Allowed: {', '.join(KERNEL_KINDS)}.")
        if self.sigma is not None:
            object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))

    def resolved(self, n_features: int) -> "KernelSpec":
        """Fills defaults that depend on the feature count (gamma = 1/D, Σ = I)."""
        if self.kind == "rbf" and self.gamma is None:
            return KernelSpec("rbf", gamma=1.0 / max(n_features, 1), variance=self.variance)
        if self.kind == "arcsine" and self.sigma is None:
            return KernelSpec("arcsine", variance=self.variance, sigma=np.ones(n_features))
        return self

    def validate(self) -> None:
        """Rejects parameters that would not give a positive semi-definite kernel."""
        if self.kind == "rbf" and (self.gamma is None or not self.gamma > 0):
            raise NumericalError(f"RBF kernel needs gamma > 0, got {self.gamma}.")
        if self.variance <= 0:
            raise NumericalError(f"Kernel variance must be positive, got {self.variance}.")
        if self.kind == "arcsine" and self.sigma is not None and np.any(self.sigma < 0):
            raise NumericalError("Arcsine kernel weight matrix must be non-negative on the diagonal.")

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind, "variance": self.variance}
        if self.gamma is not None:
            out["gamma"] = self.gamma
        return out


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero."""
    a_sq = np.sum(a * a, axis=1)[:, None]
    b_sq = np.sum(b * b, axis=1)[None, :]
    return np.maximum(a_sq + b_sq - 2.0 * (a @ b.T), 0.0)


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """K[i, j] = k(a_i, b_j)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    spec = spec.resolved(a.shape[1])
    spec.validate()
    if spec.kind == "linear":
        return spec.variance * (a @ b.T)
    if spec.kind == "rbf":
        return spec.variance * np.exp(-spec.gamma * squared_distances(a, b))
    weights = spec.sigma
    cross = 2.0 * (a * weights) @ b.T
    norm_a = 1.0 + 2.0 * np.sum(a * a * weights, axis=1)
    norm_b = 1.0 + 2.0 * np.sum(b * b * weights, axis=1)
    ratio = cross / np.sqrt(norm_a[:, None] * norm_b[None, :])
    return spec.variance * (2.0 / np.pi) * np.arcsin(np.clip(ratio, -1.0, 1.0))


def kernel_diagonal(spec: KernelSpec, a: np.ndarray) -> np.ndarray:
    """k(a_i, a_i) for every row."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    spec = spec.resolved(a.shape[1])
    if spec.kind == "linear":
        return spec.variance * np.sum(a * a, axis=1)
    if spec.kind == "rbf":
        return np.full(a.shape[0], spec.variance)
    quad = 2.0 * np.sum(a * a * spec.sigma, axis=1)
    return spec.variance * (2.0 / np.pi) * np.arcsin(np.clip(quad / (1.0 + quad), -1.0, 1.0))
