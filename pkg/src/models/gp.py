# src/models/gp.py
# Gaussian process classifier: logistic likelihood, Laplace approximation, grid-selected kernel width.

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import NumericalError, ParameterError, ShapeError
from src.kernels import KernelSpec, kernel_diagonal, kernel_matrix
from src.numerics import as_matrix, cholesky, cholesky_solve, log_sigmoid, sigmoid, solve_lower, solve_upper
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

JITTER_FACTOR = 1e-8
MAX_JITTER_FACTOR = 1e-2
NEWTON_MAX_ITER = 100
NEWTON_TOLERANCE = 1e-9
GP_KERNELS = ("rbf", "arcsine")


@serializable
@dataclass(frozen=True, eq=False)
class GpModel:
    train_points: np.ndarray
    kernel: KernelSpec
    latent_mode: np.ndarray       # f̂
    latent_gradient: np.ndarray   # ∇ log p(y | f̂)
    sqrt_w: np.ndarray            # √W at the mode
    chol: np.ndarray              # L with L Lᵀ = I + √W K √W
    jitter: float
    log_marginal_likelihood: float
    scale_grid: List[Tuple[float, float]] = field(default_factory=list)

    def latent_moments(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        data = as_matrix(x, "GP input")
        if data.shape[1] != self.train_points.shape[1]:
            raise ShapeError(f"GP fitted on {self.train_points.shape[1]} features, got {data.shape[1]}.")
        cross = kernel_matrix(self.kernel, self.train_points, data)  # N×M
        mean = cross.T @ self.latent_gradient
        v = solve_lower(self.chol, self.sqrt_w[:, None] * cross)
        var = kernel_diagonal(self.kernel, data) - np.sum(v * v, axis=0)
        return mean, np.maximum(var, 0.0)

    def score(self, x: np.ndarray) -> np.ndarray:
        return gp_predict_proba(self, x)


def laplace_objective_and_grad(w: np.ndarray, k: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    """½ wᵀK⁻¹w − Σ log σ(yᵢ wᵢ) and its gradient K⁻¹w − y ⊙ σ(−y ⊙ w); labels ±1."""
    k_inv_w = cholesky_solve(k, w)
    value = 0.5 * float(w @ k_inv_w) - float(np.sum(log_sigmoid(y * w)))
    grad = k_inv_w - y * sigmoid(-y * w)
    return value, grad


def _stable_gram(spec: KernelSpec, x: np.ndarray) -> Tuple[np.ndarray, float]:
    """K + jitter·I, escalating jitter ×10 from 1e-8 to 1e-2 times the mean diagonal until Cholesky succeeds."""
    gram = kernel_matrix(spec, x, x)
    scale = float(np.mean(np.diag(gram)))
    if not scale > 0:
        scale = 1.0
    factor = JITTER_FACTOR
    while True:
        jitter = factor * scale
        candidate = gram + jitter * np.eye(gram.shape[0])
        try:
            cholesky(candidate)
            if factor > JITTER_FACTOR:
                logger.warning(f"GP kernel matrix needed jitter {jitter:.3e} to be positive definite.")
            return candidate, jitter
        except NumericalError as e:
            factor *= 10.0
            if factor > MAX_JITTER_FACTOR * (1 + 1e-9):
                raise NumericalError(
                    f"GP kernel matrix is not positive definite even with jitter {MAX_JITTER_FACTOR:g}×mean diagonal.",
                    pivot_index=e.pivot_index,
                ) from e


def _laplace_mode(gram: np.ndarray, y: np.ndarray):
    """Newton iterations for the posterior mode; returns (f, grad_log_lik, sqrt_w, L, log marginal likelihood)."""
    n = y.shape[0]
    t = 0.5 * (y + 1.0)
    f = np.zeros(n)
    a = np.zeros(n)
    psi_old = -np.inf
    for iteration in range(1, NEWTON_MAX_ITER + 1):
        pi = sigmoid(f)
        w = pi * (1.0 - pi)
        sw = np.sqrt(w)
        low = cholesky(np.eye(n) + sw[:, None] * gram * sw[None, :])
        b = w * f + (t - pi)
        a_full = b - sw * solve_upper(low.T, solve_lower(low, sw * (gram @ b)))
        a_new = a_full
        f_new = gram @ a_new
        psi = -0.5 * float(a_new @ f_new) + float(np.sum(log_sigmoid(y * f_new)))
        step = 1.0
        while psi < psi_old - 1e-12 and step > 1e-4:
            step *= 0.5
            a_new = a + step * (a_full - a)
            f_new = gram @ a_new
            psi = -0.5 * float(a_new @ f_new) + float(np.sum(log_sigmoid(y * f_new)))
        a, f = a_new, f_new
        converged = abs(psi - psi_old) <= NEWTON_TOLERANCE * max(1.0, abs(psi))
        psi_old = psi
        if converged:
            break
    pi = sigmoid(f)
    sw = np.sqrt(pi * (1.0 - pi))
    low = cholesky(np.eye(n) + sw[:, None] * gram * sw[None, :])
    grad_log_lik = t - pi
    lml = -0.5 * float(a @ f) + float(np.sum(log_sigmoid(y * f))) - float(np.sum(np.log(np.diag(low))))
    logger.debug(f"Laplace mode after {iteration} Newton iterations, log marginal likelihood {lml:.5f}")
    return f, grad_log_lik, sw, low, lml


def _kernel_for(kind: str, scale: float, variance: float, n_features: int) -> KernelSpec:
    """RBF: scale is the length-scale ℓ (γ = 1/(2ℓ²)); arcsine: Σ = scale · I."""
    if kind == "rbf":
        return KernelSpec("rbf", gamma=1.0 / (2.0 * scale * scale), variance=variance)
    return KernelSpec("arcsine", variance=variance, sigma=np.full(n_features, scale))


def default_scale_grid(kind: str, n_features: int) -> np.ndarray:
    if kind == "rbf":
        return np.logspace(-1, 1, 7) * np.sqrt(n_features)
    return np.logspace(-1, 1, 7)


def gp_fit(x, y, kernel: str = "rbf", scale: Optional[float] = None,
           scale_grid: Optional[Sequence[float]] = None, variance: float = 1.0) -> GpModel:
    """
    Labels are ±1. With `scale` fixed the kernel is used as given; otherwise every
    grid value is fitted and the one with the highest Laplace approximate log
    marginal likelihood wins (ties keep the smaller value).
    """
    data = as_matrix(x, "GP input")
    labels = np.asarray(y, dtype=float).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if data.shape[0] < 2:
        raise ParameterError("GP classification needs at least two training rows.")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ParameterError("GP labels must be -1 or +1.")
    if kernel not in GP_KERNELS:
        raise ParameterError(f"Unknown GP kernel '{kernel}'. Allowed: {', '.join(GP_KERNELS)}.")
    if not variance > 0:
        raise NumericalError(f"Kernel variance must be positive, got {variance}.")
    candidates = [float(scale)] if scale is not None else sorted(
        float(s) for s in (scale_grid if scale_grid is not None else default_scale_grid(kernel, data.shape[1])))
    if not candidates or any(not s > 0 for s in candidates):
        raise ParameterError(f"GP kernel scales must be positive, got {candidates}.")

    best = None
    grid_results: List[Tuple[float, float]] = []
    for value in candidates:
        spec = _kernel_for(kernel, value, variance, data.shape[1])
        gram, jitter = _stable_gram(spec, data)
        f, grad_log_lik, sw, low, lml = _laplace_mode(gram, labels)
        grid_results.append((value, lml))
        if best is None or lml > best[0]:
            best = (lml, spec, f, grad_log_lik, sw, low, jitter)
    lml, spec, f, grad_log_lik, sw, low, jitter = best
    logger.info(f"Fitted GP classifier ({kernel}) on {data.shape[0]}×{data.shape[1]}: "
                f"chosen {spec.describe()}, log marginal likelihood {lml:.4f} over {len(candidates)} candidate(s).")
    return GpModel(
        train_points=data.copy(),
        kernel=spec,
        latent_mode=f,
        latent_gradient=grad_log_lik,
        sqrt_w=sw,
        chol=low,
        jitter=float(jitter),
        log_marginal_likelihood=float(lml),
        scale_grid=grid_results,
    )


def gp_predict_proba(model: GpModel, x) -> np.ndarray:
    """σ(μ / √(1 + π s²/8)): the logistic link under the Gaussian latent predictive."""
    mean, var = model.latent_moments(x)
    return np.asarray(sigmoid(mean / np.sqrt(1.0 + np.pi * var / 8.0)), dtype=float).reshape(-1)
