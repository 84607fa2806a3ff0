# src/models/svm.py
# Soft-margin kernel SVM solved in the dual by sequential minimal optimization.

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import ConvergenceError, ParameterError, ShapeError
from src.kernels import KernelSpec, kernel_matrix
from src.numerics import as_matrix
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

SUPPORT_THRESHOLD = 1e-8
DEFAULT_TOLERANCE = 1e-3
DEFAULT_MAX_ITER = 200_000
TAU = 1e-12


@serializable
@dataclass(frozen=True, eq=False)
class SvmModel:
    support_vectors: np.ndarray
    support_labels: np.ndarray  # ±1
    dual_coef: np.ndarray       # α > 1e-8
    bias: float
    kernel: KernelSpec
    c: float
    tol: float = DEFAULT_TOLERANCE
    iterations: int = 0

    @property
    def n_support(self) -> int:
        return self.dual_coef.shape[0]

    def score(self, x: np.ndarray) -> np.ndarray:
        data = as_matrix(x, "SVM input")
        if self.n_support == 0:
            return np.full(data.shape[0], self.bias)
        gram = kernel_matrix(self.kernel, data, self.support_vectors)
        return gram @ (self.dual_coef * self.support_labels) + self.bias


def _violation(alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, c: float):
    """Maximal violating pair (i ∈ I_up, j ∈ I_low) and the gap m − M."""
    score = -y * grad
    up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
    up_scores = np.where(up, score, -np.inf)
    low_scores = np.where(low, score, np.inf)
    i = int(np.argmax(up_scores))
    j = int(np.argmin(low_scores))
    return i, j, float(up_scores[i] - low_scores[j])


def _bias(alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, c: float) -> float:
    y_grad = y * grad
    upper = alpha >= c
    lower = alpha <= 0
    free = ~upper & ~lower
    if np.any(free):
        rho = float(np.mean(y_grad[free]))
    else:
        ub_mask = (upper & (y < 0)) | (lower & (y > 0))
        lb_mask = (upper & (y > 0)) | (lower & (y < 0))
        ub = float(np.min(y_grad[ub_mask])) if np.any(ub_mask) else np.inf
        lb = float(np.max(y_grad[lb_mask])) if np.any(lb_mask) else -np.inf
        rho = 0.5 * (ub + lb) if np.isfinite(ub) and np.isfinite(lb) else (ub if np.isfinite(ub) else lb)
    return -rho


def svm_fit(x, y, c: float = 1.0, kernel: Optional[KernelSpec] = None, tol: float = DEFAULT_TOLERANCE,
            max_iter: int = DEFAULT_MAX_ITER) -> SvmModel:
    """
    Dual problem  min ½ αᵀQα − Σα,  Q_ij = y_i y_j k(x_i, x_j),  0 ≤ α ≤ C,  Σ α y = 0.

    Each step moves the maximal violating pair analytically and clips to the
    box; iteration stops once the KKT gap m − M ≤ tol. Labels are ±1.
    """
    data = as_matrix(x, "SVM input")
    labels = np.asarray(y, dtype=float).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ParameterError("SVM labels must be -1 or +1.")
    if not c > 0:
        raise ParameterError(f"C must be positive, got {c}.")
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}.")
    spec = (kernel or KernelSpec("rbf")).resolved(data.shape[1])
    spec.validate()

    n = data.shape[0]
    gram = kernel_matrix(spec, data, data)
    q = labels[:, None] * labels[None, :] * gram
    diag = np.diag(gram).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)
    if np.unique(labels).size < 2:
        raise ParameterError("SVM needs both classes in the training labels.")

    iteration = 0
    gap = np.inf
    while True:
        i, j, gap = _violation(alpha, grad, labels, c)
        if gap <= tol:
            break
        if iteration >= max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} iterations (max KKT violation {gap:.3e}).",
                max_violation=gap,
            )
        iteration += 1
        quad = diag[i] + diag[j] - 2.0 * gram[i, j]
        if quad <= 0:
            quad = TAU
        old_i, old_j = alpha[i], alpha[j]
        if labels[i] != labels[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai, aj = old_i + delta, old_j + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > c:
                    ai, aj = c, c - diff
            elif aj > c:
                aj, ai = c, c + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            ai, aj = old_i - delta, old_j + delta
            if total > c:
                if ai > c:
                    ai, aj = c, total - c
            elif aj < 0:
                aj, ai = 0.0, total
            if total > c:
                if aj > c:
                    aj, ai = c, total - c
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        grad += q[:, i] * (ai - old_i) + q[:, j] * (aj - old_j)
        if iteration % 10_000 == 0:
            logger.debug(f"SMO iteration {iteration}: KKT gap {gap:.3e}")

    bias = _bias(alpha, grad, labels, c)
    keep = alpha > SUPPORT_THRESHOLD
    logger.info(f"Fitted SVM ({spec.kind}, C={c}) on {n}×{data.shape[1]}: {int(keep.sum())} support vectors, "
                f"{iteration} SMO steps, final gap {gap:.3e}.")
    return SvmModel(
        support_vectors=data[keep].copy(),
        support_labels=labels[keep].copy(),
        dual_coef=alpha[keep].copy(),
        bias=float(bias),
        kernel=spec,
        c=float(c),
        tol=float(tol),
        iterations=iteration,
    )
