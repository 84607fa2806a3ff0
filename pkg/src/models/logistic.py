# src/models/logistic.py
# L2-penalized logistic regression trained with damped Newton iterations.

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.errors import NumericalError, ParameterError, ShapeError
from src.numerics import RngStream, as_matrix, cholesky_solve, log_sigmoid, sigmoid
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

GRADIENT_TOLERANCE = 1e-8
MAX_NEWTON_ITERATIONS = 100
MAX_BACKTRACKS = 40


@serializable
@dataclass(frozen=True, eq=False)
class LogRegModel:
    weights: np.ndarray  # [intercept, w_1..w_D]
    iterations: int = 0
    converged: bool = True
    warnings: Tuple[str, ...] = field(default=())

    def decision(self, x: np.ndarray) -> np.ndarray:
        return self.weights[0] + np.asarray(x, dtype=float) @ self.weights[1:]

    def score(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(sigmoid(self.decision(x)), dtype=float).reshape(-1)


def _augment(x: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((x.shape[0], 1)), x])


def logistic_loss_and_grad(w: np.ndarray, x: np.ndarray, y: np.ndarray, l2_penalty: float) -> Tuple[float, np.ndarray]:
    """
    Negative log-likelihood Σ −[y log σ(z) + (1 − y) log σ(−z)] + ½λ‖w₁..‖²,
    z = w₀ + xᵀw₁.., and its gradient. Labels are 0/1.
    """
    design = _augment(np.asarray(x, dtype=float))
    z = design @ w
    loss = -float(np.sum(y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z)))
    penalized = w.copy()
    penalized[0] = 0.0
    loss += 0.5 * l2_penalty * float(penalized @ penalized)
    grad = design.T @ (sigmoid(z) - y) + l2_penalty * penalized
    return loss, grad


def logreg_fit(x, y, l2_penalty: float = 1.0, rng: Optional[RngStream] = None) -> LogRegModel:
    """Newton iterations until ‖∇‖∞ ≤ 1e-8 or 100 steps; non-convergence is recorded, not raised."""
    data = as_matrix(x, "logistic input")
    labels = np.asarray(y, dtype=float).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if l2_penalty < 0:
        raise ParameterError(f"l2_penalty must be non-negative, got {l2_penalty}.")
    if np.unique(labels).size < 2:
        raise ParameterError("Logistic regression needs both classes in the training labels.")

    design = _augment(data)
    dim = design.shape[1]
    ridge = l2_penalty * np.eye(dim)
    ridge[0, 0] = 0.0
    w = np.zeros(dim)
    loss, grad = logistic_loss_and_grad(w, data, labels, l2_penalty)
    notes = []
    converged = False
    iteration = 0
    for iteration in range(1, MAX_NEWTON_ITERATIONS + 1):
        if np.max(np.abs(grad)) <= GRADIENT_TOLERANCE:
            converged = True
            iteration -= 1
            break
        p = sigmoid(design @ w)
        hessian = design.T @ (design * (p * (1.0 - p))[:, None]) + ridge
        try:
            step = cholesky_solve(hessian, -grad, relative_pivot_tolerance=1e-14)
        except NumericalError as e:
            notes.append(f"Newton Hessian became singular at iteration {iteration} ({e}); weights are diverging.")
            break
        slope = float(grad @ step)
        t = 1.0
        for _ in range(MAX_BACKTRACKS):
            candidate = w + t * step
            cand_loss, cand_grad = logistic_loss_and_grad(candidate, data, labels, l2_penalty)
            if cand_loss <= loss + 1e-4 * t * slope:
                break
            t *= 0.5
        w, loss, grad = candidate, cand_loss, cand_grad
        logger.debug(f"Newton iteration {iteration}: loss={loss:.6g}, |grad|∞={np.max(np.abs(grad)):.3e}")
    else:
        converged = np.max(np.abs(grad)) <= GRADIENT_TOLERANCE

    if not converged and not notes:
        notes.append(f"Logistic regression did not reach |grad|∞ ≤ {GRADIENT_TOLERANCE} "
                     f"in {MAX_NEWTON_ITERATIONS} Newton iterations (final {np.max(np.abs(grad)):.3e}).")
    for note in notes:
        logger.warning(note)
    logger.info(f"Fitted logistic regression on {data.shape[0]}×{data.shape[1]} "
                f"(l2={l2_penalty}, iterations={iteration}, converged={converged}).")
    return LogRegModel(weights=w, iterations=iteration, converged=bool(converged), warnings=tuple(notes))
