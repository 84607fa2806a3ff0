# src/models/mlp.py
# Two-layer sigmoid network trained by full-batch gradient descent on cross-entropy.

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.errors import ParameterError, ShapeError, TrainingError
from src.numerics import RngStream, as_matrix, log_sigmoid, sigmoid
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

INIT_RANGE = 0.5


@serializable
@dataclass(frozen=True, eq=False)
class MlpModel:
    hidden_weights: np.ndarray  # H×(D+1), column 0 is the bias
    output_weights: np.ndarray  # H+1, entry 0 is the bias
    hidden_units: int
    final_loss: float = float("nan")
    epochs: int = 0

    def hidden(self, x: np.ndarray) -> np.ndarray:
        data = np.asarray(x, dtype=float)
        return sigmoid(self.hidden_weights[:, 0] + data @ self.hidden_weights[:, 1:].T)

    def score(self, x: np.ndarray) -> np.ndarray:
        h = self.hidden(as_matrix(x, "MLP input"))
        return np.asarray(sigmoid(self.output_weights[0] + h @ self.output_weights[1:]), dtype=float).reshape(-1)


def mlp_loss_and_grad(hidden_weights: np.ndarray, output_weights: np.ndarray, x: np.ndarray,
                      y: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy and its gradients with respect to both weight layers (labels 0/1)."""
    n = x.shape[0]
    h = sigmoid(hidden_weights[:, 0] + x @ hidden_weights[:, 1:].T)
    z = output_weights[0] + h @ output_weights[1:]
    loss = -float(np.mean(y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z)))
    delta_out = (sigmoid(z) - y) / n
    grad_out = np.concatenate([[delta_out.sum()], h.T @ delta_out])
    delta_hidden = np.outer(delta_out, output_weights[1:]) * h * (1.0 - h)
    grad_hidden = np.hstack([delta_hidden.sum(axis=0)[:, None], delta_hidden.T @ x])
    return loss, grad_hidden, grad_out


def mlp_fit(x, y, hidden_units: int = 10, learning_rate: float = 0.1, epochs: int = 2000,
            rng: Optional[RngStream] = None) -> MlpModel:
    """Weights start Uniform(−0.5, 0.5) from `rng`; a non-finite loss aborts with the epoch number."""
    data = as_matrix(x, "MLP input")
    labels = np.asarray(y, dtype=float).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if hidden_units < 1:
        raise ParameterError(f"hidden_units must be at least 1, got {hidden_units}.")
    if not learning_rate > 0:
        raise ParameterError(f"learning_rate must be positive, got {learning_rate}.")
    if epochs < 1:
        raise ParameterError(f"epochs must be at least 1, got {epochs}.")
    if rng is None:
        raise ParameterError("MLP training needs a random stream for weight initialization.")

    gen = rng.generator()
    w_hidden = gen.uniform(-INIT_RANGE, INIT_RANGE, size=(hidden_units, data.shape[1] + 1))
    w_out = gen.uniform(-INIT_RANGE, INIT_RANGE, size=hidden_units + 1)
    loss = float("nan")
    for epoch in range(1, epochs + 1):
        loss, g_hidden, g_out = mlp_loss_and_grad(w_hidden, w_out, data, labels)
        if not np.isfinite(loss) or not (np.all(np.isfinite(g_hidden)) and np.all(np.isfinite(g_out))):
            raise TrainingError(f"MLP loss became non-finite at epoch {epoch}; lower the learning rate.", epoch=epoch)
        w_hidden = w_hidden - learning_rate * g_hidden
        w_out = w_out - learning_rate * g_out
        if epoch % 500 == 0:
            logger.debug(f"MLP epoch {epoch}: loss={loss:.6f}")

    logger.info(f"Fitted MLP (H={hidden_units}, lr={learning_rate}, epochs={epochs}) on "
                f"{data.shape[0]}×{data.shape[1]}: final loss {loss:.5f}.")
    return MlpModel(hidden_weights=w_hidden, output_weights=w_out, hidden_units=int(hidden_units),
                    final_loss=loss, epochs=int(epochs))
