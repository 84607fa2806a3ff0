# src/models/base.py
# Uniform classifier contract: fit_model() → ClassifierModel, score() and predict().

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from src.errors import ParameterError, ShapeError
from src.kernels import KernelSpec
from src.models.adaboost import adaboost_fit
from src.models.gp import gp_fit
from src.models.kdtree import kdtree_fit
from src.models.logistic import logreg_fit
from src.models.mlp import mlp_fit
from src.models.svm import DEFAULT_TOLERANCE, svm_fit
from src.models.tree import tree_fit
from src.numerics import RngStream
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

PROBABILITY_THRESHOLD = 0.5
MARGIN_THRESHOLD = 0.0


@serializable
@dataclass(frozen=True, eq=False)
class ClassifierModel:
    """
    A fitted classifier of one of the seven families.

    predict(x) is 1 exactly when score(x) > threshold; the threshold is 0.5 for
    probability-type scores and 0 for margins.
    """
    kind: str
    payload: Any
    threshold: float
    hyperparams: Dict[str, Any]
    seed: Optional[int]
    n_features: int
    warnings: Tuple[str, ...] = field(default=())

    def score(self, x: np.ndarray) -> np.ndarray:
        data = np.atleast_2d(np.asarray(x, dtype=float))
        if data.shape[1] != self.n_features:
            raise ShapeError(f"{self.kind} model expects {self.n_features} features, got {data.shape[1]}.")
        return np.asarray(self.payload.score(data), dtype=float).reshape(-1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        if hasattr(self.payload, "predict"):
            data = np.atleast_2d(np.asarray(x, dtype=float))
            if data.shape[1] != self.n_features:
                raise ShapeError(f"{self.kind} model expects {self.n_features} features, got {data.shape[1]}.")
            return self.payload.predict(data, self.threshold)
        return (self.score(x) > self.threshold).astype(np.int64)


@dataclass(frozen=True)
class ModelFamily:
    kind: str
    fit: Callable[[np.ndarray, np.ndarray, Dict[str, Any], RngStream], Any]
    defaults: Dict[str, Any]
    threshold: float
    signed_labels: bool = False


def _signed(y01: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(y01) > 0, 1.0, -1.0)


def _fit_logistic(x, y, p, rng):
    return logreg_fit(x, y, l2_penalty=float(p["l2_penalty"]), rng=rng)


def _fit_kdtree(x, y, p, rng):
    return kdtree_fit(x, y, k=int(p["k"]))


def _fit_svm(x, y, p, rng):
    kernel = KernelSpec(kind=p["kernel"], gamma=p.get("gamma"), variance=float(p.get("variance", 1.0)))
    return svm_fit(x, y, c=float(p["c"]), kernel=kernel, tol=float(p["tol"]), max_iter=int(p["max_iter"]))


def _fit_tree(x, y, p, rng):
    depth = p.get("max_depth")
    return tree_fit(x, y, max_depth=None if depth is None else int(depth), min_leaf=int(p["min_leaf"]),
                    criterion=p["criterion"])


def _fit_adaboost(x, y, p, rng):
    return adaboost_fit(x, y, n_rounds=int(p["n_rounds"]))


def _fit_mlp(x, y, p, rng):
    return mlp_fit(x, y, hidden_units=int(p["hidden_units"]), learning_rate=float(p["learning_rate"]),
                   epochs=int(p["epochs"]), rng=rng)


def _fit_gp(x, y, p, rng):
    scale = p.get("scale")
    grid = p.get("scale_grid")
    return gp_fit(x, y, kernel=p["kernel"], scale=None if scale is None else float(scale),
                  scale_grid=grid, variance=float(p["variance"]))


MODEL_FAMILIES: Dict[str, ModelFamily] = {
    "logistic": ModelFamily("logistic", _fit_logistic, {"l2_penalty": 1.0}, PROBABILITY_THRESHOLD),
    "kdtree": ModelFamily("kdtree", _fit_kdtree, {"k": 5}, PROBABILITY_THRESHOLD),
    "svm": ModelFamily("svm", _fit_svm,
                       {"c": 1.0, "kernel": "rbf", "gamma": None, "tol": DEFAULT_TOLERANCE, "max_iter": 200_000},
                       MARGIN_THRESHOLD, signed_labels=True),
    "tree": ModelFamily("tree", _fit_tree, {"max_depth": None, "min_leaf": 1, "criterion": "gini"},
                        PROBABILITY_THRESHOLD),
    "adaboost": ModelFamily("adaboost", _fit_adaboost, {"n_rounds": 100}, MARGIN_THRESHOLD, signed_labels=True),
    "mlp": ModelFamily("mlp", _fit_mlp, {"hidden_units": 10, "learning_rate": 0.1, "epochs": 2000},
                       PROBABILITY_THRESHOLD),
    "gp": ModelFamily("gp", _fit_gp, {"kernel": "rbf", "scale": None, "scale_grid": None, "variance": 1.0},
                      PROBABILITY_THRESHOLD, signed_labels=True),
}
MODEL_KINDS = tuple(MODEL_FAMILIES)


def resolve_params(kind: str, params: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Family defaults overlaid with `params`; unknown keys are rejected."""
    family = MODEL_FAMILIES.get(kind)
    if family is None:
        raise ParameterError(f"Unknown model kind '{kind}'. Allowed: {', '.join(MODEL_KINDS)}.")
    params = dict(params or {})
    unknown = sorted(set(params) - set(family.defaults))
    if unknown:
        raise ParameterError(f"Unknown hyperparameter(s) for {kind}: {', '.join(unknown)}.")
    resolved = dict(family.defaults)
    resolved.update(params)
    return resolved


def fit_model(kind: str, x, y01, params: Optional[Dict[str, Any]] = None,
              rng: Optional[RngStream] = None) -> ClassifierModel:
    """Fits family `kind` on 0/1 labels; families trained on ±1 labels get them converted here."""
    resolved = resolve_params(kind, params)
    family = MODEL_FAMILIES[kind]
    data = np.asarray(x, dtype=float)
    labels = np.asarray(y01).astype(np.int64).ravel()
    if data.ndim != 2 or labels.shape[0] != data.shape[0]:
        raise ShapeError(f"Model input must be N×D with N labels, got {data.shape} and {labels.shape[0]} labels.")
    target = _signed(labels) if family.signed_labels else labels
    payload = family.fit(data, target, resolved, rng)
    return ClassifierModel(
        kind=kind,
        payload=payload,
        threshold=family.threshold,
        hyperparams=resolved,
        seed=None if rng is None else int(rng.seed),
        n_features=int(data.shape[1]),
        warnings=tuple(getattr(payload, "warnings", ()) or ()),
    )


def score(model: ClassifierModel, x) -> np.ndarray:
    return model.score(x)


def predict(model: ClassifierModel, x) -> np.ndarray:
    return model.predict(x)
