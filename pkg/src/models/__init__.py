# src/models package
# Seven binary classifiers behind one fit/score/predict contract.

from src.models.adaboost import AdaBoostModel, adaboost_fit
from src.models.base import (
    MODEL_FAMILIES,
    MODEL_KINDS,
    ClassifierModel,
    fit_model,
    predict,
    resolve_params,
    score,
)
from src.models.gp import GpModel, gp_fit, gp_predict_proba, laplace_objective_and_grad
from src.models.kdtree import KdTreeModel, kdtree_fit, kneighbors
from src.models.logistic import LogRegModel, logistic_loss_and_grad, logreg_fit
from src.models.mlp import MlpModel, mlp_fit, mlp_loss_and_grad
from src.models.serialization import model_from_document, model_to_document
from src.models.svm import SvmModel, svm_fit
from src.models.tree import TreeModel, tree_export_dot, tree_feature_importances, tree_fit

__all__ = [
    "MODEL_FAMILIES",
    "MODEL_KINDS",
    "ClassifierModel",
    "fit_model",
    "predict",
    "score",
    "resolve_params",
    "model_to_document",
    "model_from_document",
    "LogRegModel",
    "logreg_fit",
    "logistic_loss_and_grad",
    "KdTreeModel",
    "kdtree_fit",
    "kneighbors",
    "SvmModel",
    "svm_fit",
    "TreeModel",
    "tree_fit",
    "tree_export_dot",
    "tree_feature_importances",
    "AdaBoostModel",
    "adaboost_fit",
    "MlpModel",
    "mlp_fit",
    "mlp_loss_and_grad",
    "GpModel",
    "gp_fit",
    "gp_predict_proba",
    "laplace_objective_and_grad",
]
