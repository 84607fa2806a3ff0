# src/models/serialization.py
# Versioned JSON documents for fitted classifiers.

from typing import Any, Dict

from src.models.base import ClassifierModel
from src.utils.serialization import document, read_document

MODEL_DOCUMENT_KIND = "classifier"


def model_to_document(model: ClassifierModel) -> Dict[str, Any]:
    return document(MODEL_DOCUMENT_KIND, model, model_kind=model.kind, hyperparams=model.hyperparams)


def model_from_document(doc: Dict[str, Any]) -> ClassifierModel:
    if doc.get("kind") != MODEL_DOCUMENT_KIND:
        raise ValueError(f"Document kind '{doc.get('kind')}' is not a classifier.")
    model = read_document(doc)
    if not isinstance(model, ClassifierModel):
        raise ValueError("Classifier document payload did not decode to a ClassifierModel.")
    return model
