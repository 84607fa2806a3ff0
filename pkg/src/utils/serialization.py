# src/utils/serialization.py
# Dataclass <-> JSON document helpers used for fitted transforms and models.

import dataclasses
from typing import Any, Dict, Type, TypeVar

import numpy as np

FORMAT_VERSION = 1

T = TypeVar("T")

_REGISTRY: Dict[str, type] = {}


def serializable(cls: Type[T]) -> Type[T]:
    """Class decorator registering a dataclass so nested instances can be rebuilt by name."""
    _REGISTRY[cls.__name__] = cls
    return cls


def to_jsonable(value: Any) -> Any:
    """Converts numpy arrays, registered dataclasses and containers into JSON-compatible values."""
    if isinstance(value, np.ndarray):
        return {
            "__ndarray__": True,
            "dtype": str(value.dtype),
            "shape": list(value.shape),
            "data": value.ravel().tolist(),
        }
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        payload = {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
        payload["__dataclass__"] = type(value).__name__
        return payload
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def from_jsonable(value: Any) -> Any:
    """Inverse of to_jsonable."""
    if isinstance(value, dict):
        if value.get("__ndarray__"):
            return np.asarray(value["data"], dtype=value["dtype"]).reshape(value["shape"])
        if "__dataclass__" in value:
            cls_name = value["__dataclass__"]
            cls = _REGISTRY.get(cls_name)
            if cls is None:
                raise ValueError(f"Unknown serialized type '{cls_name}'.")
            kwargs = {k: from_jsonable(v) for k, v in value.items() if k != "__dataclass__"}
            return cls(**kwargs)
        return {k: from_jsonable(v) for k, v in value.items()}
    if isinstance(value, list):
        return [from_jsonable(v) for v in value]
    return value


def document(kind: str, obj: Any, **extra: Any) -> Dict[str, Any]:
    """Wraps a serialized object in the versioned document envelope."""
    doc = {"format_version": FORMAT_VERSION, "kind": kind, "payload": to_jsonable(obj)}
    doc.update({k: to_jsonable(v) for k, v in extra.items()})
    return doc


def read_document(doc: Dict[str, Any]) -> Any:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"Unsupported document format_version {version!r} (expected {FORMAT_VERSION}).")
    return from_jsonable(doc["payload"])
