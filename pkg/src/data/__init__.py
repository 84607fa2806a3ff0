# src/data/__init__.py
from src.data.arff import ArffAttribute, ArffTable, read_arff
from src.data.dataset import (
    Dataset,
    KOREAN_FEATURES,
    LOADERS,
    POLISH_FEATURE_DESCRIPTIONS,
    load_korean,
    load_polish,
)
from src.data.preprocessing import ImputeParams, ScalerParams, impute_apply, impute_fit, scale_apply, scale_fit
from src.data.sampling import smote, stratified_split, stratified_split_indices, stratified_subsample

__all__ = [
    "ArffAttribute",
    "ArffTable",
    "read_arff",
    "Dataset",
    "KOREAN_FEATURES",
    "LOADERS",
    "POLISH_FEATURE_DESCRIPTIONS",
    "load_korean",
    "load_polish",
    "ImputeParams",
    "ScalerParams",
    "impute_fit",
    "impute_apply",
    "scale_fit",
    "scale_apply",
    "stratified_split",
    "stratified_split_indices",
    "stratified_subsample",
    "smote",
]
