# src/data/dataset.py
# Dataset container and the two bankruptcy dataset loaders.

import io
import os
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
import pandas as pd

from src.data.arff import read_arff
from src.errors import ParseError, ShapeError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

KOREAN_FEATURES: Tuple[str, ...] = (
    "Industrial Risk",
    "Management Risk",
    "Financial Flexibility",
    "Credibility",
    "Competitiveness",
    "Operating Risk",
)
QUALITATIVE_CODES: Dict[str, float] = {"P": 1.0, "A": 0.0, "N": -1.0}
KOREAN_CLASSES: Dict[str, int] = {"B": 1, "NB": 0}

POLISH_FEATURE_DESCRIPTIONS: Dict[str, str] = {
    f"Attr{i}": text for i, text in enumerate([
        "net profit / total assets",
        "total liabilities / total assets",
        "working capital / total assets",
        "current assets / short-term liabilities",
        "[(cash + short-term securities + receivables - short-term liabilities) / (operating expenses - depreciation)] * 365",
        "retained earnings / total assets",
        "EBIT / total assets",
        "book value of equity / total liabilities",
        "sales / total assets",
        "equity / total assets",
        "(gross profit + extraordinary items + financial expenses) / total assets",
        "gross profit / short-term liabilities",
        "(gross profit + depreciation) / sales",
        "(gross profit + interest) / total assets",
        "(total liabilities * 365) / (gross profit + depreciation)",
        "(gross profit + depreciation) / total liabilities",
        "total assets / total liabilities",
        "gross profit / total assets",
        "gross profit / sales",
        "(inventory * 365) / sales",
        "sales (n) / sales (n-1)",
        "profit on operating activities / total assets",
        "net profit / sales",
        "gross profit (in 3 years) / total assets",
        "(equity - share capital) / total assets",
        "(net profit + depreciation) / total liabilities",
        "profit on operating activities / financial expenses",
        "working capital / fixed assets",
        "logarithm of total assets",
        "(total liabilities - cash) / sales",
        "(gross profit + interest) / sales",
        "(current liabilities * 365) / cost of products sold",
        "operating expenses / short-term liabilities",
        "operating expenses / total liabilities",
        "profit on sales / total assets",
        "total sales / total assets",
        "(current assets - inventories) / long-term liabilities",
        "constant capital / total assets",
        "profit on sales / sales",
        "(current assets - inventory - receivables) / short-term liabilities",
        "total liabilities / ((profit on operating activities + depreciation) * (12/365))",
        "profit on operating activities / sales",
        "rotation receivables + inventory turnover in days",
        "(receivables * 365) / sales",
        "net profit / inventory",
        "(current assets - inventory) / short-term liabilities",
        "(inventory * 365) / cost of products sold",
        "EBITDA (profit on operating activities - depreciation) / total assets",
        "EBITDA (profit on operating activities - depreciation) / sales",
        "current assets / total liabilities",
        "short-term liabilities / total assets",
        "(short-term liabilities * 365) / cost of products sold",
        "equity / fixed assets",
        "constant capital / fixed assets",
        "working capital",
        "(sales - cost of products sold) / sales",
        "(current assets - inventory - short-term liabilities) / (sales - gross profit - depreciation)",
        "total costs / total sales",
        "long-term liabilities / equity",
        "sales / inventory",
        "sales / receivables",
        "(short-term liabilities * 365) / sales",
        "sales / short-term liabilities",
        "sales / fixed assets",
    ], start=1)
}


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Feature matrix plus binary labels (1 = bankrupt).

    Missing cells are stored as NaN; `missing_mask` exposes them as flags.
    """
    features: np.ndarray
    labels: np.ndarray
    feature_names: Tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels).astype(np.int64).ravel()
        if features.ndim != 2:
            raise ShapeError(f"Features must be 2-D, got shape {features.shape}.")
        if features.shape[0] < 1:
            raise ShapeError("A dataset needs at least one sample.")
        if labels.shape[0] != features.shape[0]:
            raise ShapeError(f"{labels.shape[0]} labels for {features.shape[0]} samples.")
        if not np.all(np.isin(labels, (0, 1))):
            raise ShapeError("Labels must be 0 (not bankrupt) or 1 (bankrupt).")
        if len(self.feature_names) != features.shape[1]:
            raise ShapeError(f"{len(self.feature_names)} feature names for {features.shape[1]} features.")
        if np.any(np.isinf(features)):
            raise ShapeError("Features must be finite; use NaN only for missing cells.")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.features)

    @property
    def n_missing(self) -> int:
        return int(np.sum(self.missing_mask))

    @property
    def n_positive(self) -> int:
        return int(np.sum(self.labels == 1))

    def class_counts(self) -> Dict[int, int]:
        return {0: int(np.sum(self.labels == 0)), 1: self.n_positive}

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names, self.name)

    def with_features(self, features: np.ndarray, feature_names: Sequence[str] | None = None) -> "Dataset":
        return Dataset(features, self.labels, tuple(feature_names or self.feature_names), self.name)


def load_korean(path: str) -> Dataset:
    """
    Reads the qualitative Korean bankruptcy CSV: six P/A/N columns and a B/NB class, no header.
    P → +1, A → 0, N → −1; B → 1, NB → 0.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    # pandas drops blank lines, so file line numbers come from the raw text
    line_numbers = [i for i, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
    try:
        frame = pd.read_csv(io.StringIO(text), header=None, dtype=str, keep_default_na=False,
                            skipinitialspace=True, skip_blank_lines=True)
    except pd.errors.ParserError as e:
        raise ParseError(f"Malformed Korean CSV {path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"Korean CSV {path} is empty") from e
    n_columns = len(KOREAN_FEATURES) + 1
    if frame.shape[1] != n_columns:
        raise ParseError(f"Expected {n_columns} columns, found {frame.shape[1]}", line=line_numbers[0])

    features = np.empty((frame.shape[0], len(KOREAN_FEATURES)))
    labels = np.empty(frame.shape[0], dtype=np.int64)
    for row_idx, row in enumerate(frame.itertuples(index=False, name=None)):
        line = line_numbers[row_idx]
        cells = [str(c).strip() for c in row]
        if any(c == "" or c == "nan" for c in cells):
            raise ParseError(f"Expected {n_columns} fields", line=line)
        for col_idx, symbol in enumerate(cells[:-1]):
            code = QUALITATIVE_CODES.get(symbol.upper())
            if code is None:
                raise ParseError(f"Unknown qualitative symbol '{symbol}'", line=line, column=col_idx + 1)
            features[row_idx, col_idx] = code
        label = KOREAN_CLASSES.get(cells[-1].upper())
        if label is None:
            raise ParseError(f"Unknown class '{cells[-1]}'", line=line, column=n_columns)
        labels[row_idx] = label

    dataset = Dataset(features, labels, KOREAN_FEATURES, name="korean")
    logger.info(f"Loaded Korean dataset from {path}: N={dataset.n_samples}, D={dataset.n_features}, "
                f"bankrupt={dataset.n_positive}")
    return dataset


def load_polish(path: str) -> Dataset:
    """
    Reads a Polish bankruptcy ARFF file (numeric attributes plus a binary class, '?' missing).
    The last attribute is the class; value "1" is bankrupt.
    """
    table = read_arff(path)
    if len(table.attributes) < 2:
        raise ParseError(f"ARFF file {path} needs at least one feature and a class attribute")
    class_attr = table.attributes[-1]
    if class_attr.nominal_values is None or len(class_attr.nominal_values) != 2:
        raise ParseError(f"Class attribute '{class_attr.name}' must be nominal with two values",
                         line=class_attr.line)
    feature_attrs = table.attributes[:-1]
    for attr in feature_attrs:
        if attr.nominal_values is not None:
            raise ParseError(f"Feature attribute '{attr.name}' must be numeric", line=attr.line)

    positive_value = "1" if "1" in class_attr.nominal_values else class_attr.nominal_values[-1]
    classes = table.frame[class_attr.name]
    undeclared = np.flatnonzero(~classes.isin(class_attr.nominal_values).to_numpy())
    if undeclared.size:
        row = int(undeclared[0])
        raise ParseError(f"Class value '{classes.iloc[row]}' not declared", line=table.row_lines[row],
                         column=len(table.attributes))
    labels = (classes == positive_value).to_numpy().astype(np.int64)

    features = table.frame[[a.name for a in feature_attrs]].to_numpy(dtype=float)
    infinite = np.argwhere(np.isinf(features))
    if infinite.size:
        row, col = (int(v) for v in infinite[0])
        raise ParseError(f"Non-finite value {features[row, col]}", line=table.row_lines[row], column=col + 1)

    dataset = Dataset(features, labels, tuple(a.name for a in feature_attrs), name="polish")
    logger.info(f"Loaded Polish dataset from {path}: N={dataset.n_samples}, D={dataset.n_features}, "
                f"bankrupt={dataset.n_positive}, missing cells={dataset.n_missing}")
    return dataset


LOADERS = {"korean": load_korean, "polish": load_polish}
