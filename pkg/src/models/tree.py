# src/models/tree.py
# CART decision tree (Gini or entropy) with DOT export and impurity-based feature importances.

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ParameterError, ShapeError
from src.numerics import as_matrix
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

CRITERIA = ("gini", "entropy")
LEAF = -1
GAIN_EPSILON = 1e-12
CLASS_NAMES = ("not bankrupt", "bankrupt")


def gini(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=-1)
    p = counts / np.where(total == 0, 1.0, total)[..., None]
    return 1.0 - np.sum(p * p, axis=-1)


def entropy(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=-1)
    p = counts / np.where(total == 0, 1.0, total)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return np.sum(terms, axis=-1)


_IMPURITY = {"gini": gini, "entropy": entropy}


@serializable
@dataclass(frozen=True, eq=False)
class TreeModel:
    """
    Flat node arrays, node 0 is the root. Leaves have feature = LEAF.
    `counts[i]` = [negatives, positives] reaching node i during training.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    impurity: np.ndarray
    gini: np.ndarray
    n_samples: np.ndarray
    counts: np.ndarray
    criterion: str = "gini"
    n_features: int = 0

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Leaf id reached by every row (x ≤ threshold goes left)."""
        data = as_matrix(x, "tree input")
        if data.shape[1] != self.n_features:
            raise ShapeError(f"Tree fitted on {self.n_features} features, got {data.shape[1]}.")
        nodes = np.zeros(data.shape[0], dtype=np.int64)
        active = self.feature[nodes] != LEAF
        while np.any(active):
            rows = np.flatnonzero(active)
            current = nodes[rows]
            go_left = data[rows, self.feature[current]] <= self.threshold[current]
            nodes[rows] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[nodes] != LEAF
        return nodes

    def score(self, x: np.ndarray) -> np.ndarray:
        leaves = self.apply(x)
        counts = self.counts[leaves].astype(float)
        return counts[:, 1] / counts.sum(axis=1)


def _best_split(x: np.ndarray, y: np.ndarray, criterion: str, min_leaf: int) -> Optional[Tuple[int, float, float]]:
    """(feature, threshold, weighted child impurity) minimizing child impurity; ties keep the earliest."""
    impurity_fn = _IMPURITY[criterion]
    n = y.shape[0]
    best: Optional[Tuple[int, float, float]] = None
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        values = x[order, f]
        labels = y[order]
        positions = np.flatnonzero(values[1:] > values[:-1])  # last index of each left block
        if positions.size == 0:
            continue
        n_left = positions + 1
        valid = (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not np.any(valid):
            continue
        positions, n_left = positions[valid], n_left[valid]
        pos_left = np.cumsum(labels)[positions]
        pos_total = labels.sum()
        left_counts = np.stack([n_left - pos_left, pos_left], axis=1)
        right_counts = np.stack([(n - n_left) - (pos_total - pos_left), pos_total - pos_left], axis=1)
        child = (n_left * impurity_fn(left_counts) + (n - n_left) * impurity_fn(right_counts)) / n
        k = int(np.argmin(child))
        if best is None or child[k] < best[2] - GAIN_EPSILON:
            threshold = 0.5 * (values[positions[k]] + values[positions[k] + 1])
            best = (f, float(threshold), float(child[k]))
    return best


def tree_fit(x, y, max_depth: Optional[int] = None, min_leaf: int = 1, criterion: str = "gini") -> TreeModel:
    """
    Greedy CART. Thresholds are midpoints of consecutive distinct values;
    growth stops at purity, max_depth or when no split leaves min_leaf rows
    on both sides. Equal impurity decreases resolve to the lowest feature,
    then the lowest threshold.
    """
    data = as_matrix(x, "tree input")
    labels = np.asarray(y).astype(np.int64).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if criterion not in CRITERIA:
        raise ParameterError(f"Unknown criterion '{criterion}'. Allowed: {', '.join(CRITERIA)}.")
    if min_leaf < 1:
        raise ParameterError(f"min_leaf must be at least 1, got {min_leaf}.")
    if max_depth is not None and max_depth < 0:
        raise ParameterError(f"max_depth must be non-negative, got {max_depth}.")

    rows: List[list] = []

    def grow(idx: np.ndarray, depth: int) -> int:
        node_id = len(rows)
        node_y = labels[idx]
        counts = np.array([np.sum(node_y == 0), np.sum(node_y == 1)])
        rows.append([LEAF, 0.0, -1, -1, float(_IMPURITY[criterion](counts)), float(gini(counts)),
                     idx.size, counts[0], counts[1]])
        if counts.min() == 0 or (max_depth is not None and depth >= max_depth):
            return node_id
        split = _best_split(data[idx], node_y, criterion, min_leaf)
        if split is None:
            return node_id
        feature, threshold, _ = split
        goes_left = data[idx, feature] <= threshold
        rows[node_id][0] = feature
        rows[node_id][1] = threshold
        rows[node_id][2] = grow(idx[goes_left], depth + 1)
        rows[node_id][3] = grow(idx[~goes_left], depth + 1)
        return node_id

    grow(np.arange(data.shape[0]), 0)
    table = np.array(rows, dtype=float)
    model = TreeModel(
        feature=table[:, 0].astype(np.int64),
        threshold=table[:, 1],
        left=table[:, 2].astype(np.int64),
        right=table[:, 3].astype(np.int64),
        impurity=table[:, 4],
        gini=table[:, 5],
        n_samples=table[:, 6].astype(np.int64),
        counts=table[:, 7:9].astype(np.int64),
        criterion=criterion,
        n_features=data.shape[1],
    )
    logger.info(f"Fitted decision tree ({criterion}) on {data.shape[0]}×{data.shape[1]}: "
                f"{model.n_nodes} nodes, {model.n_leaves} leaves.")
    return model


def tree_feature_importances(model: TreeModel) -> np.ndarray:
    """Total weighted impurity decrease per feature, normalized to sum to 1 (zeros for a stump-less tree)."""
    importances = np.zeros(model.n_features)
    for node in np.flatnonzero(model.feature != LEAF):
        left, right = model.left[node], model.right[node]
        decrease = (model.n_samples[node] * model.impurity[node]
                    - model.n_samples[left] * model.impurity[left]
                    - model.n_samples[right] * model.impurity[right])
        importances[model.feature[node]] += max(decrease, 0.0)
    total = importances.sum()
    return importances / total if total > 0 else importances


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def tree_export_dot(model: TreeModel, feature_names: Optional[Sequence[str]] = None) -> str:
    """DOT digraph with the rule, Gini, sample count and class counts on each node."""
    names = list(feature_names) if feature_names is not None else [f"x[{i}]" for i in range(model.n_features)]
    lines = ["digraph Tree {", 'node [shape=box, fontname="helvetica"] ;', 'edge [fontname="helvetica"] ;']
    for node in range(model.n_nodes):
        parts = []
        if model.feature[node] != LEAF:
            # repr round-trips the float so the DOT rule routes exactly like the model
            parts.append(f"{_escape(names[model.feature[node]])} <= {float(model.threshold[node])!r}")
        parts.append(f"gini = {model.gini[node]:.4f}")
        if model.criterion != "gini":
            parts.append(f"{model.criterion} = {model.impurity[node]:.4f}")
        parts.append(f"samples = {model.n_samples[node]}")
        neg, pos = model.counts[node]
        parts.append(f"value = [{neg}, {pos}]")
        parts.append(f"class = {CLASS_NAMES[1] if pos > neg else CLASS_NAMES[0]}")
        label = "\\n".join(parts)
        lines.append(f'{node} [label="{label}"] ;')
    for node in np.flatnonzero(model.feature != LEAF):
        lines.append(f'{node} -> {model.left[node]} [headlabel="True"] ;')
        lines.append(f'{node} -> {model.right[node]} [headlabel="False"] ;')
    lines.append("}")
    return "\n".join(lines) + "\n"
