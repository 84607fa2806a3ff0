# src/models/kdtree.py
# k-nearest-neighbour classifier backed by a median-split k-d tree.

import heapq
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.errors import ParameterError, ShapeError
from src.numerics import as_matrix
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

LEAF_SIZE = 16
LEAF = -1


@serializable
@dataclass(frozen=True, eq=False)
class KdTreeModel:
    """
    Node arrays are indexed by node id; node 0 is the root.

    Internal nodes: split_dim ≥ 0, children in left/right. Leaves: split_dim =
    LEAF and their points are order[start:end].
    """
    points: np.ndarray
    labels: np.ndarray
    k: int
    split_dim: np.ndarray
    split_value: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    end: np.ndarray
    order: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.split_dim.shape[0]

    def score(self, x: np.ndarray) -> np.ndarray:
        idx, _ = kneighbors(self, x, self.k)
        return self.labels[idx].mean(axis=1)

    def predict(self, x: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        """Majority vote; an exact tie (even k) is settled by the k − 1 nearest."""
        idx, _ = kneighbors(self, x, self.k)
        votes = self.labels[idx]
        fractions = votes.mean(axis=1)
        out = (fractions > threshold).astype(np.int64)
        tied = fractions == 0.5
        if np.any(tied) and self.k > 1:
            out[tied] = (votes[tied, : self.k - 1].mean(axis=1) > 0.5).astype(np.int64)
        return out


def _build(points: np.ndarray, indices: np.ndarray, depth: int, nodes: List[list], order: List[int]) -> int:
    node_id = len(nodes)
    nodes.append([LEAF, 0.0, -1, -1, 0, 0])
    if indices.size <= LEAF_SIZE:
        nodes[node_id][4] = len(order)
        order.extend(int(i) for i in indices)
        nodes[node_id][5] = len(order)
        return node_id
    dim = depth % points.shape[1]
    ranked = indices[np.lexsort((indices, points[indices, dim]))]
    mid = ranked.size // 2
    value = float(points[ranked[mid], dim])
    nodes[node_id][0] = dim
    nodes[node_id][1] = value
    nodes[node_id][2] = _build(points, ranked[:mid], depth + 1, nodes, order)
    nodes[node_id][3] = _build(points, ranked[mid:], depth + 1, nodes, order)
    return node_id


def kdtree_fit(x, y, k: int = 5) -> KdTreeModel:
    """Splits cycle through dimensions in order at the median coordinate; leaves hold ≤ 16 points."""
    data = as_matrix(x, "k-d tree input")
    labels = np.asarray(y).astype(np.int64).ravel()
    if labels.shape[0] != data.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {data.shape[0]} rows.")
    if not 1 <= k <= data.shape[0]:
        raise ParameterError(f"k must be in [1, {data.shape[0]}], got {k}.")
    nodes: List[list] = []
    order: List[int] = []
    _build(data, np.arange(data.shape[0]), 0, nodes, order)
    table = np.array(nodes, dtype=float)
    logger.info(f"Built k-d tree over {data.shape[0]}×{data.shape[1]} points: {len(nodes)} nodes, k={k}.")
    return KdTreeModel(
        points=data.copy(),
        labels=labels,
        k=int(k),
        split_dim=table[:, 0].astype(np.int64),
        split_value=table[:, 1],
        left=table[:, 2].astype(np.int64),
        right=table[:, 3].astype(np.int64),
        start=table[:, 4].astype(np.int64),
        end=table[:, 5].astype(np.int64),
        order=np.asarray(order, dtype=np.int64),
    )


def _query(model: KdTreeModel, q: np.ndarray, k: int) -> List[Tuple[float, int]]:
    heap: List[Tuple[float, int]] = []  # max-heap on (d², index) via negation

    def visit(node: int) -> None:
        dim = model.split_dim[node]
        if dim == LEAF:
            for idx in model.order[model.start[node]:model.end[node]]:
                diff = model.points[idx] - q
                d2 = float(diff @ diff)
                item = (-d2, -int(idx))
                if len(heap) < k:
                    heapq.heappush(heap, item)
                elif item > heap[0]:
                    heapq.heapreplace(heap, item)
            return
        gap = float(q[dim] - model.split_value[node])
        near, far = (model.left[node], model.right[node]) if gap <= 0 else (model.right[node], model.left[node])
        visit(int(near))
        if len(heap) < k or gap * gap <= -heap[0][0]:
            visit(int(far))

    visit(0)
    return sorted((-d2, -idx) for d2, idx in heap)


def kneighbors(model: KdTreeModel, x, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exact k nearest training rows per query, ordered by (distance, index)."""
    queries = as_matrix(x, "k-d tree query")
    if queries.shape[1] != model.points.shape[1]:
        raise ShapeError(f"k-d tree built on {model.points.shape[1]} features, got {queries.shape[1]}.")
    if not 1 <= k <= model.points.shape[0]:
        raise ParameterError(f"k must be in [1, {model.points.shape[0]}], got {k}.")
    indices = np.empty((queries.shape[0], k), dtype=np.int64)
    distances = np.empty((queries.shape[0], k))
    for row, q in enumerate(queries):
        found = _query(model, q, k)
        indices[row] = [idx for _, idx in found]
        distances[row] = [np.sqrt(d2) for d2, _ in found]
    return indices, distances
