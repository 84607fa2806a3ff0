# src/dimred/isomap.py
# ISOMAP: k-NN graph geodesics followed by classical MDS, with out-of-sample mapping.

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from src.errors import FitError, ParameterError, ShapeError
from src.kernels import squared_distances
from src.numerics import as_matrix, sym_eigen
from src.utils.logging_config import get_logger
from src.utils.serialization import serializable

logger = get_logger(__name__)

DEFAULT_NEIGHBORS = 10
EIGENVALUE_FLOOR = 1e-12


@serializable
@dataclass(frozen=True, eq=False)
class IsomapModel:
    train_points: np.ndarray
    k_neighbors: int
    geodesic: np.ndarray       # N×N shortest-path lengths
    embedding: np.ndarray      # N×n training coordinates
    eigenvalues: np.ndarray    # retained MDS eigenvalues (n)
    eigenvectors: np.ndarray   # N×n
    sq_geodesic_means: np.ndarray
    warnings: Tuple[str, ...] = field(default=())

    @property
    def n_components(self) -> int:
        return self.eigenvalues.shape[0]

    def transform(self, x: np.ndarray) -> np.ndarray:
        return isomap_apply(self, x)


def knn_graph(x: np.ndarray, k: int) -> List[dict]:
    """Symmetrized k-nearest-neighbour graph as adjacency dicts {neighbour: euclidean length}."""
    n = x.shape[0]
    dist = np.sqrt(squared_distances(x, x))
    np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    adjacency: List[dict] = [dict() for _ in range(n)]
    for i in range(n):
        for j in order[i]:
            j = int(j)
            weight = float(dist[i, j])
            adjacency[i][j] = weight
            adjacency[j][i] = weight
    return adjacency


def connected_components(adjacency: List[dict]) -> int:
    seen = [False] * len(adjacency)
    count = 0
    for start in range(len(adjacency)):
        if seen[start]:
            continue
        count += 1
        seen[start] = True
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nxt in adjacency[node]:
                if not seen[nxt]:
                    seen[nxt] = True
                    queue.append(nxt)
    return count


def dijkstra(adjacency: List[dict], source: int) -> np.ndarray:
    dist = np.full(len(adjacency), np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist[node]:
            continue
        for nxt, weight in adjacency[node].items():
            candidate = d + weight
            if candidate < dist[nxt]:
                dist[nxt] = candidate
                heapq.heappush(heap, (candidate, nxt))
    return dist


def geodesic_distances(x: np.ndarray, k: int) -> np.ndarray:
    adjacency = knn_graph(x, k)
    components = connected_components(adjacency)
    if components > 1:
        raise FitError(
            f"ISOMAP neighbourhood graph with k={k} has {components} connected components; "
            f"increase k_neighbors.",
            component_count=components,
        )
    geodesic = np.vstack([dijkstra(adjacency, i) for i in range(x.shape[0])])
    return 0.5 * (geodesic + geodesic.T)


def isomap_fit(x, k_neighbors: int = DEFAULT_NEIGHBORS, n_components: int = 2) -> IsomapModel:
    data = as_matrix(x, "ISOMAP input")
    n = data.shape[0]
    if k_neighbors < 1:
        raise ParameterError(f"k_neighbors must be at least 1, got {k_neighbors}.")
    if k_neighbors >= n:
        raise ParameterError(f"k_neighbors must be below the sample count {n}, got {k_neighbors}.")
    if n_components < 1:
        raise ParameterError(f"n_components must be at least 1, got {n_components}.")

    geodesic = geodesic_distances(data, k_neighbors)
    sq = geodesic ** 2
    col_means = sq.mean(axis=0)
    centered = -0.5 * (sq - col_means[None, :] - col_means[:, None] + sq.mean())
    eig = sym_eigen(0.5 * (centered + centered.T))

    positive = int(np.sum(eig.values > EIGENVALUE_FLOOR * max(1.0, abs(eig.values[0]))))
    if positive == 0:
        raise FitError("ISOMAP MDS step found no positive eigenvalues.")
    kept = min(n_components, positive)
    notes = []
    if kept < n_components:
        note = f"ISOMAP MDS has only {positive} positive eigenvalue(s); returning {kept} of {n_components} requested axes."
        notes.append(note)
        logger.warning(note)
    values = eig.values[:kept].copy()
    vectors = eig.vectors[:, :kept].copy()
    embedding = vectors * np.sqrt(values)
    logger.info(f"Fitted ISOMAP on {n}×{data.shape[1]} with k={k_neighbors}: {kept} axis(es).")
    return IsomapModel(
        train_points=data.copy(),
        k_neighbors=int(k_neighbors),
        geodesic=geodesic,
        embedding=embedding,
        eigenvalues=values,
        eigenvectors=vectors,
        sq_geodesic_means=col_means,
        warnings=tuple(notes),
    )


def isomap_apply(model: IsomapModel, x) -> np.ndarray:
    """
    Maps new rows through their k nearest training points: the geodesic to
    training point j is min over neighbours i of (‖x − xᵢ‖ + G[i, j]); the MDS
    out-of-sample formula then gives (μ − d²) V / (2 √λ).
    """
    data = as_matrix(x, "ISOMAP input")
    train = model.train_points
    if data.shape[1] != train.shape[1]:
        raise ShapeError(f"ISOMAP fitted on {train.shape[1]} features, got {data.shape[1]}.")
    if model.k_neighbors < 1:
        raise ParameterError("ISOMAP out-of-sample mapping needs k_neighbors ≥ 1.")
    k = min(model.k_neighbors, train.shape[0])
    euclid = np.sqrt(squared_distances(data, train))
    nearest = np.argsort(euclid, axis=1, kind="stable")[:, :k]
    out = np.empty((data.shape[0], model.n_components))
    scale = 2.0 * np.sqrt(model.eigenvalues)
    for row in range(data.shape[0]):
        idx = nearest[row]
        paths = euclid[row, idx][:, None] + model.geodesic[idx, :]
        geo = paths.min(axis=0)
        out[row] = (model.sq_geodesic_means - geo ** 2) @ model.eigenvectors / scale
    return out
