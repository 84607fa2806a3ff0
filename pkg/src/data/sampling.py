# src/data/sampling.py
# Stratified train/test splitting, stratified subsampling and SMOTE oversampling.

import math
from typing import Tuple

import numpy as np

from src.data.dataset import Dataset
from src.errors import ParameterError, SplitError
from src.kernels import squared_distances
from src.numerics import RngStream
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def stratified_split_indices(labels: np.ndarray, test_fraction: float, rng: RngStream) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns (train_idx, test_idx), each sorted ascending.

    For every class the test share is round(count × fraction), kept inside
    [1, count − 1] so both partitions see both classes.
    """
    if not 0.0 < test_fraction < 1.0:
        raise SplitError(f"test_fraction must be in (0, 1), got {test_fraction}.")
    labels = np.asarray(labels)
    gen = rng.generator()
    train_parts, test_parts = [], []
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if members.size < 2:
            raise SplitError(f"Class {cls} has {members.size} member(s); stratified splitting needs at least 2.")
        n_test = min(max(_round_half_up(members.size * test_fraction), 1), members.size - 1)
        shuffled = members[gen.permutation(members.size)]
        test_parts.append(shuffled[:n_test])
        train_parts.append(shuffled[n_test:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def stratified_split(ds: Dataset, test_fraction: float, rng: RngStream) -> Tuple[Dataset, Dataset]:
    train_idx, test_idx = stratified_split_indices(ds.labels, test_fraction, rng)
    logger.info(f"Stratified split: {train_idx.size} train / {test_idx.size} test (fraction {test_fraction}).")
    return ds.subset(train_idx), ds.subset(test_idx)


def stratified_subsample(ds: Dataset, size: int, rng: RngStream) -> Dataset:
    """Draws `size` rows keeping the class proportions; returns `ds` unchanged when size ≥ N."""
    if size < 2:
        raise ParameterError(f"Subsample size must be at least 2, got {size}.")
    if size >= ds.n_samples:
        return ds
    _, keep = stratified_split_indices(ds.labels, size / ds.n_samples, rng)
    logger.info(f"Subsampled training set from {ds.n_samples} to {keep.size} rows.")
    return ds.subset(keep)


def smote(train: Dataset, k_neighbors: int = 5, target_ratio: float = 1.0, rng: RngStream | None = None) -> Dataset:
    """
    Appends synthetic minority rows x + u·(x′ − x), u ~ U(0, 1), where x′ is one
    of the k nearest minority neighbours of x, until the minority count reaches
    ⌊target_ratio × majority count⌋. Original rows are kept first and unchanged.
    """
    if rng is None:
        raise ParameterError("SMOTE needs a random stream.")
    if k_neighbors < 1:
        raise ParameterError(f"k_neighbors must be at least 1, got {k_neighbors}.")
    if np.any(train.missing_mask):
        raise ParameterError("SMOTE needs imputed data; found missing cells.")
    counts = train.class_counts()
    minority_label = 1 if counts[1] <= counts[0] else 0
    majority_label = 1 - minority_label
    n_min, n_maj = counts[minority_label], counts[majority_label]
    if n_min <= k_neighbors:
        raise ParameterError(
            f"Minority class has {n_min} rows; SMOTE with k_neighbors={k_neighbors} needs more than {k_neighbors}."
        )
    current_ratio = n_min / n_maj
    if target_ratio < current_ratio:
        raise ParameterError(
            f"target_ratio {target_ratio} is below the current minority/majority ratio {current_ratio:.4f}."
        )
    target_count = int(math.floor(target_ratio * n_maj))
    n_synthetic = target_count - n_min
    if n_synthetic <= 0:
        logger.info("SMOTE: class ratio already at target; no synthetic rows added.")
        return train

    minority = train.features[train.labels == minority_label]
    dist = squared_distances(minority, minority)
    np.fill_diagonal(dist, np.inf)
    neighbours = np.argsort(dist, axis=1, kind="stable")[:, :k_neighbors]

    gen = rng.generator()
    base = np.resize(gen.permutation(n_min), n_synthetic)
    pick = gen.integers(0, k_neighbors, size=n_synthetic)
    gap = gen.random(n_synthetic)[:, None]
    origin = minority[base]
    partner = minority[neighbours[base, pick]]
    synthetic = origin + gap * (partner - origin)

    features = np.vstack([train.features, synthetic])
    labels = np.concatenate([train.labels, np.full(n_synthetic, minority_label, dtype=np.int64)])
    logger.info(f"SMOTE: appended {n_synthetic} synthetic rows to class {minority_label} "
                f"({n_min} → {target_count}, majority {n_maj}).")
    return Dataset(features, labels, train.feature_names, train.name)
