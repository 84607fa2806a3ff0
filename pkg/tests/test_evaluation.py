import numpy as np
import pytest

from src.errors import EvaluationError, ParameterError, ShapeError
from src.evaluation import (
    binary_metrics,
    confusion,
    cross_val_roc,
    cross_validate,
    grid_search,
    kfold_indices,
    pairwise_auc,
    roc_auc,
)
from src.numerics import RngStream


def _separable(n=20, gap=10.0):
    gen = np.random.default_rng(0)
    x = np.vstack([gen.normal(size=(n, 2)), gen.normal(size=(n, 2)) + gap])
    return x, np.array([0] * n + [1] * n)


# --- Confusion and metrics ---

def test_confusion_counts_and_rates():
    cm = confusion([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert cm.as_dict() == {"tp": 2, "fp": 1, "fn": 1, "tn": 1}
    rates = cm.normalized()
    assert rates["tpr"] == pytest.approx(2 / 3) and rates["fpr"] == pytest.approx(0.5)
    metrics = binary_metrics(cm)
    assert metrics["accuracy"] == pytest.approx(0.6)
    assert metrics["precision"] == pytest.approx(2 / 3)
    assert metrics["recall"] == pytest.approx(2 / 3)
    assert metrics["f1"] == pytest.approx(2 / 3)


def test_undefined_ratios_are_zero():
    metrics = binary_metrics(confusion([1, 0, 0], [0, 0, 0]))
    assert metrics["precision"] == 0.0 and metrics["f1"] == 0.0
    assert metrics["accuracy"] == pytest.approx(2 / 3)
    assert confusion([0, 0], [0, 0]).normalized()["tpr"] == 0.0


def test_confusion_rejects_bad_labels():
    with pytest.raises(ShapeError):
        confusion([0, 2], [0, 1])
    with pytest.raises(ShapeError):
        confusion([0, 1], [0])
    with pytest.raises(EvaluationError):
        binary_metrics(confusion([], []))


# --- ROC / AUC ---

def test_roc_curve_endpoints_and_perfect_ranking():
    curve = roc_auc([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])
    assert curve.auc == pytest.approx(1.0)
    assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
    assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0
    assert np.isinf(curve.thresholds[0])


def test_roc_groups_tied_scores():
    curve = roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0])
    assert curve.fpr.shape == (2,)
    assert curve.auc == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(100))
def test_trapezoid_auc_equals_pairwise_probability(seed):
    gen = np.random.default_rng(seed)
    n = int(gen.integers(2, 40))
    labels = gen.integers(0, 2, size=n)
    labels[0], labels[1] = 0, 1
    # coarse scores force ties
    scores = gen.integers(0, 6, size=n).astype(float)
    assert abs(roc_auc(scores, labels).auc - pairwise_auc(scores, labels)) <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_auc_ignores_monotone_transforms_and_flips_under_negation(seed):
    gen = np.random.default_rng(100 + seed)
    labels = gen.integers(0, 2, size=30)
    labels[0], labels[1] = 0, 1
    scores = gen.integers(-4, 5, size=30).astype(float)
    auc = roc_auc(scores, labels).auc
    assert roc_auc(np.exp(scores), labels).auc == pytest.approx(auc, abs=1e-12)
    assert roc_auc(3.0 * scores + 7.0, labels).auc == pytest.approx(auc, abs=1e-12)
    assert roc_auc(-scores, labels).auc == pytest.approx(1.0 - auc, abs=1e-12)


def test_roc_needs_both_classes_and_finite_scores():
    with pytest.raises(EvaluationError):
        roc_auc([0.1, 0.2], [1, 1])
    with pytest.raises(EvaluationError):
        roc_auc([np.nan, 0.2], [0, 1])


# --- Folds ---

def test_kfold_covers_every_index_once_and_stratifies(rng):
    labels = np.array([1] * 30 + [0] * 70)
    folds = kfold_indices(100, 5, rng, labels)
    assert len(folds) == 5
    np.testing.assert_array_equal(np.sort(np.concatenate(folds)), np.arange(100))
    for fold in folds:
        assert fold.size == 20
        assert np.sum(labels[fold]) == 6


def test_kfold_balances_uneven_classes(rng):
    labels = np.array([1] * 7 + [0] * 11)
    sizes = [fold.size for fold in kfold_indices(18, 4, rng, labels)]
    assert max(sizes) - min(sizes) <= 1


def test_kfold_errors(rng):
    with pytest.raises(ParameterError):
        kfold_indices(10, 1, rng)
    with pytest.raises(ParameterError):
        kfold_indices(10, 3, rng, [1, 1] + [0] * 8)


# --- Grid search ---

def test_grid_search_ties_prefer_smaller_values(rng):
    x, y = _separable()
    result = grid_search("kdtree", {"k": [5, 3, 1]}, x, y, k=4, metric="accuracy", rng=rng)
    assert all(r.mean == 1.0 for r in result.results)
    assert result.best_params == {"k": 1}
    assert result.param_names == ("k",)


def test_grid_search_unbounded_depth_sorts_last(rng):
    x, y = _separable()
    result = grid_search("tree", {"max_depth": [None, 3]}, x, y, k=4, rng=rng)
    assert result.best_params["max_depth"] == 3


def test_grid_search_records_failed_points(rng):
    x, y = _separable()
    result = grid_search("logistic", {"l2_penalty": [-1.0, 1.0]}, x, y, k=3, rng=rng)
    assert result.results[0].failed and "ParameterError" in result.results[0].error
    assert result.best_params == {"l2_penalty": 1.0}
    with pytest.raises(EvaluationError):
        grid_search("logistic", {"l2_penalty": [-1.0]}, x, y, k=3, rng=rng)


def test_grid_search_is_reproducible():
    x, y = _separable(gap=1.0)
    a = grid_search("logistic", {"l2_penalty": [0.1, 10.0]}, x, y, k=5, metric="auc", rng=RngStream(3, "cv"))
    b = grid_search("logistic", {"l2_penalty": [0.1, 10.0]}, x, y, k=5, metric="auc", rng=RngStream(3, "cv"))
    assert [r.fold_scores for r in a.results] == [r.fold_scores for r in b.results]


def test_grid_search_parameter_errors(rng):
    x, y = _separable()
    with pytest.raises(ParameterError):
        grid_search("logistic", {"l2_penalty": [1.0]}, x, y, metric="mcc", rng=rng)
    with pytest.raises(ParameterError):
        grid_search("logistic", {}, x, y, rng=rng)
    with pytest.raises(ParameterError):
        grid_search("logistic", {"l2_penalty": [1.0]}, x, y)


def test_cross_validate_reports_mean_and_std(rng):
    x, y = _separable()
    folds = kfold_indices(40, 4, rng, y)
    result = cross_validate("logistic", {"l2_penalty": 1.0}, x, y, folds, "f1", rng)
    assert len(result.fold_scores) == 4
    assert result.mean == pytest.approx(np.mean(result.fold_scores))
    assert result.as_row()["failed"] is False


# --- Per-fold ROC ---

def test_cross_val_roc_curves_per_fold():
    x, y = _separable(gap=1.5)
    result = cross_val_roc("logistic", {"l2_penalty": 1.0}, x, y, 4, RngStream(8, "cv_roc"))
    assert len(result.curves) == 4
    assert result.mean_auc == pytest.approx(np.mean(result.aucs))
    assert 0.5 < result.mean_auc <= 1.0
    again = cross_val_roc("logistic", {"l2_penalty": 1.0}, x, y, 4, RngStream(8, "cv_roc"))
    np.testing.assert_array_equal(result.aucs, again.aucs)
