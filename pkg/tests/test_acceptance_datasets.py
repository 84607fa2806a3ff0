# Checks against the Korean and Polish datasets.
# The bundled subsets under tests/fixtures always run; the full-size checks are
# skipped unless KOREAN_DATA_PATH / POLISH_DATA_PATH point at the real files.

import copy
import os

import numpy as np
import pytest

from src.config import config as app_config
from src.data import load_korean, load_polish, scale_apply, scale_fit, stratified_split
from src.dimred import pca_fit, variance_profile
from src.models import fit_model
from src.models.tree import LEAF
from src.numerics import RngStream
from src.pipeline.experiment_config import ModelConfig, load_config
from src.pipeline.runner import run_experiment
from src.pipeline.sweep import run_matrix

KOREAN = app_config.KOREAN_DATA_PATH
POLISH = app_config.POLISH_DATA_PATH

needs_korean = pytest.mark.skipif(not (KOREAN and os.path.isfile(KOREAN)), reason="KOREAN_DATA_PATH not set")
needs_polish = pytest.mark.skipif(not (POLISH and os.path.isfile(POLISH)), reason="POLISH_DATA_PATH not set")

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
KOREAN_SUBSET = os.path.join(FIXTURES, "korean_subset.txt")
POLISH_SUBSET = os.path.join(FIXTURES, "polish_subset.arff")


@needs_korean
def test_korean_shape():
    ds = load_korean(KOREAN)
    assert ds.n_samples == 250 and ds.n_features == 6
    assert ds.n_positive == 107


@needs_korean
def test_korean_split_sizes():
    train, test = stratified_split(load_korean(KOREAN), 0.2, RngStream(42, "split"))
    assert train.n_samples == 200 and test.n_samples == 50


@needs_korean
def test_korean_lda_logistic_band(test_app_config, tmp_path):
    base = load_config("korean-table1", test_app_config)
    accuracy, precision = [], []
    for seed in range(20):
        report = run_experiment(base.with_overrides(seed=seed, output_dir=str(tmp_path / f"s{seed}"),
                                                    data_path=KOREAN), test_app_config)
        accuracy.append(report.test_metrics["accuracy"])
        precision.append(report.test_metrics["precision"])
    assert 0.94 <= np.mean(accuracy) <= 1.0
    assert np.mean(precision) >= 0.95


@needs_korean
def test_korean_first_principal_component():
    ds = load_korean(KOREAN)
    model = pca_fit(ds.features, 2)
    first = model.components[0] * np.sign(model.components[0].sum())
    np.testing.assert_allclose(first, [0.231, 0.320, 0.466, 0.472, 0.585, 0.250], atol=0.10)
    second = model.components[1] * np.sign(model.components[1][4])
    # negative on the three risk ratings, positive on the rest
    assert np.all(second[[0, 1, 5]] < 0) and np.all(second[[2, 3, 4]] > 0)


@needs_korean
def test_korean_tree_roots_on_competitiveness():
    ds = load_korean(KOREAN)
    competitiveness = ds.feature_names.index("Competitiveness")
    allowed = {ds.feature_names.index(name) for name in
               ("Competitiveness", "Credibility", "Financial Flexibility", "Industrial Risk")}
    roots = within = 0
    for seed in range(20):
        train, _ = stratified_split(ds, 0.2, RngStream(seed, "split"))
        tree = fit_model("tree", train.features, train.labels).payload
        roots += int(tree.feature[0] == competitiveness)
        used = set(int(f) for f in tree.feature[tree.feature != LEAF])
        within += int(used <= allowed)
    assert roots >= 16
    assert within >= 10


@needs_korean
def test_korean_every_combination_is_accurate(test_app_config, tmp_path):
    base = load_config("korean-table1", test_app_config).with_overrides(data_path=KOREAN)
    accuracy = {}
    for seed in range(10):
        sweep = run_matrix(base.with_overrides(seed=seed, output_dir=str(tmp_path / f"s{seed}")),
                           serial=True, settings=test_app_config)
        assert sweep.n_failed == 0
        for row in sweep.rows:
            accuracy.setdefault((row["dimred"], row["model"]), []).append(row["accuracy"])
    assert len(accuracy) == 28
    for combination, values in accuracy.items():
        assert np.mean(values) >= 0.90, combination


@needs_polish
def test_polish_shape():
    ds = load_polish(POLISH)
    assert ds.n_samples == 5910 and ds.n_features == 64
    assert ds.n_positive == 410


@needs_polish
def test_polish_variance_profile():
    ds = load_polish(POLISH)
    from src.data import impute_apply, impute_fit

    filled = impute_apply(impute_fit(ds), ds)
    scaled = scale_apply(scale_fit(filled, "minmax", (-1.0, 1.0)), filled)
    profile = variance_profile(pca_fit(scaled.features, 30))
    assert profile["cumulative"][29] >= 0.985
    assert 1.0 - profile["cumulative"][29] <= 0.015


@needs_polish
def test_polish_logistic_band(test_app_config, tmp_path):
    config = load_config("polish-table3", test_app_config)
    report = run_experiment(config.with_overrides(output_dir=str(tmp_path / "polish"), data_path=POLISH),
                            test_app_config)
    assert abs(report.test_metrics["accuracy"] - 0.664) <= 0.08
    assert abs(report.cv_auc_mean - 0.799) <= 0.08


@needs_polish
def test_polish_kdtree_band(test_app_config, tmp_path):
    config = load_config("polish-table3", test_app_config).with_overrides(
        output_dir=str(tmp_path / "polish-kdtree"), data_path=POLISH)
    config.model = ModelConfig(kind="kdtree", params={"k": 6})
    report = run_experiment(config, test_app_config)
    assert abs(report.test_metrics["accuracy"] - 0.629) <= 0.08


@needs_korean
def test_korean_preset_is_deterministic(test_app_config, tmp_path):
    base = load_config("korean-table1", test_app_config).with_overrides(data_path=KOREAN)
    first = run_experiment(base.with_overrides(output_dir=str(tmp_path / "a")), test_app_config).to_dict()
    second = run_experiment(base.with_overrides(output_dir=str(tmp_path / "b")), test_app_config).to_dict()
    for report in (first, second):
        report.pop("timing")
        report.pop("output_dir")
        report["config"] = copy.deepcopy(report["config"])
        report["config"].pop("output_dir")
    assert first == second


# --- bundled subsets ---

def test_korean_subset_loads():
    ds = load_korean(KOREAN_SUBSET)
    assert ds.n_samples == 100 and ds.n_features == 6
    assert ds.n_positive == 42


def test_polish_subset_loads():
    ds = load_polish(POLISH_SUBSET)
    assert ds.n_samples == 360 and ds.n_features == 64
    assert ds.n_positive == 36
    assert ds.n_missing == 250
    assert ds.feature_names[36] == "Attr37"


def test_korean_preset_on_subset(test_app_config, tmp_path):
    config = load_config("korean-table1", test_app_config).with_overrides(
        output_dir=str(tmp_path / "korean"), data_path=KOREAN_SUBSET)
    report = run_experiment(config, test_app_config)
    assert report.n_train == 80 and report.n_test == 20
    assert report.test_metrics["accuracy"] >= 0.85
    assert report.chosen_params["l2_penalty"] in (0.01, 0.1, 1.0, 10.0)
    assert os.path.isfile(os.path.join(report.output_dir, "metrics.json"))


def test_korean_preset_sweep_on_subset(test_app_config, tmp_path):
    config = load_config("korean-table1", test_app_config).with_overrides(
        output_dir=str(tmp_path / "sweep"), data_path=KOREAN_SUBSET)
    sweep = run_matrix(config, serial=True, settings=test_app_config)
    assert sweep.n_failed == 0 and len(sweep.rows) == 28
    assert os.path.isfile(sweep.summary_path)
    assert np.mean([row["accuracy"] for row in sweep.rows]) >= 0.80


def test_polish_preset_on_subset(test_app_config, tmp_path):
    config = load_config("polish-table3", test_app_config).with_overrides(
        output_dir=str(tmp_path / "polish"), data_path=POLISH_SUBSET)
    report = run_experiment(config, test_app_config)
    # 29 bankrupt training rows are oversampled up to the 259 healthy ones
    assert report.n_train == 518 and report.n_test == 72
    assert report.n_components == 30 and len(report.explained_variance) == 30
    assert report.cv_auc_mean >= 0.75
    assert 0.0 <= report.test_metrics["accuracy"] <= 1.0
    assert os.path.isfile(os.path.join(report.output_dir, "roc.csv"))


def test_polish_kdtree_on_subset(test_app_config, tmp_path):
    config = load_config("polish-table3", test_app_config).with_overrides(
        output_dir=str(tmp_path / "polish-kdtree"), data_path=POLISH_SUBSET)
    config.model = ModelConfig(kind="kdtree", params={"k": 6})
    report = run_experiment(config, test_app_config)
    assert report.model == "kdtree" and report.n_test == 72
    assert 0.5 <= report.test_metrics["accuracy"] <= 1.0
