# tests/conftest.py
# Shared fixtures: seeded streams, synthetic dataset files and a temporary AppConfig.

import copy
import os

import numpy as np
import pytest

from src.config import AppConfig
from src.numerics import RngStream

KOREAN_SYMBOLS = np.array(["N", "A", "P"])


def write_korean_csv(path, n_bankrupt: int = 50, n_healthy: int = 70, seed: int = 0) -> str:
    """Korean-style CSV where bankrupt firms lean to N on the last five ratings."""
    gen = np.random.default_rng(seed)
    lines = []
    for label, count in (("B", n_bankrupt), ("NB", n_healthy)):
        for _ in range(count):
            # 0 → N, 1 → A, 2 → P
            if label == "B":
                codes = gen.choice(3, size=6, p=[0.7, 0.25, 0.05])
            else:
                codes = gen.choice(3, size=6, p=[0.05, 0.35, 0.6])
            codes[0] = gen.integers(0, 3)  # industrial risk carries no signal
            lines.append(",".join(KOREAN_SYMBOLS[codes]) + f",{label}")
    order = gen.permutation(len(lines))
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines[i] for i in order) + "\n")
    return str(path)


def write_polish_arff(path, n_rows: int = 150, n_bankrupt: int = 25, n_features: int = 5,
                      n_missing: int = 12, seed: int = 0) -> str:
    """Polish-style ARFF: numeric AttrN columns, '?' cells and a {0,1} class."""
    gen = np.random.default_rng(seed)
    labels = np.zeros(n_rows, dtype=int)
    labels[gen.choice(n_rows, size=n_bankrupt, replace=False)] = 1
    x = gen.normal(size=(n_rows, n_features))
    x[:, 0] -= 1.5 * labels
    x[:, 1] += 1.0 * labels
    cells = [[f"{v:.6f}" for v in row] for row in x]
    for k in range(n_missing):
        cells[(7 * k + 3) % n_rows][k % n_features] = "?"
    header = ["% synthetic Polish-style sample", "@relation 'synthetic-polish'", ""]
    header += [f"@attribute Attr{j + 1} numeric" for j in range(n_features)]
    header += ["@attribute class {0,1}", "", "@data"]
    rows = [",".join(cells[i] + [str(labels[i])]) for i in range(n_rows)]
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(header + rows) + "\n")
    return str(path)


@pytest.fixture
def rng():
    return RngStream(1234, "tests")


@pytest.fixture
def korean_csv(tmp_path):
    return write_korean_csv(tmp_path / "korean.data.txt")


@pytest.fixture
def polish_arff(tmp_path):
    return write_polish_arff(tmp_path / "polish.arff")


@pytest.fixture
def test_app_config(tmp_path):
    """Provides an AppConfig instance pointing at temporary output and the bundled presets."""
    class TestConfig(AppConfig):
        def __init__(self):
            super().__init__()
            self.OUTPUT_DIR = str(tmp_path / "runs")
            self.MAX_CONCURRENT_RUNS = 2
            self.LOG_LEVEL = "DEBUG"
            self.KOREAN_DATA_PATH = None
            self.POLISH_DATA_PATH = None
            self.PRESETS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "presets")
    return TestConfig()


KOREAN_RUN = {
    "name": "korean-test",
    "dataset": {"kind": "korean", "path": None},
    "preprocessing": {"impute": False, "scaler": {"kind": "minmax", "range": [-1.0, 1.0]}, "smote": None},
    "dimred": {"method": "lda", "n_components": 1},
    "model": {"kind": "logistic", "params": {"l2_penalty": 1.0}, "grid": {"l2_penalty": [0.1, 1.0]}},
    "split": {"test_fraction": 0.2},
    "cv": {"folds": 3, "metric": "accuracy", "roc": True},
    "seed": 42,
}


@pytest.fixture
def korean_run_config(korean_csv, tmp_path):
    """A small Korean run config dict; callers may modify their copy."""
    data = copy.deepcopy(KOREAN_RUN)
    data["dataset"]["path"] = korean_csv
    data["output_dir"] = str(tmp_path / "run")
    return data
