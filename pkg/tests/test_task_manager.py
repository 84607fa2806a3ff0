import json
import os
import threading
import time

import pytest

# Module to be tested
from src.task_manager import Task, TaskManager
from src.errors import StageError
from src.pipeline.experiment_config import parse_config

# --- Test Configuration & Fixtures ---


class FakeReport:
    def __init__(self, label):
        self.label = label

    def to_dict(self):
        return {"cell": self.label, "test_metrics": {"accuracy": 1.0}}


class RecordingRunner:
    """Stands in for run_experiment; records peak concurrency and fails chosen cells."""
    def __init__(self, fail_with=None, delay=0.05):
        self.fail_with = fail_with or {}
        self.delay = delay
        self.active = 0
        self.peak = 0
        self.calls = []
        self._lock = threading.Lock()

    def __call__(self, experiment, settings):
        with self._lock:
            self.active += 1
            self.peak = max(self.peak, self.active)
            self.calls.append(experiment.cell_label)
        try:
            time.sleep(self.delay)
            error = self.fail_with.get(experiment.cell_label)
            if error is not None:
                raise error
            return FakeReport(experiment.cell_label)
        finally:
            with self._lock:
                self.active -= 1


@pytest.fixture
def tasks_dir(tmp_path):
    return str(tmp_path / "tasks")


@pytest.fixture
def experiments(korean_run_config):
    base = parse_config(korean_run_config)
    cells = {}
    for method in ("pca", "lda"):
        for kind in ("logistic", "kdtree"):
            cell = base.with_overrides()
            cell.dimred.method = method
            cell.model.kind = kind
            cells[f"{method}-{kind}"] = cell
    return cells


def _read_task_file(tasks_dir, task_id):
    with open(os.path.join(tasks_dir, task_id, "task_info.json"), "r", encoding="utf-8") as f:
        return json.load(f)

# --- Test Cases ---


def test_task_round_trip_and_status_validation():
    task = Task("pca-svm", {"seed": 1})
    task.update_status("failed", error_message="boom", failed_stage="fit")
    restored = Task.from_dict(task.to_dict())
    assert restored.to_dict() == task.to_dict()
    with pytest.raises(ValueError):
        task.update_status("paused")
    with pytest.raises(ValueError):
        Task.from_dict({"task_id": "x"})


@pytest.mark.asyncio
async def test_create_task_persists(tasks_dir, experiments, test_app_config):
    tm = TaskManager(tasks_dir, test_app_config, runner=RecordingRunner())
    task_id = await tm.create_task("pca-logistic", experiments["pca-logistic"])
    assert task_id == "pca-logistic"
    saved = _read_task_file(tasks_dir, task_id)
    assert saved["status"] == "pending"
    assert saved["config"]["dimred"]["method"] == "pca"
    status = await tm.get_task_status(task_id)
    assert status == {"task_id": task_id, "status": "pending", "error_message": None, "failed_stage": None}
    results = await tm.get_task_results(task_id)
    assert "not yet completed" in results["message"]


@pytest.mark.asyncio
async def test_run_task_records_results(tasks_dir, experiments, test_app_config):
    tm = TaskManager(tasks_dir, test_app_config, runner=RecordingRunner(delay=0.0))
    await tm.create_task("lda-kdtree", experiments["lda-kdtree"])
    task = await tm.run_task("lda-kdtree")
    assert task.status == "completed"
    assert await tm.get_task_results("lda-kdtree") == {"cell": "lda|kdtree", "test_metrics": {"accuracy": 1.0}}
    assert _read_task_file(tasks_dir, "lda-kdtree")["status"] == "completed"


@pytest.mark.asyncio
async def test_failures_are_recorded_not_raised(tasks_dir, experiments, test_app_config):
    runner = RecordingRunner(delay=0.0, fail_with={
        "pca|logistic": StageError("fit", ValueError("singular Hessian")),
        "pca|kdtree": RuntimeError("disk full"),
    })
    tm = TaskManager(tasks_dir, test_app_config, runner=runner)
    for cell in ("pca-logistic", "pca-kdtree"):
        await tm.create_task(cell, experiments[cell])
    staged, plain = await tm.run_all(["pca-logistic", "pca-kdtree"])
    assert staged.status == "failed" and staged.failed_stage == "fit"
    assert "singular Hessian" in staged.error_message
    assert plain.status == "failed" and plain.failed_stage is None
    assert plain.error_message == "RuntimeError: disk full"
    assert (await tm.get_task_results("pca-kdtree"))["error"] == "RuntimeError: disk full"
    assert _read_task_file(tasks_dir, "pca-logistic")["failed_stage"] == "fit"


@pytest.mark.asyncio
async def test_run_all_respects_concurrency_limit_and_order(tasks_dir, experiments, test_app_config):
    runner = RecordingRunner(delay=0.05)
    tm = TaskManager(tasks_dir, test_app_config, runner=runner)
    ids = list(experiments)
    for task_id in ids:
        await tm.create_task(task_id, experiments[task_id])
    tasks = await tm.run_all(ids)
    assert [t.task_id for t in tasks] == ids
    assert all(t.status == "completed" for t in tasks)
    assert 1 <= runner.peak <= test_app_config.MAX_CONCURRENT_RUNS
    assert sorted(runner.calls) == sorted(e.cell_label for e in experiments.values())


@pytest.mark.asyncio
async def test_run_all_defaults_to_pending_tasks(tasks_dir, experiments, test_app_config):
    tm = TaskManager(tasks_dir, test_app_config, runner=RecordingRunner(delay=0.0))
    await tm.create_task("pca-logistic", experiments["pca-logistic"])
    await tm.create_task("lda-logistic", experiments["lda-logistic"])
    await tm.run_task("pca-logistic")
    rerun = await tm.run_all()
    assert [t.task_id for t in rerun] == ["lda-logistic"]


@pytest.mark.asyncio
async def test_task_persistence_and_load(tasks_dir, experiments, test_app_config):
    tm1 = TaskManager(tasks_dir, test_app_config, runner=RecordingRunner(delay=0.0))
    await tm1.create_task("lda-logistic", experiments["lda-logistic"])
    await tm1.run_task("lda-logistic")
    original = tm1._get_task_or_raise("lda-logistic").to_dict()

    tm2 = TaskManager(tasks_dir, test_app_config)
    loaded = tm2._get_task_or_raise("lda-logistic")
    assert loaded.to_dict() == original
    assert loaded.experiment is None
    assert await tm2.run_all() == []


@pytest.mark.asyncio
async def test_interrupted_task_loading(tasks_dir, test_app_config):
    task_dir = os.path.join(tasks_dir, "pca-svm")
    os.makedirs(task_dir, exist_ok=True)
    with open(os.path.join(task_dir, "task_info.json"), "w") as f:
        json.dump({"task_id": "pca-svm", "config": {"seed": 42}, "status": "running"}, f)
    # a corrupt neighbour is skipped
    os.makedirs(os.path.join(tasks_dir, "broken"), exist_ok=True)
    with open(os.path.join(tasks_dir, "broken", "task_info.json"), "w") as f:
        f.write("{not json")

    tm = TaskManager(tasks_dir, test_app_config)
    assert [t.task_id for t in tm.get_all_tasks()] == ["pca-svm"]
    assert (await tm.get_task_status("pca-svm"))["status"] == "interrupted"
    assert _read_task_file(tasks_dir, "pca-svm")["status"] == "interrupted"
    with pytest.raises(ValueError):
        await tm.run_task("pca-svm")


@pytest.mark.asyncio
async def test_unknown_task(tasks_dir, test_app_config):
    tm = TaskManager(tasks_dir, test_app_config)
    with pytest.raises(ValueError):
        await tm.get_task_status("nope")
