# src/task_manager.py
# Contains the TaskManager for sweep cells

import asyncio
import json
import os
from typing import Any, Callable, Dict, List, Optional

from src.config import AppConfig, config as app_config
from src.errors import StageError
from src.pipeline.experiment_config import ExperimentConfig
from src.pipeline.runner import RunReport, run_experiment
from src.utils.atomic_io import write_json_atomic
from src.utils.logging_config import get_logger

TASK_STATUSES = ("pending", "running", "completed", "failed", "interrupted")


class Task:
    """Represents one sweep cell: a (dimred, model) pair run as a full experiment."""
    def __init__(self, task_id: str, config: Dict[str, Any]):
        self.task_id: str = task_id
        self.config: Dict[str, Any] = config
        self.status: str = "pending"
        self.results: Optional[Dict[str, Any]] = None
        self.error_message: Optional[str] = None
        self.failed_stage: Optional[str] = None
        self.experiment: Optional[ExperimentConfig] = None # Runtime object, not persisted

    def update_status(self, status: str, error_message: Optional[str] = None, failed_stage: Optional[str] = None):
        if status not in TASK_STATUSES:
            raise ValueError(f"Unknown task status '{status}'.")
        self.status = status
        if error_message:
            self.error_message = error_message
        if failed_stage:
            self.failed_stage = failed_stage

    def set_results(self, results: Dict[str, Any]):
        self.results = results

    def to_dict(self) -> Dict[str, Any]:
        """Serializes the task object to a dictionary for JSON storage."""
        return {
            "task_id": self.task_id,
            "config": self.config,
            "status": self.status,
            "results": self.results,
            "error_message": self.error_message,
            "failed_stage": self.failed_stage,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Task':
        """Deserializes a dictionary back into a Task object."""
        task_id = data.get("task_id")
        config = data.get("config")
        if not task_id or not config:
            raise ValueError("Task data is missing task_id or config.")
        task = cls(task_id=task_id, config=config)
        task.status = data.get("status", "pending")
        task.results = data.get("results")
        task.error_message = data.get("error_message")
        task.failed_stage = data.get("failed_stage")
        return task


class TaskManager:
    """Runs sweep cells concurrently, bounded by MAX_CONCURRENT_RUNS, and persists their state."""

    def __init__(self, tasks_dir: str, config: Optional[AppConfig] = None,
                 runner: Callable[[ExperimentConfig, AppConfig], RunReport] = run_experiment):
        self.logger = get_logger(__name__)
        self.config = config or app_config
        self.tasks_dir = tasks_dir
        self._runner = runner
        self._tasks: Dict[str, Task] = {}
        self._concurrency_semaphore = asyncio.Semaphore(max(1, self.config.MAX_CONCURRENT_RUNS))
        self._lock = asyncio.Lock() # For concurrent access to _tasks dictionary
        self.logger.info(f"Task manager initialized with MAX_CONCURRENT_RUNS={self.config.MAX_CONCURRENT_RUNS}")

        if not os.path.exists(self.tasks_dir):
            try:
                os.makedirs(self.tasks_dir, exist_ok=True)
                self.logger.info(f"Task directory created: {self.tasks_dir}")
            except OSError as e:
                self.logger.error(f"Failed to create task directory {self.tasks_dir}: {e}")

        self._load_tasks_from_disk()

    def _task_file(self, task_id: str) -> str:
        return os.path.join(self.tasks_dir, task_id, "task_info.json")

    def _load_tasks_from_disk(self):
        """Loads persisted cells left by an earlier sweep into the same output directory."""
        if not os.path.isdir(self.tasks_dir):
            return
        for task_id_dir_name in sorted(os.listdir(self.tasks_dir)):
            task_info_file = self._task_file(task_id_dir_name)
            if not os.path.exists(task_info_file):
                continue
            try:
                with open(task_info_file, 'r', encoding='utf-8') as f:
                    task = Task.from_dict(json.load(f))
                if task.status == "running":
                    self.logger.warning(f"Task {task.task_id} was 'running' before shutdown. Resetting to 'interrupted'.")
                    task.update_status("interrupted")
                    self._save_task_to_disk_sync(task)
                self._tasks[task.task_id] = task
                self.logger.debug(f"Loaded task {task.task_id} from disk with status '{task.status}'.")
            except json.JSONDecodeError as e:
                self.logger.error(f"Failed to decode JSON for task in {task_info_file}: {e}")
            except ValueError as e:
                self.logger.error(f"Failed to load task from data in {task_info_file} (missing fields?): {e}")

    async def create_task(self, task_id: str, experiment: ExperimentConfig) -> str:
        """Registers one cell; an existing task with the same id is replaced."""
        task = Task(task_id=task_id, config=experiment.to_dict())
        task.experiment = experiment
        async with self._lock:
            self._tasks[task_id] = task
        await self._save_task_to_disk(task)
        self.logger.info(f"Task {task_id} created ({experiment.cell_label}).")
        return task_id

    async def _save_task_to_disk(self, task: Task):
        try:
            await asyncio.to_thread(self._save_task_to_disk_sync, task)
        except Exception:
            # Errors are already logged by the synchronous writer.
            pass

    def _save_task_to_disk_sync(self, task: Task):
        os.makedirs(os.path.dirname(self._task_file(task.task_id)), exist_ok=True)
        write_json_atomic(self._task_file(task.task_id), task.to_dict())

    async def run_task(self, task_id: str) -> Task:
        """Runs one cell in a worker thread; failures are recorded on the task, never raised."""
        task = self._get_task_or_raise(task_id)
        if task.experiment is None:
            raise ValueError(f"Task {task_id} has no experiment attached and cannot be run.")
        async with self._concurrency_semaphore:
            task.update_status("running")
            await self._save_task_to_disk(task)
            self.logger.info(f"Task [{task_id}]: running {task.experiment.cell_label}")
            try:
                report = await asyncio.to_thread(self._runner, task.experiment, self.config)
                task.set_results(report.to_dict())
                task.update_status("completed")
                self.logger.info(f"Task [{task_id}]: completed.")
            except StageError as e:
                task.update_status("failed", error_message=str(e), failed_stage=e.stage)
                self.logger.error(f"Task [{task_id}]: failed in stage '{e.stage}': {e.cause}")
            except Exception as e:
                task.update_status("failed", error_message=f"{type(e).__name__}: {e}")
                self.logger.error(f"Task [{task_id}]: error during execution - {e}", exc_info=True)
            await self._save_task_to_disk(task)
        return task

    async def run_all(self, task_ids: Optional[List[str]] = None) -> List[Task]:
        """Runs the given cells (default: all pending or interrupted) and returns them in input order."""
        if task_ids is None:
            task_ids = [t.task_id for t in self.get_all_tasks()
                        if t.status in ("pending", "interrupted") and t.experiment is not None]
        return list(await asyncio.gather(*(self.run_task(task_id) for task_id in task_ids)))

    async def get_task_status(self, task_id: str) -> Dict[str, Any]:
        """Gets the status of a specific task."""
        task = self._get_task_or_raise(task_id)
        return {
            "task_id": task.task_id,
            "status": task.status,
            "error_message": task.error_message,
            "failed_stage": task.failed_stage,
        }

    async def get_task_results(self, task_id: str) -> Optional[Dict[str, Any]]:
        """Gets the results of a completed task."""
        task = self._get_task_or_raise(task_id)
        if task.status == "completed":
            return task.results
        elif task.status == "failed":
            return {"error": task.error_message or "Task failed without specific error message."}
        else:
            return {"message": f"Task {task_id} is not yet completed (status: {task.status})."}

    def _get_task_or_raise(self, task_id: str) -> Task:
        task = self._tasks.get(task_id)
        if not task:
            self.logger.warning(f"_get_task_or_raise: Task with ID '{task_id}' not found.")
            raise ValueError(f"Task with ID '{task_id}' not found.")
        return task

    def get_all_tasks(self) -> List[Task]:
        """Returns a list of all task objects, ordered by id."""
        return [self._tasks[k] for k in sorted(self._tasks)]
