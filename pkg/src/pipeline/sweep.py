# src/pipeline/sweep.py
# Dimensionality-reduction × classifier sweeps with a summary table.

import asyncio
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.config import AppConfig, config as app_config
from src.errors import ConfigValidationError
from src.pipeline import reports
from src.pipeline.experiment_config import ExperimentConfig
from src.pipeline.runner import run_experiment
from src.task_manager import TaskManager
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

TASKS_SUBDIR = "tasks"


@dataclass
class SweepReport:
    name: str
    output_dir: str
    summary_path: str
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def n_failed(self) -> int:
        return sum(1 for row in self.rows if row["status"] != "ok")


def plan_cells(config: ExperimentConfig, out_dir: str) -> List[Tuple[str, ExperimentConfig]]:
    """Cells in row-major order (dimred outer, model inner), each with its own output directory."""
    if config.sweep is None:
        raise ConfigValidationError(f"Config '{config.name}' has no 'sweep' section.")
    cells = []
    seen: Dict[str, int] = {}
    for dimred in config.sweep.dimred:
        for model in config.sweep.models:
            base = f"{dimred.method}-{model.kind}"
            seen[base] = seen.get(base, 0) + 1
            cell = base if seen[base] == 1 else f"{base}-{seen[base]}"
            cells.append((cell, config.for_cell(dimred, model, os.path.join(out_dir, cell))))
    return cells


def summary_row(cell: ExperimentConfig, report: Optional[Dict[str, Any]], error: Optional[str] = None) -> Dict[str, Any]:
    """One summary.csv row from a run report dict (RunReport.to_dict()), or a failed row when report is None."""
    row: Dict[str, Any] = {"dimred": cell.dimred.method, "model": cell.model.kind}
    if report is None:
        row.update({"status": "failed", "report_path": None, "error": error})
        return row
    test = report.get("test_metrics", {})
    row.update({k: test.get(k) for k in ("accuracy", "precision", "recall", "f1", "auc")})
    row.update({
        "cv_auc_mean": report.get("cv_auc_mean"),
        "status": "ok",
        "report_path": os.path.join(report.get("output_dir") or cell.output_dir, "metrics.json"),
        "error": None,
    })
    return row


def _run_serial(cells: List[Tuple[str, ExperimentConfig]], settings: AppConfig) -> List[Dict[str, Any]]:
    rows = []
    for cell_name, cell in cells:
        try:
            rows.append(summary_row(cell, run_experiment(cell, settings).to_dict()))
        except Exception as e:
            logger.error(f"Sweep cell {cell_name} failed: {e}")
            rows.append(summary_row(cell, None, str(e)))
    return rows


async def _run_parallel(cells: List[Tuple[str, ExperimentConfig]], out_dir: str,
                        settings: AppConfig) -> List[Dict[str, Any]]:
    manager = TaskManager(os.path.join(out_dir, TASKS_SUBDIR), settings)
    for cell_name, cell in cells:
        await manager.create_task(cell_name, cell)
    tasks = await manager.run_all([cell_name for cell_name, _ in cells])
    return [
        summary_row(cell, task.results) if task.status == "completed" else summary_row(cell, None, task.error_message)
        for (_, cell), task in zip(cells, tasks)
    ]


async def run_matrix_async(config: ExperimentConfig, serial: bool = False,
                           settings: Optional[AppConfig] = None) -> SweepReport:
    settings = settings or app_config
    config = config.with_overrides()
    config.validate(settings)
    out_dir = config.output_dir or os.path.join(settings.OUTPUT_DIR, config.name)
    cells = plan_cells(config, out_dir)
    os.makedirs(out_dir, exist_ok=True)
    logger.info(f"Sweep '{config.name}': {len(cells)} cells "
                f"({len(config.sweep.dimred)} dimred × {len(config.sweep.models)} models), "
                f"{'serial' if serial else f'up to {settings.MAX_CONCURRENT_RUNS} concurrent'}, output {out_dir}")
    if serial:
        rows = await asyncio.to_thread(_run_serial, cells, settings)
    else:
        rows = await _run_parallel(cells, out_dir, settings)

    summary_path = reports.write_summary_csv(rows, os.path.join(out_dir, "summary.csv"))
    report = SweepReport(name=config.name, output_dir=out_dir, summary_path=summary_path, rows=rows)
    logger.info(f"Sweep '{config.name}' finished: {len(rows) - report.n_failed} ok, {report.n_failed} failed "
                f"→ {summary_path}")
    return report


def run_matrix(config: ExperimentConfig, serial: bool = False, settings: Optional[AppConfig] = None) -> SweepReport:
    """
    Runs every (dimred, model) cell of the sweep and writes `summary.csv`.

    Each cell is a full run with its own RNG substreams, so serial and
    concurrent execution produce identical numbers. A failed cell becomes a
    `failed` row and the sweep continues.
    """
    return asyncio.run(run_matrix_async(config, serial, settings))
