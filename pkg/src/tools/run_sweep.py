# src/tools/run_sweep.py

from typing import Any, Dict, Optional

from src.config import AppConfig, config as app_config
from src.errors import ConfigValidationError
from src.pipeline.experiment_config import load_config
from src.pipeline.sweep import run_matrix_async
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

RUN_SWEEP_SCHEMA = {
    "type": "object",
    "properties": {
        "config": {"type": "string", "description": "Experiment JSON file or preset name; must contain a 'sweep' section."},
        "seed": {"type": "integer", "minimum": 0, "description": "Overrides the config seed."},
        "out": {"type": "string", "description": "Sweep output directory; one subdirectory per cell."},
        "data": {"type": "string", "description": "Dataset file; overrides dataset.path."},
        "serial": {"type": "boolean", "default": False, "description": "Run cells one after another instead of concurrently."},
    },
    "required": ["config"]
}


async def run_sweep_tool(arguments: Dict[str, Any], settings: Optional[AppConfig] = None) -> Dict[str, Any]:
    """
    Runs the dimensionality-reduction × model matrix and writes summary.csv.

    Failed cells do not fail the tool; they are listed in "failed_cells".
    """
    settings = settings or app_config
    logger.info(f"Running 'run_sweep' tool with arguments: {arguments}")

    name = arguments.get("config")
    if not name:
        error_msg = "Missing required argument: config."
        logger.error(error_msg)
        return {"error": error_msg, "status_code": 400}

    try:
        config = load_config(name, settings).with_overrides(
            seed=arguments.get("seed"), output_dir=arguments.get("out"), data_path=arguments.get("data"))
        if config.sweep is None:
            raise ConfigValidationError(f"Config '{config.name}' has no 'sweep' section.")
        report = await run_matrix_async(config, serial=bool(arguments.get("serial", False)), settings=settings)
        return {
            "status": "completed",
            "output_dir": report.output_dir,
            "summary_path": report.summary_path,
            "rows": report.rows,
            "failed_cells": [f"{r['dimred']}-{r['model']}" for r in report.rows if r["status"] != "ok"],
            "message": f"Sweep '{report.name}' finished with {report.n_failed} failed cell(s).",
        }
    except ConfigValidationError as e:
        logger.error(f"Invalid sweep config: {e}")
        return {"error": f"Invalid config: {e}", "status_code": 400}
    except Exception as e:
        logger.error(f"Unexpected error in run_sweep tool: {e}", exc_info=True)
        return {"error": f"An unexpected error occurred: {str(e)}", "status_code": 500}
