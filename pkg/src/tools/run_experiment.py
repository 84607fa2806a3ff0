# src/tools/run_experiment.py

import asyncio
from typing import Any, Dict, Optional

from src.config import AppConfig, config as app_config
from src.errors import ConfigValidationError, StageError
from src.pipeline.experiment_config import load_config
from src.pipeline.runner import run_experiment
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

RUN_EXPERIMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "config": {"type": "string", "description": "Path to an experiment JSON file or the name of a bundled preset."},
        "seed": {"type": "integer", "minimum": 0, "description": "Overrides the config seed."},
        "out": {"type": "string", "description": "Output directory; defaults to OUTPUT_DIR/<config name>."},
        "data": {"type": "string", "description": "Dataset file; overrides dataset.path."},
    },
    "required": ["config"]
}


async def run_experiment_tool(arguments: Dict[str, Any], settings: Optional[AppConfig] = None) -> Dict[str, Any]:
    """
    Runs one experiment end to end.

    Args:
        arguments: A dictionary matching RUN_EXPERIMENT_SCHEMA.
        settings: Application settings; defaults to the environment-backed config.

    Returns:
        On success, {"status": "completed", "output_dir", "report", "message"}.
        On failure, {"error", "status_code"}: 400 for an invalid config, 500 when a stage fails.
    """
    settings = settings or app_config
    logger.info(f"Running 'run_experiment' tool with arguments: {arguments}")

    name = arguments.get("config")
    if not name:
        error_msg = "Missing required argument: config."
        logger.error(error_msg)
        return {"error": error_msg, "status_code": 400}

    try:
        config = load_config(name, settings).with_overrides(
            seed=arguments.get("seed"), output_dir=arguments.get("out"), data_path=arguments.get("data"))
        report = await asyncio.to_thread(run_experiment, config, settings)
        return {
            "status": "completed",
            "output_dir": report.output_dir,
            "report": report.to_dict(),
            "message": f"Run '{report.name}' completed.",
        }
    except ConfigValidationError as e:
        logger.error(f"Invalid experiment config: {e}")
        return {"error": f"Invalid config: {e}", "status_code": 400}
    except StageError as e:
        return {"error": str(e), "stage": e.stage, "config": e.config_echo, "status_code": 500}
    except Exception as e:
        logger.error(f"Unexpected error in run_experiment tool: {e}", exc_info=True)
        return {"error": f"An unexpected error occurred: {str(e)}", "status_code": 500}
