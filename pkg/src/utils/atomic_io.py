# src/utils/atomic_io.py
# Atomic JSON writes and staged output directories.

import json
import os
import shutil
from contextlib import contextmanager
from typing import Any, Iterator

from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def write_json_atomic(path: str, payload: Any, indent: int = 2) -> None:
    """Saves a JSON document using a temporary file and a rename."""
    tmp_path = path + ".tmp"
    try:
        with open(tmp_path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=indent, sort_keys=True)
            f.write("\n")
        os.replace(tmp_path, path)
        logger.debug(f"Saved JSON document to {path}")
    except (IOError, TypeError, ValueError) as e:
        logger.error(f"Failed to save JSON document to {path}: {e}")
        if os.path.exists(tmp_path):
            try: os.remove(tmp_path)
            except OSError: logger.error(f"Failed to remove temporary file {tmp_path} after save error.")
        raise


@contextmanager
def staged_directory(final_dir: str) -> Iterator[str]:
    """
    Yields a staging directory that replaces `final_dir` only if the block succeeds.

    On any exception the staging directory is removed, so a failed run leaves no
    partial outputs behind.
    """
    staging_dir = final_dir.rstrip("/\\") + ".partial"
    if os.path.exists(staging_dir):
        shutil.rmtree(staging_dir)
    os.makedirs(staging_dir, exist_ok=True)
    try:
        yield staging_dir
    except BaseException:
        shutil.rmtree(staging_dir, ignore_errors=True)
        logger.info(f"Removed partial outputs in {staging_dir}")
        raise
    if os.path.exists(final_dir):
        shutil.rmtree(final_dir)
    parent = os.path.dirname(os.path.abspath(final_dir))
    os.makedirs(parent, exist_ok=True)
    os.replace(staging_dir, final_dir)
