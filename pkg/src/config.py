# src/config.py
# Project configuration management

import os
from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()

class AppConfig:
    """Application configuration settings."""

    # Logging settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()
    LOG_FILE: str | None = os.getenv("LOG_FILE") # e.g., "bankruptcy_forecast.log"

    # Run output settings
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "runs") # Root directory for run artifacts
    MAX_CONCURRENT_RUNS: int = int(os.getenv("MAX_CONCURRENT_RUNS", "2"))
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "42"))

    # Dataset locations, used when a config leaves dataset.path empty
    KOREAN_DATA_PATH: str | None = os.getenv("KOREAN_DATA_PATH") # e.g., "data/Qualitative_Bankruptcy.data.txt"
    POLISH_DATA_PATH: str | None = os.getenv("POLISH_DATA_PATH") # e.g., "data/5year.arff"

    PRESETS_DIR: str = os.getenv(
        "PRESETS_DIR",
        os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "presets"),
    )

    def dataset_path_for(self, kind: str) -> str | None:
        """Environment fallback path for a dataset kind ("korean" or "polish")."""
        return {"korean": self.KOREAN_DATA_PATH, "polish": self.POLISH_DATA_PATH}.get(kind)

# Instantiate the config object for easy import elsewhere
config = AppConfig()

if __name__ == "__main__":
    print("Configuration Settings:")
    for key, value in AppConfig.__dict__.items():
        if not key.startswith("__") and not callable(value):
            actual_value = getattr(config, key, "N/A")
            print(f"  {key}: {actual_value}")
    print(f"\nRun artifacts will be stored in: {os.path.abspath(config.OUTPUT_DIR)}")
