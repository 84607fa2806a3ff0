# src/tools package
# Async entry points behind the command line; each returns a result dict or {"error", "status_code"}.
# from .run_experiment import run_experiment_tool
# from .run_sweep import run_sweep_tool
