# src/pipeline package
# Experiment configuration, single runs (runner.py), sweeps (sweep.py) and report writers (reports.py).
# Submodules are imported directly; src.task_manager depends on runner.py.
