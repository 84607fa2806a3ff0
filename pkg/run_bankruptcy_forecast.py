#!/usr/bin/env python3
"""
Launcher for the bankruptcy forecasting command line.

    python run_bankruptcy_forecast.py run --config korean-table1 --data data/Qualitative_Bankruptcy.data.txt
    python run_bankruptcy_forecast.py sweep --config polish-table3 --data data/5year.arff
"""

import sys
import os

# Add the project root to the Python path
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

try:
    from src.cli import main
except ImportError as e:
    print(f"Import error: {e}")
    print("Make sure the dependencies are installed: pip install -r requirements.txt")
    sys.exit(2)

if __name__ == "__main__":
    sys.exit(main())
