# src/cli.py
# Command-line entry point: `run` for one experiment, `sweep` for the dimred × model matrix.

import argparse
import asyncio
import sys
from typing import Any, Dict, List, Optional

from src import __version__
from src.config import AppConfig, config as app_config
from src.numerics import U64_MAX
from src.pipeline import reports
from src.pipeline.experiment_config import list_presets
from src.tools.run_experiment import run_experiment_tool
from src.tools.run_sweep import run_sweep_tool
from src.utils.logging_config import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with the validation exit code instead of argparse's default 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _seed(value: str) -> int:
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {value!r}")
    if not 0 <= seed <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64 - 1], got {value}")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bankruptcy-forecast", description="Seeded bankruptcy-prediction experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL (DEBUG, INFO, WARNING, ...).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", required=True, help="Experiment JSON file or preset name.")
        p.add_argument("--seed", type=_seed, default=None, help="Overrides the config seed (unsigned 64-bit).")
        p.add_argument("--out", default=None, help="Output directory.")
        p.add_argument("--data", default=None, help="Dataset file; overrides dataset.path.")

    common(sub.add_parser("run", help="Run one experiment."))
    sweep = sub.add_parser("sweep", help="Run every dimred × model combination and write summary.csv.")
    common(sweep)
    sweep.add_argument("--serial", action="store_true", help="Run cells one at a time.")
    sub.add_parser("presets", help="List bundled presets.")
    return parser


def _exit_code(result: Dict[str, Any]) -> int:
    if "error" not in result:
        return EXIT_OK
    return EXIT_VALIDATION if result.get("status_code") == 400 else EXIT_RUNTIME


def main(argv: Optional[List[str]] = None, settings: Optional[AppConfig] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = settings or app_config
    setup_logging(args.log_level)

    if args.command == "presets":
        for name in list_presets(settings):
            print(name)
        return EXIT_OK

    arguments: Dict[str, Any] = {"config": args.config, "seed": args.seed, "out": args.out, "data": args.data}
    if args.command == "run":
        result = asyncio.run(run_experiment_tool(arguments, settings))
        if "error" not in result:
            print(reports.format_report(result["report"]))
            print(f"Outputs: {result['output_dir']}")
    else:
        arguments["serial"] = args.serial
        result = asyncio.run(run_sweep_tool(arguments, settings))
        if "error" not in result:
            print(reports.format_summary(result["rows"]))
            print(f"Summary: {result['summary_path']}")

    if "error" in result:
        print(f"error: {result['error']}", file=sys.stderr)
    return _exit_code(result)


if __name__ == "__main__":
    sys.exit(main())
