# src/errors.py
# Exception hierarchy shared by every module.
#
# Each class also derives from the builtin a caller would naturally catch,
# so `except ValueError` keeps working for input problems.

from typing import Any, Dict, Optional


class BankruptcyForecastError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(BankruptcyForecastError, ValueError):
    """Non-square, asymmetric or length-mismatched input."""


class NumericalError(BankruptcyForecastError, ArithmeticError):
    """A numerical routine could not produce a valid result."""

    def __init__(self, message: str, pivot_index: Optional[int] = None):
        super().__init__(message)
        self.pivot_index = pivot_index


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message: str, max_violation: Optional[float] = None):
        super().__init__(message)
        self.max_violation = max_violation


class TrainingError(NumericalError):
    """Training diverged (non-finite loss)."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch


class ParseError(BankruptcyForecastError, ValueError):
    """Malformed dataset file. Line and column are 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.line = line
        self.column = column


class ParameterError(BankruptcyForecastError, ValueError):
    """A hyperparameter or argument is out of its documented range."""


class SplitError(ParameterError):
    """Train/test or fold split cannot be formed from the given labels."""


class FitError(BankruptcyForecastError, ValueError):
    """A transform or model cannot be fitted to the given data."""

    def __init__(self, message: str, feature: Optional[str] = None, component_count: Optional[int] = None):
        super().__init__(message)
        self.feature = feature
        self.component_count = component_count


class EvaluationError(BankruptcyForecastError, ValueError):
    """Quality-control metric undefined for the given labels."""


class ConfigValidationError(BankruptcyForecastError, ValueError):
    """Experiment configuration failed validation."""


class StageError(BankruptcyForecastError, RuntimeError):
    """A pipeline stage failed; carries the stage name and the config echo."""

    def __init__(self, stage: str, cause: BaseException, config_echo: Optional[Dict[str, Any]] = None):
        super().__init__(f"Stage '{stage}' failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
        self.config_echo = config_echo or {}
