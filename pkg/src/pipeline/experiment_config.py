# src/pipeline/experiment_config.py
# Declarative experiment configuration: JSON parsing, validation and preset lookup.

import copy
import json
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from src.config import AppConfig, config as app_config
from src.data.dataset import LOADERS
from src.data.preprocessing import SCALER_KINDS
from src.dimred import DIMRED_METHODS
from src.errors import ConfigValidationError, ParameterError
from src.evaluation.selection import CV_METRICS
from src.models.base import MODEL_KINDS, resolve_params
from src.numerics import U64_MAX
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

PRESET_SUFFIX = ".json"


@dataclass
class DatasetConfig:
    kind: str
    path: Optional[str] = None


@dataclass
class ScalerConfig:
    kind: str = "minmax"
    range: Tuple[float, float] = (-1.0, 1.0)


@dataclass
class SmoteConfig:
    k_neighbors: int = 5
    target_ratio: float = 1.0


@dataclass
class PreprocessingConfig:
    impute: bool = False
    scaler: Optional[ScalerConfig] = field(default_factory=ScalerConfig)
    smote: Optional[SmoteConfig] = None


@dataclass
class DimredConfig:
    method: str = "none"
    n_components: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ModelConfig:
    kind: str = "logistic"
    params: Dict[str, Any] = field(default_factory=dict)
    grid: Optional[Dict[str, List[Any]]] = None
    train_subsample: Optional[int] = None


@dataclass
class SplitConfig:
    test_fraction: float = 0.2


@dataclass
class CvConfig:
    folds: int = 10
    metric: str = "accuracy"
    roc: bool = True


@dataclass
class SweepConfig:
    dimred: List[DimredConfig] = field(default_factory=list)
    models: List[ModelConfig] = field(default_factory=list)


@dataclass
class ExperimentConfig:
    name: str
    dataset: DatasetConfig
    preprocessing: PreprocessingConfig = field(default_factory=PreprocessingConfig)
    dimred: DimredConfig = field(default_factory=DimredConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    cv: CvConfig = field(default_factory=CvConfig)
    seed: int = 42
    output_dir: Optional[str] = None
    sweep: Optional[SweepConfig] = None

    @property
    def cell_label(self) -> str:
        """RNG substream label shared by a single run and its sweep row."""
        return f"{self.dimred.method}|{self.model.kind}"

    def to_dict(self) -> Dict[str, Any]:
        echo = asdict(self)
        echo["preprocessing"]["scaler"] = (None if self.preprocessing.scaler is None
                                           else {"kind": self.preprocessing.scaler.kind,
                                                 "range": list(self.preprocessing.scaler.range)})
        return echo

    def with_overrides(self, seed: Optional[int] = None, output_dir: Optional[str] = None,
                       data_path: Optional[str] = None) -> "ExperimentConfig":
        updated = copy.deepcopy(self)
        if seed is not None:
            updated.seed = _check_seed(seed)
        if output_dir is not None:
            updated.output_dir = output_dir
        if data_path is not None:
            updated.dataset.path = data_path
        return updated

    def for_cell(self, dimred: DimredConfig, model: ModelConfig, output_dir: str) -> "ExperimentConfig":
        return replace(copy.deepcopy(self), dimred=copy.deepcopy(dimred), model=copy.deepcopy(model),
                       output_dir=output_dir, sweep=None)

    def resolved_data_path(self, settings: Optional[AppConfig] = None) -> Optional[str]:
        settings = settings or app_config
        return self.dataset.path or settings.dataset_path_for(self.dataset.kind)

    def validate(self, settings: Optional[AppConfig] = None) -> "ExperimentConfig":
        """Checks that referenced files exist; structural checks already ran at parse time."""
        path = self.resolved_data_path(settings)
        if not path:
            raise ConfigValidationError(
                f"No data path for dataset '{self.dataset.kind}': set dataset.path, pass --data, "
                f"or set {self.dataset.kind.upper()}_DATA_PATH."
            )
        if not os.path.isfile(path):
            raise ConfigValidationError(f"Dataset file not found: {path}")
        self.dataset.path = path
        return self


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigValidationError(message)


def _check_seed(seed: Any) -> int:
    _require(isinstance(seed, int) and not isinstance(seed, bool) and 0 <= seed <= U64_MAX,
             f"seed must be an unsigned 64-bit integer, got {seed!r}.")
    return int(seed)


def _check_keys(section: str, data: Dict[str, Any], allowed: Tuple[str, ...]) -> None:
    _require(isinstance(data, dict), f"'{section}' must be an object.")
    unknown = sorted(set(data) - set(allowed))
    _require(not unknown, f"Unknown key(s) in '{section}': {', '.join(unknown)}.")


def _parse_dimred(data: Dict[str, Any], section: str) -> DimredConfig:
    _check_keys(section, data, ("method", "n_components", "params"))
    method = data.get("method", "none")
    _require(method in DIMRED_METHODS, f"{section}.method must be one of {', '.join(DIMRED_METHODS)}, got {method!r}.")
    n = data.get("n_components")
    if method != "none":
        _require(isinstance(n, int) and n >= 1, f"{section}.n_components must be a positive integer, got {n!r}.")
    params = data.get("params") or {}
    _require(isinstance(params, dict), f"{section}.params must be an object.")
    if method == "isomap" and "k_neighbors" in params:
        _require(isinstance(params["k_neighbors"], int) and params["k_neighbors"] >= 1,
                 f"{section}.params.k_neighbors must be a positive integer.")
    if method == "kpca" and params.get("gamma") is not None:
        _require(params["gamma"] > 0, f"{section}.params.gamma must be positive.")
    return DimredConfig(method=method, n_components=n if method != "none" else None, params=dict(params))


def _parse_model(data: Dict[str, Any], section: str) -> ModelConfig:
    _check_keys(section, data, ("kind", "params", "grid", "train_subsample"))
    kind = data.get("kind", "logistic")
    _require(kind in MODEL_KINDS, f"{section}.kind must be one of {', '.join(MODEL_KINDS)}, got {kind!r}.")
    params = data.get("params") or {}
    grid = data.get("grid")
    try:
        resolve_params(kind, params)
        if grid is not None:
            _require(isinstance(grid, dict) and grid, f"{section}.grid must be a non-empty object.")
            for name, values in grid.items():
                _require(isinstance(values, list) and values, f"{section}.grid.{name} must be a non-empty list.")
            resolve_params(kind, {name: values[0] for name, values in grid.items()})
    except ParameterError as e:
        raise ConfigValidationError(f"{section}: {e}") from e
    subsample = data.get("train_subsample")
    _require(subsample is None or (isinstance(subsample, int) and subsample >= 2),
             f"{section}.train_subsample must be null or an integer ≥ 2.")
    return ModelConfig(kind=kind, params=dict(params), grid=None if grid is None else dict(grid),
                       train_subsample=subsample)


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Builds an ExperimentConfig from a JSON object; any structural problem raises ConfigValidationError."""
    _check_keys("config", data, ("name", "dataset", "preprocessing", "dimred", "model", "split", "cv",
                                 "seed", "output_dir", "sweep"))
    dataset = data.get("dataset")
    _require(isinstance(dataset, dict), "'dataset' section is required.")
    _check_keys("dataset", dataset, ("kind", "path"))
    _require(dataset.get("kind") in LOADERS,
             f"dataset.kind must be one of {', '.join(LOADERS)}, got {dataset.get('kind')!r}.")

    pre = data.get("preprocessing", {})
    _check_keys("preprocessing", pre, ("impute", "scaler", "smote"))
    scaler = None
    if pre.get("scaler", {}) is not None:
        raw = pre.get("scaler", {})
        _check_keys("preprocessing.scaler", raw, ("kind", "range"))
        kind = raw.get("kind", "minmax")
        _require(kind in SCALER_KINDS, f"preprocessing.scaler.kind must be one of {', '.join(SCALER_KINDS)}.")
        bounds = raw.get("range", [-1.0, 1.0])
        _require(isinstance(bounds, list) and len(bounds) == 2 and float(bounds[0]) < float(bounds[1]),
                 "preprocessing.scaler.range must be [min, max] with min < max.")
        scaler = ScalerConfig(kind=kind, range=(float(bounds[0]), float(bounds[1])))
    smote = None
    if pre.get("smote") is not None:
        raw = pre["smote"]
        _check_keys("preprocessing.smote", raw, ("k_neighbors", "target_ratio"))
        smote = SmoteConfig(k_neighbors=raw.get("k_neighbors", 5), target_ratio=raw.get("target_ratio", 1.0))
        _require(isinstance(smote.k_neighbors, int) and smote.k_neighbors >= 1,
                 "preprocessing.smote.k_neighbors must be a positive integer.")
        _require(isinstance(smote.target_ratio, (int, float)) and 0 < smote.target_ratio <= 1.0,
                 "preprocessing.smote.target_ratio must be in (0, 1].")
    preprocessing = PreprocessingConfig(impute=bool(pre.get("impute", False)), scaler=scaler, smote=smote)

    split = data.get("split", {})
    _check_keys("split", split, ("test_fraction",))
    fraction = split.get("test_fraction", 0.2)
    _require(isinstance(fraction, (int, float)) and 0 < fraction < 1, "split.test_fraction must be in (0, 1).")

    cv = data.get("cv", {})
    _check_keys("cv", cv, ("folds", "metric", "roc"))
    folds = cv.get("folds", 10)
    metric = cv.get("metric", "accuracy")
    _require(isinstance(folds, int) and folds >= 2, "cv.folds must be an integer ≥ 2.")
    _require(metric in CV_METRICS, f"cv.metric must be one of {', '.join(CV_METRICS)}.")

    sweep = None
    if data.get("sweep") is not None:
        raw = data["sweep"]
        _check_keys("sweep", raw, ("dimred", "models"))
        dimreds = raw.get("dimred") or []
        models = raw.get("models") or []
        _require(isinstance(dimreds, list) and dimreds, "sweep.dimred must be a non-empty list.")
        _require(isinstance(models, list) and models, "sweep.models must be a non-empty list.")
        sweep = SweepConfig(
            dimred=[_parse_dimred(d, f"sweep.dimred[{i}]") for i, d in enumerate(dimreds)],
            models=[_parse_model(m, f"sweep.models[{i}]") for i, m in enumerate(models)],
        )

    return ExperimentConfig(
        name=str(data.get("name", "experiment")),
        dataset=DatasetConfig(kind=dataset["kind"], path=dataset.get("path")),
        preprocessing=preprocessing,
        dimred=_parse_dimred(data.get("dimred", {}), "dimred"),
        model=_parse_model(data.get("model", {}), "model"),
        split=SplitConfig(test_fraction=float(fraction)),
        cv=CvConfig(folds=folds, metric=metric, roc=bool(cv.get("roc", True))),
        seed=_check_seed(data.get("seed", app_config.DEFAULT_SEED)),
        output_dir=data.get("output_dir"),
        sweep=sweep,
    )


def resolve_config_path(name_or_path: str, settings: Optional[AppConfig] = None) -> str:
    """A path that exists is used as is; otherwise the name is looked up in the presets directory."""
    if os.path.isfile(name_or_path):
        return name_or_path
    settings = settings or app_config
    candidate = os.path.join(settings.PRESETS_DIR, name_or_path)
    if not candidate.endswith(PRESET_SUFFIX):
        candidate += PRESET_SUFFIX
    if os.path.isfile(candidate):
        return candidate
    raise ConfigValidationError(f"Config '{name_or_path}' is neither a file nor a preset in {settings.PRESETS_DIR}.")


def list_presets(settings: Optional[AppConfig] = None) -> List[str]:
    settings = settings or app_config
    if not os.path.isdir(settings.PRESETS_DIR):
        return []
    return sorted(f[: -len(PRESET_SUFFIX)] for f in os.listdir(settings.PRESETS_DIR) if f.endswith(PRESET_SUFFIX))


def load_config(name_or_path: str, settings: Optional[AppConfig] = None) -> ExperimentConfig:
    path = resolve_config_path(name_or_path, settings)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"Config {path} is not valid JSON: {e}") from e
    logger.info(f"Loaded experiment config from {path}")
    return parse_config(data)
