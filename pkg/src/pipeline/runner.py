# src/pipeline/runner.py
# Single experiment run: load → split → preprocess → project → select → fit → evaluate → write.

import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional


from src import __version__
from src.config import AppConfig, config as app_config
from src.data.dataset import LOADERS, Dataset
from src.data.preprocessing import impute_apply, impute_fit, scale_apply, scale_fit
from src.data.sampling import smote, stratified_split, stratified_subsample
from src.dimred import PcaModel, fit_projection, variance_profile
from src.errors import StageError
from src.evaluation.metrics import binary_metrics, confusion, roc_auc
from src.evaluation.selection import cross_val_roc, grid_search
from src.models.base import fit_model, resolve_params
from src.models.serialization import model_to_document
from src.models.tree import tree_export_dot, tree_feature_importances
from src.numerics import RngStream
from src.pipeline import reports
from src.pipeline.experiment_config import ExperimentConfig
from src.utils.atomic_io import staged_directory, write_json_atomic
from src.utils.logging_config import get_logger
from src.utils.serialization import document

logger = get_logger(__name__)

STAGES = ("load", "split", "preprocess", "dimred", "model_selection", "fit", "evaluate", "write")


@dataclass
class RunReport:
    name: str
    config: Dict[str, Any]
    dimred: str
    model: str
    seed: int
    version: str
    chosen_params: Dict[str, Any]
    train_metrics: Dict[str, float]
    test_metrics: Dict[str, float]
    confusion: Dict[str, int]
    confusion_normalized: Dict[str, float]
    cv: Optional[Dict[str, Any]] = None
    cv_auc_mean: Optional[float] = None
    cv_auc_std: Optional[float] = None
    n_train: int = 0
    n_test: int = 0
    n_components: Optional[int] = None
    explained_variance: Optional[List[float]] = None
    feature_importances: Optional[Dict[str, float]] = None
    deviations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    output_dir: Optional[str] = None
    timing: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.__dict__.items()}


def cell_stream(config: ExperimentConfig) -> RngStream:
    return RngStream(config.seed, f"cell/{config.cell_label}")


def split_stream(config: ExperimentConfig) -> RngStream:
    return RngStream(config.seed, "split")


class _StageRunner:
    """Wraps each stage so failures carry the stage name and the config echo."""

    def __init__(self, config: ExperimentConfig):
        self.echo = config.to_dict()

    def __call__(self, stage: str, fn, *args, **kwargs):
        logger.debug(f"Stage '{stage}' starting")
        try:
            return fn(*args, **kwargs)
        except StageError:
            raise
        except Exception as e:
            logger.error(f"Stage '{stage}' failed: {e}", exc_info=True)
            raise StageError(stage, e, self.echo) from e


def _preprocess(config: ExperimentConfig, train: Dataset, test: Dataset, stream: RngStream):
    transforms: Dict[str, Any] = {}
    pre = config.preprocessing
    if pre.impute:
        params = impute_fit(train)
        train, test = impute_apply(params, train), impute_apply(params, test)
        transforms["imputer"] = params
    if pre.scaler is not None:
        params = scale_fit(train, pre.scaler.kind, pre.scaler.range)
        train, test = scale_apply(params, train), scale_apply(params, test)
        transforms["scaler"] = params
    if pre.smote is not None:
        train = smote(train, pre.smote.k_neighbors, pre.smote.target_ratio, stream.substream("smote"))
    return train, test, transforms


def _deviations(config: ExperimentConfig, n_fit: int, n_train: int) -> List[str]:
    notes = []
    pre = config.preprocessing
    fitted = [name for name, on in (("imputer", pre.impute), ("scaler", pre.scaler is not None)) if on]
    if fitted:
        notes.append(f"{' and '.join(fitted).capitalize()} fitted on the training partition only and replayed "
                     f"on the test partition rather than fitted on the full dataset.")
    if pre.smote is not None:
        notes.append("SMOTE applied to the training partition after the split, before dimensionality reduction.")
    if config.dimred.method == "lda" and (config.dimred.n_components or 1) > 1:
        notes.append("LDA on binary labels yields a single discriminant axis; extra requested axes are not invented.")
    if n_fit < n_train:
        notes.append(f"{config.model.kind} trained on a stratified subsample of {n_fit} of {n_train} "
                     f"training rows (train_subsample).")
    return notes


def run_experiment(config: ExperimentConfig, settings: Optional[AppConfig] = None) -> RunReport:
    """
    Executes one configured run and writes its artifacts.

    Outputs are staged in `<out>.partial` and moved into place only when every
    stage succeeds. Any failure raises StageError naming the stage.
    """
    settings = settings or app_config
    config = config.with_overrides()
    config.validate(settings)
    out_dir = config.output_dir or os.path.join(settings.OUTPUT_DIR, config.name)
    started = time.perf_counter()
    started_at = datetime.now(timezone.utc).isoformat()
    stage = _StageRunner(config)
    cell = cell_stream(config)
    logger.info(f"Run '{config.name}': {config.dataset.kind} data, {config.dimred.method} + {config.model.kind}, "
                f"seed {config.seed}, output {out_dir}")

    with staged_directory(out_dir) as work_dir:
        dataset = stage("load", LOADERS[config.dataset.kind], config.dataset.path)
        train, test = stage("split", stratified_split, dataset, config.split.test_fraction, split_stream(config))
        train, test, transforms = stage("preprocess", _preprocess, config, train, test, cell)

        projection = stage("dimred", fit_projection, config.dimred.method, train.features, train.labels,
                           config.dimred.n_components, config.dimred.params)
        x_train = stage("dimred", projection.transform, train.features)
        x_test = stage("dimred", projection.transform, test.features)
        y_train, y_test = train.labels, test.labels

        fit_set = Dataset(x_train, y_train, tuple(f"c{i + 1}" for i in range(x_train.shape[1])))
        if config.model.train_subsample is not None:
            fit_set = stage("fit", stratified_subsample, fit_set, config.model.train_subsample,
                            cell.substream("subsample"))
        x_fit, y_fit = fit_set.features, fit_set.labels

        chosen = resolve_params(config.model.kind, config.model.params)
        search = None
        if config.model.grid:
            search = stage("model_selection", grid_search, config.model.kind, config.model.grid, x_fit, y_fit,
                           config.cv.folds, config.cv.metric, cell.substream("cv"), config.model.params)
            chosen = resolve_params(config.model.kind, search.best_params)

        model = stage("fit", fit_model, config.model.kind, x_fit, y_fit, chosen, cell.substream("model"))

        def evaluate():
            test_cm = confusion(y_test, model.predict(x_test))
            test_metrics = binary_metrics(test_cm)
            test_roc = roc_auc(model.score(x_test), y_test)
            test_metrics["auc"] = test_roc.auc
            train_metrics = binary_metrics(confusion(y_fit, model.predict(x_fit)))
            train_metrics["auc"] = roc_auc(model.score(x_fit), y_fit).auc
            cv_roc = None
            if config.cv.roc:
                cv_roc = cross_val_roc(config.model.kind, chosen, x_fit, y_fit, config.cv.folds,
                                       cell.substream("cv_roc"))
            return test_cm, test_metrics, test_roc, train_metrics, cv_roc

        test_cm, test_metrics, test_roc, train_metrics, cv_roc = stage("evaluate", evaluate)

        warnings = list(getattr(projection, "warnings", ()) or ()) + list(model.warnings)
        if search is not None:
            warnings += [f"grid point {r.params} failed: {r.error}" for r in search.results if r.failed]
        report = RunReport(
            name=config.name,
            config=config.to_dict(),
            dimred=config.dimred.method,
            model=config.model.kind,
            seed=config.seed,
            version=__version__,
            chosen_params=chosen,
            train_metrics=train_metrics,
            test_metrics=test_metrics,
            confusion=test_cm.as_dict(),
            confusion_normalized=test_cm.normalized(),
            cv=None if search is None else {
                "metric": search.metric,
                "folds": config.cv.folds,
                "best_mean": search.best.mean,
                "best_std": search.best.std,
                "grid": [r.as_row() for r in search.results],
            },
            cv_auc_mean=None if cv_roc is None else cv_roc.mean_auc,
            cv_auc_std=None if cv_roc is None else cv_roc.std_auc,
            n_train=int(x_train.shape[0]),
            n_test=int(x_test.shape[0]),
            n_components=None if config.dimred.method == "none" else int(x_train.shape[1]),
            explained_variance=(variance_profile(projection)["cumulative"][: projection.n_components]
                                if isinstance(projection, PcaModel) else None),
            feature_importances=(dict(zip(fit_set.feature_names if config.dimred.method != "none"
                                          else dataset.feature_names,
                                          tree_feature_importances(model.payload).tolist()))
                                 if config.model.kind == "tree" else None),
            deviations=_deviations(config, int(x_fit.shape[0]), int(x_train.shape[0])),
            warnings=warnings,
            output_dir=out_dir,
        )

        def write():
            paths = reports.output_paths(work_dir)
            reports.write_confusion_csv(test_cm, paths["confusion.csv"])
            reports.write_roc_csv(test_roc, paths["roc.csv"])
            if search is not None:
                reports.write_cv_curve_csv(search, paths["cv_curve.csv"])
            if cv_roc is not None:
                reports.write_cv_roc_csv(cv_roc, paths["cv_roc.csv"])
            if config.dimred.method != "none":
                reports.write_embedding_csv(x_train, y_train, x_test, y_test, paths["embedding.csv"])
            if isinstance(projection, PcaModel):
                reports.write_explained_variance_csv(variance_profile(projection), paths["explained_variance.csv"])
            if config.model.kind == "tree":
                names = dataset.feature_names if config.dimred.method == "none" else fit_set.feature_names
                with open(paths["tree.dot"], "w", encoding="utf-8") as f:
                    f.write(tree_export_dot(model.payload, names))
            write_json_atomic(paths["model.json"], model_to_document(model))
            write_json_atomic(paths["transforms.json"], {
                name: document(name, params) for name, params in
                list(transforms.items()) + [("projection", projection)]
            })
            report.timing = {
                "started_at": started_at,
                "wall_clock_seconds": round(time.perf_counter() - started, 6),
            }
            write_json_atomic(paths["metrics.json"], report.to_dict())

        stage("write", write)

    logger.info(f"Run '{config.name}' finished: accuracy={reports.sig(test_metrics['accuracy'])}, "
                f"auc={reports.sig(test_metrics['auc'])} → {out_dir}")
    return report
