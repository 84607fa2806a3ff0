import copy
import json
import os

import pytest

from src.cli import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, main


def _write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_presets_lists_bundled_configs(test_app_config, capsys):
    assert main(["--log-level", "WARNING", "presets"], test_app_config) == EXIT_OK
    out = capsys.readouterr().out.split()
    assert "korean-table1" in out and "polish-table3" in out


def test_run_succeeds_and_prints_report(korean_run_config, test_app_config, tmp_path, capsys):
    path = _write_config(tmp_path, korean_run_config)
    out_dir = str(tmp_path / "cli-run")
    code = main(["--log-level", "WARNING", "run", "--config", path, "--seed", "7", "--out", out_dir],
                test_app_config)
    assert code == EXIT_OK
    printed = capsys.readouterr().out
    assert "Run 'korean-test' (lda + logistic, seed 7)" in printed
    assert f"Outputs: {out_dir}" in printed
    with open(os.path.join(out_dir, "metrics.json"), "r", encoding="utf-8") as f:
        assert json.load(f)["seed"] == 7


def test_run_data_flag_overrides_dataset_path(korean_run_config, korean_csv, test_app_config, tmp_path):
    data = copy.deepcopy(korean_run_config)
    data["dataset"]["path"] = None
    path = _write_config(tmp_path, data)
    assert main(["--log-level", "WARNING", "run", "--config", path, "--data", korean_csv,
                 "--out", str(tmp_path / "with-data")], test_app_config) == EXIT_OK


def test_invalid_config_exits_with_validation_code(korean_run_config, test_app_config, tmp_path, capsys):
    korean_run_config["unexpected"] = True
    path = _write_config(tmp_path, korean_run_config)
    assert main(["--log-level", "WARNING", "run", "--config", path], test_app_config) == EXIT_VALIDATION
    assert "Invalid config" in capsys.readouterr().err


def test_missing_config_file_exits_with_validation_code(test_app_config, tmp_path):
    code = main(["--log-level", "WARNING", "run", "--config", str(tmp_path / "absent.json")], test_app_config)
    assert code == EXIT_VALIDATION


def test_malformed_json_exits_with_validation_code(test_app_config, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert main(["--log-level", "WARNING", "run", "--config", str(path)], test_app_config) == EXIT_VALIDATION


def test_stage_failure_exits_with_runtime_code(korean_run_config, test_app_config, tmp_path, capsys):
    korean_run_config["dimred"] = {"method": "pca", "n_components": 10}
    path = _write_config(tmp_path, korean_run_config)
    assert main(["--log-level", "WARNING", "run", "--config", path], test_app_config) == EXIT_RUNTIME
    assert "Stage 'dimred' failed" in capsys.readouterr().err


@pytest.mark.parametrize("seed", ["-1", "18446744073709551616", "abc"])
def test_bad_seed_is_a_usage_error(korean_run_config, test_app_config, tmp_path, seed):
    path = _write_config(tmp_path, korean_run_config)
    with pytest.raises(SystemExit) as exc:
        main(["run", "--config", path, "--seed", seed], test_app_config)
    assert exc.value.code == EXIT_VALIDATION


def test_missing_arguments_are_usage_errors(test_app_config):
    with pytest.raises(SystemExit) as exc:
        main(["run"], test_app_config)
    assert exc.value.code == EXIT_VALIDATION
    with pytest.raises(SystemExit) as exc:
        main([], test_app_config)
    assert exc.value.code == EXIT_VALIDATION


def test_sweep_requires_sweep_section(korean_run_config, test_app_config, tmp_path):
    path = _write_config(tmp_path, korean_run_config)
    assert main(["--log-level", "WARNING", "sweep", "--config", path], test_app_config) == EXIT_VALIDATION


def test_sweep_prints_summary(korean_run_config, test_app_config, tmp_path, capsys):
    korean_run_config["sweep"] = {"dimred": [{"method": "lda", "n_components": 1}],
                                  "models": [{"kind": "logistic"}, {"kind": "tree", "params": {"max_depth": 2}}]}
    path = _write_config(tmp_path, korean_run_config)
    out_dir = str(tmp_path / "cli-sweep")
    code = main(["--log-level", "WARNING", "sweep", "--config", path, "--out", out_dir, "--serial"],
                test_app_config)
    assert code == EXIT_OK
    printed = capsys.readouterr().out
    assert "lda" in printed and "tree" in printed
    assert os.path.isfile(os.path.join(out_dir, "summary.csv"))
