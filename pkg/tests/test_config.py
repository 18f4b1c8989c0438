import json

import pytest

from gamow_decay.config import RunConfig, config_from_dict, load_config, with_overrides
from gamow_decay.errors import ConfigError


def test_defaults_round_trip():
    cfg = RunConfig()
    assert config_from_dict(cfg.to_dict()) == cfg
    assert cfg.model.lambda_ == 6.0 and cfg.truncation_N == 50
    assert cfg.time_grid.points_per_decade == 16


def test_echo_excludes_destination():
    cfg = with_overrides(RunConfig(), {"output.path": "/tmp/x.csv"})
    assert "path" not in cfg.echo_dict()["output"]
    assert json.loads(cfg.to_json()) == cfg.echo_dict()


@pytest.mark.parametrize("raw", [
    {"bogus": 1},
    {"model": {"lambda": 6.0, "mass": 1.0}},
    {"oracle": {"cap": 3.0}},
    {"output": {"format": "xml"}},
    {"model": {"lambda": -1.0}},
    {"model": {"R": 0.0}},
    {"truncation_N": 0},
    {"truncation_N": 2.5},
    {"initial_state": {"mode": 0}},
    {"time_grid": {"t_min": 10.0, "t_max": 1.0}},
    {"probes": [[0.3, 1.2]]},
    {"probes": []},
    {"oracle": {"h": 0.003}},
    {"oracle": {"dt": 0.01}},
    {"diagnostic_N": [5, 80]},
    {"tail_closure": "yes"},
    {"output": {"precision": 30}},
    ["not", "an", "object"],
])
def test_rejects_bad_configs(raw):
    with pytest.raises(ConfigError):
        config_from_dict(raw)


def test_integer_promoted_to_float():
    cfg = config_from_dict({"model": {"lambda": 8, "R": 1}, "oracle": {"L": 40}})
    assert cfg.model.lambda_ == 8.0 and isinstance(cfg.oracle.L, float)


def test_load_config_file(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"model": {"lambda": 7.5}, "truncation_N": 20,
                             "diagnostic_N": [5, 10, 20]}), encoding="utf-8")
    cfg = load_config(str(p))
    assert cfg.model.lambda_ == 7.5 and cfg.truncation_N == 20


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    assert load_config(None) == RunConfig()


def test_overrides():
    cfg = with_overrides(RunConfig(), {"model.lambda": 9.0, "truncation_N": None})
    assert cfg.model.lambda_ == 9.0 and cfg.truncation_N == 50
    with pytest.raises(ConfigError):
        with_overrides(RunConfig(), {"model.lambda": -2.0})
