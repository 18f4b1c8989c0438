"""Run configuration: a single JSON file, overridable from the command line."""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field

from .cn_oracle import Grid1D
from .errors import ConfigError, DecayError
from .shell_model import ShellModel, make_model


@dataclass(frozen=True)
class ModelConfig:
    # field name "lambda" in the file; Python keyword, hence the underscore
    lambda_: float = 6.0
    R: float = 1.0


@dataclass(frozen=True)
class InitialStateConfig:
    mode: int = 1


@dataclass(frozen=True)
class TimeGridConfig:
    t_min: float = 1e-2
    t_max: float = 1e4
    points_per_decade: int = 16


@dataclass(frozen=True)
class OracleConfig:
    L: float = 30.0
    h: float = 2e-3
    dt: float = 1e-3
    cap_width: float = 20.0
    cap_strength: float = 60.0
    lifetimes: float = 5.0
    samples: int = 26


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str = "-"
    precision: int = 17


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    initial_state: InitialStateConfig = field(default_factory=InitialStateConfig)
    truncation_N: int = 50
    diagnostic_N: tuple = (5, 10, 20, 50)
    tail_closure: bool = True
    time_grid: TimeGridConfig = field(default_factory=TimeGridConfig)
    probes: tuple = ((0.3, 0.7), (0.2, 0.5), (0.6, 0.9))
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def shell_model(self) -> ShellModel:
        return make_model(self.model.lambda_, self.model.R)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = {"lambda": self.model.lambda_, "R": self.model.R}
        d["diagnostic_N"] = list(self.diagnostic_N)
        d["probes"] = [list(p) for p in self.probes]
        return d

    def to_json(self) -> str:
        return json.dumps(self.echo_dict(), sort_keys=True, separators=(",", ":"))

    def echo_dict(self) -> dict:
        """The configuration as echoed in artifacts: everything except the
        output path, so that the same run written to two places is identical."""
        d = self.to_dict()
        del d["output"]["path"]
        return d


_SECTIONS = {
    "initial_state": InitialStateConfig,
    "time_grid": TimeGridConfig,
    "oracle": OracleConfig,
    "output": OutputConfig,
}


def _section(cls, raw, name):
    if not isinstance(raw, dict):
        raise ConfigError(f"'{name}' must be an object")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in raw.items():
        kind = type(getattr(cls(), key))
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if kind is int and isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, kind) or isinstance(value, bool) != (kind is bool):
            raise ConfigError(f"'{name}.{key}' must be {kind.__name__}, got {value!r}")
        kwargs[key] = value
    return cls(**kwargs)


def config_from_dict(raw: dict) -> RunConfig:
    """Build and validate a RunConfig; unknown keys are errors."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    allowed = set(RunConfig.__dataclass_fields__)
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    kwargs = {}
    if "model" in raw:
        m = raw["model"]
        if not isinstance(m, dict) or set(m) - {"lambda", "R"}:
            raise ConfigError("'model' accepts only 'lambda' and 'R'")
        try:
            kwargs["model"] = ModelConfig(float(m.get("lambda", 6.0)), float(m.get("R", 1.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad model parameters: {exc}") from None
    for name, cls in _SECTIONS.items():
        if name in raw:
            kwargs[name] = _section(cls, raw[name], name)
    if "truncation_N" in raw:
        kwargs["truncation_N"] = raw["truncation_N"]
    if "tail_closure" in raw:
        kwargs["tail_closure"] = raw["tail_closure"]
    if "diagnostic_N" in raw:
        kwargs["diagnostic_N"] = tuple(raw["diagnostic_N"])
    if "probes" in raw:
        try:
            kwargs["probes"] = tuple((float(a), float(b)) for a, b in raw["probes"])
        except (TypeError, ValueError):
            raise ConfigError("'probes' must be a list of [r, rp] pairs") from None
    cfg = RunConfig(**kwargs)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    try:
        model = cfg.shell_model()
    except DecayError as exc:
        raise ConfigError(str(exc)) from None
    R = model.R
    if not isinstance(cfg.truncation_N, int) or isinstance(cfg.truncation_N, bool) or cfg.truncation_N < 1:
        raise ConfigError("'truncation_N' must be a positive integer")
    if not isinstance(cfg.tail_closure, bool):
        raise ConfigError("'tail_closure' must be true or false")
    if not cfg.diagnostic_N or any(not isinstance(n, int) or n < 1 or n > cfg.truncation_N
                                   for n in cfg.diagnostic_N):
        raise ConfigError("'diagnostic_N' entries must be integers in 1..truncation_N")
    if cfg.initial_state.mode < 1:
        raise ConfigError("'initial_state.mode' must be >= 1")
    g = cfg.time_grid
    if not 0 < g.t_min < g.t_max or g.points_per_decade < 1:
        raise ConfigError("time grid needs 0 < t_min < t_max and points_per_decade >= 1")
    if not cfg.probes:
        raise ConfigError("at least one probe is required")
    for r, rp in cfg.probes:
        if not (0 < r < R and 0 < rp < R):
            raise ConfigError(f"probe ({r}, {rp}) must lie inside (0, R)")
    o = cfg.oracle
    if o.h <= 0 or o.dt <= 0 or o.L <= 0 or o.samples < 2 or o.lifetimes <= 0:
        raise ConfigError("oracle grid parameters must be positive")
    try:
        Grid1D(o.L, o.h, o.dt, o.cap_width, o.cap_strength).validate(model)
    except DecayError as exc:
        raise ConfigError(f"oracle grid: {exc}") from None
    if cfg.output.format not in ("csv", "json"):
        raise ConfigError("'output.format' must be 'csv' or 'json'")
    if not 1 <= cfg.output.precision <= 17:
        raise ConfigError("'output.precision' must be between 1 and 17")


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return config_from_dict(raw)


def with_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Apply dotted-path overrides such as {"model.lambda": 8.0}."""
    raw = copy.deepcopy(cfg.to_dict())
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = raw
        *parents, leaf = dotted.split(".")
        for p in parents:
            node = node[p]
        node[leaf] = value
    return config_from_dict(raw)
