"""Experiment configuration: YAML schema version 1.

Top-level keys:

    schema_version: 1
    name: desk_vilar
    model: vilar_oscillator          # builtin model name
    observable: C                    # optional; model default when omitted
    observed:
      n_trajectories: 30
      n_grid_points: 200
      t_end: 60.0
      theta_true: null               # null -> model reference parameters
      seed: null                     # null -> derived from the experiment seed
    pool_sizes: [10]
    methods: [mab_eps_first, static_single, static_l2_topk, static_random_k]
    repetitions: 3
    seed: 42
    settings:                        # defaults applied to every method
      epsilon: 0.5
      n_accept: 20
      tau: 0.05
      max_simulations: 3000
      calibration_size: 50
      k: 3
      record_all: true
    method_settings:                 # optional per-method overrides
      static_random_k: {max_simulations: 1000}
    output_dir: null                 # null -> name

Static baselines take their statistic subsets from the epsilon-first run
of the same (pool size, repetition) cell, so static_single and
static_l2_topk require mab_eps_first to be listed as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from ..errors import ConfigError
from ..simulation import builtin_model, reference_parameters

SCHEMA_VERSION = 1

METHODS = (
    "mab_eps_first",
    "mab_eps_greedy",
    "uniform_random",
    "static_single",
    "static_l2_topk",
    "static_random_k",
)

_RANKED_METHODS = ("static_single", "static_l2_topk")


@dataclass(frozen=True)
class ObservedSpec:
    n_trajectories: int
    n_grid_points: int
    t_end: float
    theta_true: tuple = None  # None -> reference parameters of the model
    seed: int = None          # None -> derived from the experiment seed

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise ConfigError("observed.n_trajectories must be at least 1")
        if self.n_grid_points < 2:
            raise ConfigError("observed.n_grid_points must be at least 2")
        if not self.t_end > 0:
            raise ConfigError("observed.t_end must be positive")
        if self.theta_true is not None:
            object.__setattr__(self, "theta_true", tuple(float(v) for v in self.theta_true))


@dataclass(frozen=True)
class MethodSettings:
    epsilon: float = 0.5
    n_accept: int = 20
    tau: float = 0.05
    max_simulations: int = 3000
    calibration_size: int = 50
    k: int = 3
    record_all: bool = True

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon must lie in [0, 1]")
        if self.n_accept < 1 or self.max_simulations < self.n_accept:
            raise ConfigError("need 1 <= n_accept <= max_simulations")
        if not self.tau > 0:
            raise ConfigError("tau must be positive")
        if self.calibration_size < 2:
            raise ConfigError("calibration_size must be at least 2")
        if self.k < 1:
            raise ConfigError("k must be at least 1")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    model: str
    observed: ObservedSpec
    pool_sizes: tuple
    methods: tuple
    repetitions: int
    seed: int
    settings: MethodSettings = field(default_factory=MethodSettings)
    method_settings: dict = field(default_factory=dict)
    observable: str = None
    output_dir: str = None

    def __post_init__(self):
        object.__setattr__(self, "pool_sizes", tuple(int(k) for k in self.pool_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.name:
            raise ConfigError("experiment needs a name")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not self.pool_sizes:
            raise ConfigError("pool_sizes must not be empty")
        if len(set(self.methods)) != len(self.methods) or not self.methods:
            raise ConfigError("methods must be a non-empty list without repeats")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; known: {', '.join(METHODS)}")
        if any(m in self.methods for m in _RANKED_METHODS) and "mab_eps_first" not in self.methods:
            raise ConfigError(
                "static_single/static_l2_topk rank statistics from the mab_eps_first "
                "run, so mab_eps_first must be listed too"
            )
        for m in self.method_settings:
            if m not in METHODS:
                raise ConfigError(f"method_settings for unknown method {m!r}")
        # resolving the model validates its name and the observable binding
        network = builtin_model(self.model, self.observable)
        truth = self.theta_true()
        if len(truth) != network.n_parameters:
            raise ConfigError(
                f"theta_true has {len(truth)} entries, model {self.model!r} "
                f"expects {network.n_parameters}"
            )

    def theta_true(self) -> np.ndarray:
        if self.observed.theta_true is not None:
            return np.asarray(self.observed.theta_true, dtype=np.float64)
        return reference_parameters(self.model)

    def settings_for(self, method: str) -> MethodSettings:
        overrides = self.method_settings.get(method)
        return replace(self.settings, **overrides) if overrides else self.settings

    def experiment_dir_name(self) -> str:
        return self.output_dir or self.name


def _require(data: dict, key: str):
    if key not in data:
        raise ConfigError(f"config is missing required key {key!r}")
    return data[key]


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    version = _require(data, "schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    obs_raw = dict(_require(data, "observed"))
    observed = ObservedSpec(
        n_trajectories=int(_require(obs_raw, "n_trajectories")),
        n_grid_points=int(_require(obs_raw, "n_grid_points")),
        t_end=float(_require(obs_raw, "t_end")),
        theta_true=obs_raw.get("theta_true"),
        seed=obs_raw.get("seed"),
    )
    settings = MethodSettings(**(data.get("settings") or {}))
    return ExperimentConfig(
        name=str(_require(data, "name")),
        model=str(_require(data, "model")),
        observed=observed,
        pool_sizes=_require(data, "pool_sizes"),
        methods=_require(data, "methods"),
        repetitions=int(_require(data, "repetitions")),
        seed=int(_require(data, "seed")),
        settings=settings,
        method_settings=data.get("method_settings") or {},
        observable=data.get("observable"),
        output_dir=data.get("output_dir"),
    )


def load_config(path, seed_override: int = None) -> ExperimentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if seed_override is not None:
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        data["seed"] = int(seed_override)
    try:
        return config_from_dict(data)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
