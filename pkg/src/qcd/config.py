#!/usr/bin/env python3
"""
Run configuration

Loads RunConfig from YAML (or an in-memory dict), fills missing values from the
defaults section and validates the invariants the numerical layers rely on.
"""

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from errors import ConfigError

DEFAULT_CONFIG_PATH = Path(__file__).parent / "qcd_config.yaml"

DEFAULT_TOLERANCES: Dict[str, float] = {
    "scalar": 1e-10,
    "membership": 1e-8,
    "pairing": 1e-8,
    "pinv_cutoff": 1e-10,
    "gap": 1e-6,
    "guard": 1e-2,
    "guard_radius": 0.25,
    "congruence": 1e-8,
    "decay": 0.25,
    "intertwine": 1e-8,
    "curvature_step": 1e-3,
}

DEFAULT_RUN: Dict[str, Any] = {
    "n": 64,
    "k": 8,
    "format": "json",
    "seed": 7,
    "workers": 4,
}

FORMATS = ("json", "csv")


@dataclass
class RunConfig:
    """Truncation, jet order, tolerances and output settings for one run."""
    n: int = DEFAULT_RUN["n"]
    k: int = DEFAULT_RUN["k"]
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    format: str = DEFAULT_RUN["format"]
    seed: int = DEFAULT_RUN["seed"]
    workers: int = DEFAULT_RUN["workers"]

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Return a validated copy with the non-None overrides applied."""
        values = {key: value for key, value in overrides.items() if value is not None}
        tolerances = dict(self.tolerances)
        tolerances.update(values.pop("tolerances", None) or {})
        updated = replace(self, tolerances=tolerances, **values)
        validate_run_config(updated)
        return updated


def validate_run_config(cfg: RunConfig) -> RunConfig:
    """Raise ConfigError unless cfg satisfies N >= 4K, positive tolerances and a known format."""
    if not isinstance(cfg.n, int) or not isinstance(cfg.k, int):
        raise ConfigError(f"n and k must be integers, got n={cfg.n!r}, k={cfg.k!r}")
    if cfg.k < 0:
        raise ConfigError(f"jet order k must be non-negative, got {cfg.k}")
    if cfg.n < 4 * max(cfg.k, 1):
        raise ConfigError(f"truncation n={cfg.n} is below the guard 4*k={4 * max(cfg.k, 1)}")
    if cfg.format not in FORMATS:
        raise ConfigError(f"unknown output format '{cfg.format}', expected one of {FORMATS}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be at least 1, got {cfg.workers}")
    unknown = set(cfg.tolerances) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")
    for name, value in cfg.tolerances.items():
        if not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError(f"tolerance '{name}' must be positive, got {value!r}")
    return cfg


def load_run_config_from_dict(data: Dict[str, Any]) -> RunConfig:
    """Build a RunConfig from a dict with a top-level 'run' section."""
    if not isinstance(data, dict) or "run" not in data:
        raise ConfigError("Invalid run configuration: missing 'run' section")

    run_section = dict(data["run"] or {})
    defaults = data.get("defaults") or {}

    # Section defaults first, then the built-in ones
    for key, value in DEFAULT_RUN.items():
        run_section.setdefault(key, defaults.get(key, value))

    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(defaults.get("tolerances") or {})
    tolerances.update(run_section.pop("tolerances", None) or {})

    unexpected = set(run_section) - set(DEFAULT_RUN)
    if unexpected:
        raise ConfigError(f"Invalid run configuration: unknown keys {sorted(unexpected)}")

    try:
        tolerances = {name: float(value) for name, value in tolerances.items()}
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid tolerance value: {e}") from e

    cfg = RunConfig(
        n=run_section["n"],
        k=run_section["k"],
        tolerances=tolerances,
        format=run_section["format"],
        seed=run_section["seed"],
        workers=run_section["workers"],
    )
    return validate_run_config(cfg)


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """Load and validate a RunConfig from a YAML file (the packaged default when path is None)."""
    config_path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not os.path.exists(config_path):
        raise ConfigError(f"Configuration file not found: {config_path}")

    try:
        with open(config_path, "r") as file:
            data = yaml.safe_load(file)
    except yaml.YAMLError as e:
        raise ConfigError(f"Could not parse {config_path}: {e}") from e

    return load_run_config_from_dict(data)
