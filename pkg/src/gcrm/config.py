"""
Configuration management for gcrm.

Supports loading configuration from:
1. config.yaml (default)
2. config.local.yaml (local overrides)
3. Environment variables GCRM_<SECTION>_<KEY> (highest priority)
"""

import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import yaml

logger = logging.getLogger(__name__)


@dataclass
class NumericsConfig:
    """Truncation and guard constants used by the library modules."""
    stick_breaking_eps: float = 1e-10
    max_moment_order: int = 64
    max_laplace_trunc: int = 200
    bessel_max_argument: float = 700.0
    max_poisson_mean: float = 1e7
    quadrature_nodes: int = 60
    density_panels: int = 8
    density_panel_nodes: int = 48


@dataclass
class GateConfig:
    """Acceptance gates for Monte Carlo comparisons."""
    z_threshold: float = 5.0
    widened_z_threshold: float = 6.0
    widen_after: int = 50


@dataclass
class ExperimentDefaults:
    """Defaults for the experiment runner."""
    default_seed: int = 20240521
    default_samples: int = 100000
    stieltjes_samples: int = 100000
    tolerances: dict = field(default_factory=lambda: {
        "orthogonality": 1e-8,
        "genfun": 1e-8,
        "merge": 1e-10,
        "density": 1e-6,
        "laplace": 1e-8,
    })


class Config:
    """Configuration manager for numerical defaults."""

    ENV_PREFIX = "GCRM"

    def __init__(self, config_path: Optional[str] = None):
        self._config: dict = {}

        if config_path:
            self._config_path = Path(config_path)
        else:
            self._config_path = Path(__file__).parent / "config.yaml"

        self._load_config()

    def _load_config(self):
        """Load configuration from YAML files and environment variables."""
        if self._config_path.exists():
            with open(self._config_path, "r", encoding="utf-8") as f:
                self._config = yaml.safe_load(f) or {}

        local_config_path = self._config_path.parent / "config.local.yaml"
        if local_config_path.exists():
            with open(local_config_path, "r", encoding="utf-8") as f:
                local_config = yaml.safe_load(f) or {}
                self._deep_merge(self._config, local_config)
            logger.debug("Merged local overrides from %s", local_config_path)

        self._numerics = self._parse_section("numerics", NumericsConfig)
        self._gates = self._parse_section("gates", GateConfig)
        self._experiments = self._parse_section("experiments", ExperimentDefaults)

    def _parse_section(self, name: str, cls):
        """Build a section dataclass, applying environment overrides per key."""
        section = dict(self._config.get(name, {}) or {})
        kwargs = {}
        for f in fields(cls):
            value = section.get(f.name)
            env_key = f"{self.ENV_PREFIX}_{name.upper()}_{f.name.upper()}"
            env_value = os.getenv(env_key)
            if env_value is not None and f.name != "tolerances":
                value = env_value
            if value is None:
                continue
            if f.name == "tolerances":
                defaults = ExperimentDefaults().tolerances
                defaults.update({k: float(v) for k, v in value.items()})
                value = defaults
            elif f.type in (int, "int"):
                value = int(float(value))
            elif f.type in (float, "float"):
                value = float(value)
            kwargs[f.name] = value
        return cls(**kwargs)

    def _deep_merge(self, base: dict, override: dict):
        """Deep merge override into base dict."""
        for key, value in override.items():
            if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                self._deep_merge(base[key], value)
            else:
                base[key] = value

    @property
    def numerics(self) -> NumericsConfig:
        return self._numerics

    @property
    def gates(self) -> GateConfig:
        return self._gates

    @property
    def experiments(self) -> ExperimentDefaults:
        return self._experiments

    def tolerance(self, experiment: str) -> float:
        """Analytic tolerance for an experiment family."""
        tolerances = self._experiments.tolerances
        if experiment not in tolerances:
            raise ValueError(f"No tolerance configured for {experiment!r}")
        return float(tolerances[experiment])


# Global config instance
_config: Optional[Config] = None


def get_config(config_path: Optional[str] = None) -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None or config_path is not None:
        _config = Config(config_path)
    return _config


def reload_config(config_path: Optional[str] = None) -> Config:
    """Reload configuration from disk and environment."""
    global _config
    _config = Config(config_path)
    return _config
