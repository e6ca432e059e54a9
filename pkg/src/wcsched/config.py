"""
Configuration for wcsched.

Uses typed dataclasses for configuration with YAML loading support.
Environment variables (prefix WCSCHED_) override file values.
"""
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Literal

import yaml
from pydantic_settings import BaseSettings, SettingsConfigDict

from wcsched.errors import InvalidHorizonError


@dataclass
class AlgebraConfig:
    """Limits for the exact integer algebra."""
    horizon_max: int = 512
    lazy_beta_threshold: int = 12  # above this, set functions are evaluated on demand
    vertex_enumeration_max: int = 8


@dataclass
class OracleConfig:
    """Scale limits of the brute-force oracle."""
    max_flows: int = 3
    max_capacity: int = 4
    max_horizon: int = 4


@dataclass
class PolicyConfig:
    """Default schedule selection."""
    policy: str = "max_slack"
    mu_rule: Literal["work_conserving", "baseline", "fixed"] = "work_conserving"


@dataclass
class SimulationConfig:
    """Configuration for the slot engine."""
    seed: int = 0
    log_level: str = "INFO"
    assert_every_slot: bool = True
    workers: int = 4


class EnvSettings(BaseSettings):
    """Environment overrides."""
    model_config = SettingsConfigDict(env_prefix="WCSCHED_", extra="ignore")

    horizon_max: int | None = None
    log_level: str | None = None


@dataclass
class Config:
    """Main configuration container."""
    algebra: AlgebraConfig = field(default_factory=AlgebraConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "Config":
        """Load configuration from YAML file."""
        with open(path) as f:
            data = yaml.safe_load(f) or {}

        return cls(
            algebra=AlgebraConfig(**data.get("algebra", {})),
            oracle=OracleConfig(**data.get("oracle", {})),
            policy=PolicyConfig(**data.get("policy", {})),
            simulation=SimulationConfig(**data.get("simulation", {})),
        )

    def to_yaml(self, path: str | Path) -> None:
        """Save configuration to YAML file."""
        data = {
            "algebra": asdict(self.algebra),
            "oracle": asdict(self.oracle),
            "policy": asdict(self.policy),
            "simulation": asdict(self.simulation),
        }

        with open(path, "w") as f:
            yaml.dump(data, f, default_flow_style=False, sort_keys=False)

    def apply_env(self, settings: EnvSettings | None = None) -> "Config":
        """Apply WCSCHED_* environment overrides in place."""
        settings = settings or EnvSettings()
        if settings.horizon_max is not None:
            self.algebra.horizon_max = settings.horizon_max
        if settings.log_level is not None:
            self.simulation.log_level = settings.log_level
        return self

    def check_horizon(self, horizon: int) -> int:
        """Validate a horizon against 1..horizon_max."""
        if horizon < 1 or horizon > self.algebra.horizon_max:
            raise InvalidHorizonError(
                f"horizon {horizon} outside 1..{self.algebra.horizon_max}"
            )
        return horizon


def load_config(path: str | Path | None = None) -> Config:
    """Load configuration from file or return defaults, then apply env overrides."""
    if path and Path(path).exists():
        config = Config.from_yaml(path)
    else:
        config = Config()
    return config.apply_env()
