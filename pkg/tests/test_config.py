"""Tests for configuration loading."""
import os
import tempfile

import pytest

from wcsched.config import Config, EnvSettings, load_config
from wcsched.errors import InvalidHorizonError


class TestConfig:
    """Tests for defaults, YAML files and environment overrides."""

    def test_defaults(self):
        config = Config()

        assert config.algebra.horizon_max == 512
        assert config.policy.policy == "max_slack"
        assert config.simulation.assert_every_slot

    def test_yaml_round_trip(self):
        config = Config()
        config.simulation.seed = 11
        config.oracle.max_flows = 2

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.yaml")
            config.to_yaml(path)
            loaded = Config.from_yaml(path)

        assert loaded == config

    def test_missing_file_gives_defaults(self):
        config = load_config("/nonexistent/config.yaml")

        assert config.algebra.lazy_beta_threshold == Config().algebra.lazy_beta_threshold

    def test_env_override(self):
        config = Config().apply_env(EnvSettings(horizon_max=64, log_level="DEBUG"))

        assert config.algebra.horizon_max == 64
        assert config.simulation.log_level == "DEBUG"

    def test_env_from_environment(self, monkeypatch):
        monkeypatch.setenv("WCSCHED_HORIZON_MAX", "32")

        config = load_config()

        assert config.algebra.horizon_max == 32

    def test_horizon_checked(self):
        config = Config()
        config.algebra.horizon_max = 10

        assert config.check_horizon(10) == 10
        with pytest.raises(InvalidHorizonError):
            config.check_horizon(11)
        with pytest.raises(InvalidHorizonError):
            config.check_horizon(0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
