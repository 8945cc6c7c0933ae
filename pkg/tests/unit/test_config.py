"""
Unit tests for configuration selection.
"""

import pytest

from levyclt.config import DevConfig, ProdConfig, TestConfig, _float_list, config_by_name, get_config


class TestConfiguration:
    """Tests for the Config classes and get_config."""

    def test_default_is_development(self, monkeypatch):
        """No LEVYCLT_ENV selects the development config."""
        monkeypatch.delenv("LEVYCLT_ENV", raising=False)
        assert isinstance(get_config(), DevConfig)

    def test_testing_environment(self, monkeypatch):
        """LEVYCLT_ENV=testing selects small Monte Carlo defaults."""
        monkeypatch.setenv("LEVYCLT_ENV", "testing")
        config = get_config()
        assert isinstance(config, TestConfig)
        assert config.N_PATHS == 200
        assert config.SEED == 12345

    def test_unknown_environment_falls_back(self, monkeypatch):
        """Unknown names fall back to development."""
        monkeypatch.setenv("LEVYCLT_ENV", "staging")
        assert isinstance(get_config(), DevConfig)

    def test_aliases(self):
        """Short and long names map to the same classes."""
        assert config_by_name["prod"] is config_by_name["production"] is ProdConfig
        assert config_by_name["test"] is TestConfig

    def test_production_is_validated(self, monkeypatch):
        """Production refuses too few paths."""
        monkeypatch.setenv("LEVYCLT_ENV", "production")
        monkeypatch.setattr(ProdConfig, "N_PATHS", 10)
        with pytest.raises(ValueError, match="N_PATHS"):
            get_config()

    def test_production_defaults_pass(self, monkeypatch):
        """Default production settings are valid."""
        monkeypatch.setenv("LEVYCLT_ENV", "prod")
        monkeypatch.setattr(ProdConfig, "N_PATHS", 2000)
        assert isinstance(get_config(), ProdConfig)

    def test_schedule_parsing(self):
        """Comma separated floats, blanks ignored."""
        assert _float_list("0.2, 0.1,,0.05") == [0.2, 0.1, 0.05]

    @pytest.mark.parametrize("bins", [4, 21])
    def test_production_bins_per_h_range(self, monkeypatch, bins):
        """Production keeps 5 to 20 bins per smallest h."""
        monkeypatch.setenv("LEVYCLT_ENV", "production")
        monkeypatch.setattr(ProdConfig, "N_PATHS", 2000)
        monkeypatch.setattr(ProdConfig, "BINS_PER_H", bins)
        with pytest.raises(ValueError, match="BINS_PER_H"):
            get_config()
