"""
Unit tests for the command-line application.

Tests cover:
- Error payloads and exit codes
- Logging setup
- The analytic subcommands (constants, density, mean, simulate)
"""

import json
import logging
import math
import sys

import pytest

from levyclt.cli import ERROR_CODES, EXIT_DOMAIN_ERROR, error_payload, setup_logging
from levyclt.config import TestConfig
from levyclt.core.exponent import ExponentError
from levyclt.core.schemas import CltConfig, SettingsError


# =============================================================================
# Error Handling Tests
# =============================================================================

class TestErrorPayload:
    """Tests for error_payload."""

    def test_domain_error(self):
        """Registered errors map to their code and message."""
        payload = error_payload(ExponentError("bad spec"))
        assert payload == {"code": "EXPONENT_ERROR", "message": "bad spec", "details": None}

    def test_settings_error(self):
        """Settings files have their own code."""
        assert error_payload(SettingsError("not a mapping"))["code"] == "SETTINGS_ERROR"

    def test_validation_error_lists_fields(self):
        """Pydantic errors carry per-field details."""
        with pytest.raises(Exception) as info:
            CltConfig(n_paths=10)
        payload = error_payload(info.value)
        assert payload["code"] == "VALIDATION_ERROR"
        assert payload["details"][0]["loc"] == ("n_paths",)

    def test_unknown_error(self):
        """Unregistered errors are left to propagate."""
        assert error_payload(KeyError("x")) is None

    def test_codes_are_unique(self):
        """Every registered code is distinct."""
        codes = [code for _, code in ERROR_CODES]
        assert len(codes) == len(set(codes))


class TestLogging:
    """Tests for setup_logging."""

    def test_logs_go_to_stderr(self):
        """stdout is reserved for command output."""
        root = logging.getLogger()
        saved_handlers, saved_level = root.handlers[:], root.level
        try:
            setup_logging(TestConfig())
            assert len(root.handlers) == 1
            assert root.handlers[0].stream is sys.stderr
            assert root.level == logging.INFO
        finally:
            root.handlers[:] = saved_handlers
            root.setLevel(saved_level)


# =============================================================================
# Command Tests
# =============================================================================

class TestCommands:
    """Tests for the analytic subcommands."""

    def test_constants(self, cli, runner, tmp_path):
        """Brownian constants and the written table."""
        result = runner.invoke(
            cli, ["--out-dir", str(tmp_path), "constants", "--exponent", "stable:2", "--h", "0.1,0.01"]
        )
        assert result.exit_code == 0, result.stderr
        payload = json.loads(result.stdout)
        assert payload["c_beta_0"] == pytest.approx(0.5, abs=1e-6)
        assert payload["c_beta_1"] == pytest.approx(2.0 / 3.0, abs=1e-6)
        assert (tmp_path / "constants.csv").exists()
        assert (tmp_path / "constants.json").exists()

    def test_bad_exponent_exits_with_code(self, cli, runner, tmp_path):
        """Domain errors are JSON on stderr with exit code 2."""
        result = runner.invoke(cli, ["--out-dir", str(tmp_path), "constants", "--exponent", "gauss"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert result.stdout == ""
        assert json.loads(result.stderr)["code"] == "EXPONENT_ERROR"

    def test_invalid_experiment_settings(self, cli, runner, tmp_path):
        """Too few CLT paths are refused before any simulation."""
        result = runner.invoke(cli, ["--out-dir", str(tmp_path), "clt", "--paths", "10"])
        assert result.exit_code == EXIT_DOMAIN_ERROR
        assert json.loads(result.stderr)["code"] == "VALIDATION_ERROR"
        assert not (tmp_path / "report.json").exists()

    def test_density(self, cli, runner):
        """p_1(0) = 1/sqrt(4 pi) for Stable(2)."""
        result = runner.invoke(cli, ["density", "--exponent", "stable:2", "--s", "1", "--x", "0"])
        assert result.exit_code == 0, result.stderr
        row = json.loads(result.stdout)["rows"][0]
        assert row["density"] == pytest.approx(0.2820948, abs=1e-6)

    def test_density_with_differences(self, cli, runner):
        """--h adds both forms of each difference."""
        result = runner.invoke(
            cli, ["density", "--exponent", "stable:2", "--s", "1", "--x", "0", "--h", "1"]
        )
        row = json.loads(result.stdout)["rows"][0]
        assert row["second_diff"] == pytest.approx(row["second_diff_direct"], abs=1e-8)
        assert row["delta_h"] == pytest.approx(row["delta_h_spectral"], abs=1e-8)

    def test_mean(self, cli, runner):
        """E alpha_1 = 4 / (3 sqrt(pi)) for Stable(2)."""
        result = runner.invoke(cli, ["mean", "--exponent", "stable:2", "--t", "1", "--h", "0.1"])
        assert result.exit_code == 0, result.stderr
        payload = json.loads(result.stdout)
        assert payload["mean_alpha"] == pytest.approx(4.0 / (3.0 * math.sqrt(math.pi)), abs=1e-6)
        assert payload["mean_alpha_time_domain"] == pytest.approx(payload["mean_alpha"], abs=1e-6)

    def test_mean_with_bin_width(self, cli, runner):
        """--eps adds the binned means, which sit below the continuum ones."""
        result = runner.invoke(
            cli, ["mean", "--exponent", "stable:2", "--t", "1", "--h", "0.1", "--eps", "0.01"]
        )
        assert result.exit_code == 0, result.stderr
        payload = json.loads(result.stdout)
        binned = payload["binned"]
        assert binned["eps"] == 0.01
        assert binned["mean_alpha"] == pytest.approx(payload["mean_alpha"] - 0.01 / 3.0, abs=5e-5)
        assert binned["mean_sq_increment"] < payload["mean_sq_increment"]["spectral"]

    def test_simulate_seed_option(self, cli, runner, tmp_path):
        """The subcommand --seed beats the global one."""
        result = runner.invoke(
            cli,
            ["--out-dir", str(tmp_path), "--seed", "3", "simulate", "--seed", "11",
             "--steps", "100", "--field-eps", "0.05"],
        )
        assert result.exit_code == 0, result.stderr
        payload = json.loads(result.stdout)
        assert payload["seed"] == 11
        assert (tmp_path / "path_11_0.bin").exists()
        assert payload["full_coverage"] is True
        assert payload["coverage"] == 1.0

    def test_simulate(self, cli, runner, tmp_path):
        """The path dump and field CSV land in the output directory."""
        result = runner.invoke(
            cli,
            ["--out-dir", str(tmp_path), "--seed", "3", "simulate", "--exponent", "stable:1.5",
             "--steps", "200", "--field-eps", "0.05"],
        )
        assert result.exit_code == 0, result.stderr
        payload = json.loads(result.stdout)
        assert payload["seed"] == 3
        assert payload["n_steps"] == 200
        assert (tmp_path / "path_3_0.bin").exists()
        assert (tmp_path / "path_3_0.field.csv").exists()
        assert payload["alpha"] > 0

    def test_simulate_replays(self, cli, runner, tmp_path):
        """Same seed and index, same terminal value."""
        args = ["--seed", "5", "simulate", "--steps", "100", "--index", "2"]
        first = runner.invoke(cli, ["--out-dir", str(tmp_path / "a"), *args])
        second = runner.invoke(cli, ["--out-dir", str(tmp_path / "b"), *args])
        assert json.loads(first.stdout)["terminal"] == json.loads(second.stdout)["terminal"]

    def test_regularity(self, cli, runner):
        """Stable(1.5) is analysed without error."""
        result = runner.invoke(cli, ["regularity", "--exponent", "stable:1.5"])
        assert result.exit_code == 0, result.stderr
        assert json.loads(result.stdout)
