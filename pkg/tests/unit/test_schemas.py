"""
Unit tests for experiment configuration and report schemas.

Tests cover:
- Validation of CLT, scaling, mean-convergence and moment settings
- YAML settings files and flag overrides
- Canonical report forms
"""

import json

import pytest
from freezegun import freeze_time
from pydantic import ValidationError

from levyclt.core.schemas import (
    CenteringMode,
    CltConfig,
    CltReport,
    ExperimentKind,
    MeanConvergenceConfig,
    MomentBoundConfig,
    ScalingConfig,
    SeedProvenance,
    SettingsError,
    load_yaml_settings,
)


# =============================================================================
# Configuration Tests
# =============================================================================

class TestCltConfig:
    """Tests for CltConfig validation."""

    def test_defaults(self):
        """Default schedule 0.2, 0.1, 0.05 with ten bins per smallest h."""
        config = CltConfig()
        assert config.h_schedule == [0.2, 0.1, 0.05]
        assert config.eps == pytest.approx(0.005)
        assert config.centering == CenteringMode.KAC_EXACT

    def test_h_must_be_whole_number_of_bins(self):
        """0.2 is not a multiple of 0.03."""
        with pytest.raises(ValidationError, match="multiple"):
            CltConfig(h_schedule=[0.2, 0.15], bins_per_h=5)

    def test_minimum_path_count(self):
        """Fewer than 100 paths are refused."""
        with pytest.raises(ValidationError):
            CltConfig(n_paths=10)

    @pytest.mark.parametrize("schedule", [[], [1.0, 0.5], [0.1, 0.2], [0.1, 0.1]])
    def test_schedule_must_be_decreasing_in_unit_interval(self, schedule):
        """Empty, h >= 1 and non-decreasing schedules are refused."""
        with pytest.raises(ValidationError):
            CltConfig(h_schedule=schedule)

    def test_closed_form_centering_needs_stable_exponent(self):
        """The closed form has no meaning for mixtures."""
        with pytest.raises(ValidationError, match="pure stable"):
            CltConfig(exponent="mix:1.0*1.8+1.0*1.2", centering="stable_closed_form")

    def test_closed_form_centering_for_stable(self):
        """Stable exponents accept either centering."""
        config = CltConfig(exponent="stable:1.8", centering="stable_closed_form")
        assert config.centering == CenteringMode.STABLE_CLOSED_FORM

    def test_invalid_exponent(self):
        """Exponent specs are parsed on validation."""
        with pytest.raises(ValidationError):
            CltConfig(exponent="stable:0.9")

    def test_seed_range(self):
        """Seeds are unsigned 64-bit."""
        with pytest.raises(ValidationError):
            CltConfig(seed=-1)

    @pytest.mark.parametrize("bins", [4, 21])
    def test_bins_per_h_range(self, bins):
        """Between 5 and 20 bins per smallest h."""
        with pytest.raises(ValidationError):
            CltConfig(bins_per_h=bins)
        with pytest.raises(ValidationError):
            MeanConvergenceConfig(bins_per_h=bins)

    @pytest.mark.parametrize("bins", [5, 20])
    def test_bins_per_h_bounds_accepted(self, bins):
        """Both ends of the range are valid."""
        assert CltConfig(bins_per_h=bins).eps == pytest.approx(0.05 / bins)
        assert MeanConvergenceConfig(bins_per_h=bins).bins_per_h == bins


class TestOtherConfigs:
    """Tests for the scaling, mean-convergence and moment configurations."""

    def test_scaling_requires_stable(self):
        """The scaling law is only defined for stable exponents."""
        with pytest.raises(ValidationError, match="pure stable"):
            ScalingConfig(exponent="mix:1.0*1.8+1.0*1.2")

    def test_scaling_times(self):
        """t must lie in (0, 1]."""
        with pytest.raises(ValidationError):
            ScalingConfig(t_values=[1.0, 1.5])

    def test_mean_convergence_eps(self):
        """eps follows the smallest h."""
        config = MeanConvergenceConfig(h_schedule=[0.2, 0.1], bins_per_h=5)
        assert config.eps == pytest.approx(0.02)

    def test_moment_grid(self):
        """Empty grids are refused."""
        with pytest.raises(ValidationError):
            MomentBoundConfig(t_grid=[])
        assert MomentBoundConfig().t_grid[0] == 1.0


# =============================================================================
# Settings File Tests
# =============================================================================

class TestSettingsFiles:
    """Tests for YAML settings files."""

    def test_non_mapping_is_refused(self, tmp_path):
        """A YAML list is not a settings file."""
        target = tmp_path / "settings.yaml"
        target.write_text("- a\n- b\n")
        with pytest.raises(SettingsError):
            load_yaml_settings(target)

    def test_empty_file_is_empty_mapping(self, tmp_path):
        """An empty file holds no settings."""
        target = tmp_path / "empty.yaml"
        target.write_text("")
        assert load_yaml_settings(target) == {}

    def test_overrides_win(self, tmp_path):
        """Non-None overrides beat file values; None leaves them alone."""
        target = tmp_path / "clt.yaml"
        target.write_text("exponent: stable:2\nn_paths: 500\nseed: 1\nh_schedule: [0.2, 0.1]\n")
        config = CltConfig.from_yaml(target, seed=7, n_paths=None)
        assert config.exponent == "stable:2"
        assert config.n_paths == 500
        assert config.seed == 7
        assert config.h_schedule == [0.2, 0.1]


# =============================================================================
# Report Tests
# =============================================================================

class TestReports:
    """Tests for persisted report forms."""

    def _report(self, **kwargs):
        return CltReport(
            config={"exponent": "stable:1.5"},
            provenance=SeedProvenance(seed=3, streams={"paths": 1}),
            **kwargs,
        )

    def test_kind(self):
        """CLT reports carry their kind."""
        assert self._report().kind == ExperimentKind.CLT

    @freeze_time("2026-03-01 12:00:00")
    def test_generated_at_is_stamped(self):
        """Reports are stamped with the current UTC time."""
        assert self._report().generated_at.isoformat().startswith("2026-03-01T12:00:00")

    def test_canonical_json_ignores_wall_clock(self):
        """Runs at different times with different runtimes compare equal."""
        with freeze_time("2026-03-01"):
            first = self._report(runtime_seconds=1.0)
        with freeze_time("2026-03-02"):
            second = self._report(runtime_seconds=9.5)
        assert first.canonical_json() == second.canonical_json()
        payload = json.loads(first.canonical_json())
        assert "generated_at" not in payload
        assert "runtime_seconds" not in payload
        assert payload["provenance"]["seed"] == 3

    def test_full_json_keeps_wall_clock(self):
        """report.json still records when the run happened."""
        payload = json.loads(self._report().model_dump_json())
        assert "generated_at" in payload
