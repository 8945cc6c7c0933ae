"""
Pydantic schemas for experiment configuration and persisted reports.

This module defines the data structures used by the harness for:
- Validating experiment configurations (CLI flags and YAML files)
- Experiment reports written as report.json
- Canonical report forms used for determinism checks
"""

from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from levyclt.core.exponent import ExponentError, LevyExponent, parse_exponent
from levyclt.core.seeding import MASK64

MIN_CLT_PATHS = 100

# Bins per smallest h
MIN_BINS_PER_H = 5
MAX_BINS_PER_H = 20
MULTIPLE_TOL = 1e-9

# Fields excluded from the canonical form
WALL_CLOCK_FIELDS = {"generated_at", "runtime_seconds"}


class SettingsError(ValueError):
    """Raised for unreadable experiment settings files."""
    pass


# ============================================================================
# Enums
# ============================================================================

class CenteringMode(str, Enum):
    """Centering m(h) subtracted from J_h in the normalized statistic."""
    KAC_EXACT = "kac_exact"
    STABLE_CLOSED_FORM = "stable_closed_form"


class ExperimentKind(str, Enum):
    """Experiment types run by the harness."""
    CLT = "clt"
    SCALING = "scaling"
    MEAN_CONVERGENCE = "mean_convergence"
    MOMENT_BOUND = "moment_bound"


# ============================================================================
# Configuration Schemas
# ============================================================================

def _check_exponent(spec: str) -> str:
    try:
        parse_exponent(spec)
    except ExponentError as e:
        raise ValueError(str(e)) from e
    return spec


def _check_schedule(values: list[float]) -> list[float]:
    if not values:
        raise ValueError("h schedule must be nonempty")
    if any(not (0 < h < 1) for h in values):
        raise ValueError(f"h values must lie in (0, 1), got {values}")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ValueError(f"h schedule must be strictly decreasing, got {values}")
    return values


def load_yaml_settings(path: Path) -> dict[str, Any]:
    """Read a YAML mapping of experiment settings."""
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise SettingsError(f"{path} must contain a mapping of settings")
    return data


class SimulationSettings(BaseModel):
    """Settings shared by every Monte Carlo experiment."""
    exponent: str = "stable:1.5"
    n_paths: int = Field(default=2000, ge=2)
    n_steps: int = Field(default=100_000, ge=1)
    seed: int = Field(default=20240601, ge=0, le=MASK64)
    threads: Optional[int] = Field(default=None, ge=1)

    @field_validator("exponent")
    @classmethod
    def exponent_is_valid(cls, value: str) -> str:
        return _check_exponent(value)

    def levy_exponent(self) -> LevyExponent:
        return parse_exponent(self.exponent)

    @classmethod
    def from_yaml(cls, path: Path, **overrides: Any) -> "SimulationSettings":
        """
        Load settings from a YAML mapping; non-None overrides win.

        Raises:
            pydantic.ValidationError: If the merged settings are invalid.
            SettingsError: If the file does not hold a mapping.
        """
        data = load_yaml_settings(path)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(data)


class CltConfig(SimulationSettings):
    """
    Configuration of the CLT experiment.

    The bin width is eps = min(h_schedule) / bins_per_h with 5 to 20 bins
    per smallest h, and every h in the schedule must be a whole number of
    bins.
    """
    h_schedule: list[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05])
    n_paths: int = Field(default=2000, ge=MIN_CLT_PATHS)
    horizon: float = Field(default=1.0, gt=0, le=1)
    bins_per_h: int = Field(default=10, ge=MIN_BINS_PER_H, le=MAX_BINS_PER_H)
    centering: CenteringMode = CenteringMode.KAC_EXACT

    @field_validator("h_schedule")
    @classmethod
    def schedule_is_decreasing(cls, value: list[float]) -> list[float]:
        return _check_schedule(value)

    @model_validator(mode="after")
    def check_grid_and_centering(self) -> "CltConfig":
        eps = self.eps
        for h in self.h_schedule:
            k = round(h / eps)
            if k < 1 or abs(h - k * eps) > MULTIPLE_TOL * h:
                raise ValueError(f"h={h} is not a whole multiple of eps={eps}")
        if self.centering == CenteringMode.STABLE_CLOSED_FORM and not self.levy_exponent().is_stable:
            raise ValueError("stable_closed_form centering requires a pure stable exponent")
        return self

    @property
    def eps(self) -> float:
        return min(self.h_schedule) / self.bins_per_h


class ScalingConfig(SimulationSettings):
    """Configuration of the scaling-law experiment (pure stable only)."""
    t_values: list[float] = Field(default_factory=lambda: [1.0, 0.5])
    eps: float = Field(default=0.01, gt=0)

    @field_validator("t_values")
    @classmethod
    def times_in_unit_interval(cls, value: list[float]) -> list[float]:
        if not value or any(not (0 < t <= 1) for t in value):
            raise ValueError(f"t values must be a nonempty subset of (0, 1], got {value}")
        return value

    @model_validator(mode="after")
    def exponent_is_stable(self) -> "ScalingConfig":
        if not self.levy_exponent().is_stable:
            raise ValueError("Scaling experiment requires a pure stable exponent")
        return self


class MeanConvergenceConfig(SimulationSettings):
    """Configuration of the mean-convergence experiment."""
    h_schedule: list[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05])
    horizon: float = Field(default=1.0, gt=0, le=1)
    bins_per_h: int = Field(default=10, ge=MIN_BINS_PER_H, le=MAX_BINS_PER_H)

    @field_validator("h_schedule")
    @classmethod
    def schedule_is_decreasing(cls, value: list[float]) -> list[float]:
        return _check_schedule(value)

    @property
    def eps(self) -> float:
        return min(self.h_schedule) / self.bins_per_h


class MomentBoundConfig(SimulationSettings):
    """Configuration of the moment-bound experiment."""
    t_grid: list[float] = Field(default_factory=lambda: [1.0, 0.3, 0.1, 0.03, 0.01])
    eps: float = Field(default=0.01, gt=0)

    @field_validator("t_grid")
    @classmethod
    def times_in_unit_interval(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("t grid must be nonempty")
        if any(not (0 < t <= 1) for t in value):
            raise ValueError(f"t grid must lie in (0, 1], got {value}")
        return value


# ============================================================================
# Report Schemas
# ============================================================================

class SeedProvenance(BaseModel):
    """Master seed and the streams each sample was drawn from."""
    seed: int
    streams: dict[str, int] = Field(default_factory=dict)


class CltRow(BaseModel):
    """Per-h results of the CLT experiment."""
    h: float
    normalization: float
    centering: float
    centering_kac: float
    kac_continuum: float
    binning_offset: float
    centering_closed_form: Optional[float] = None
    centering_shift: Optional[float] = None
    mean_modulus: float
    se_modulus: float
    z_mean: float
    z_variance: float
    variance_ratio: float
    ks_statistic: float
    p_value: float = Field(ge=0, le=1)
    samples: list[float] = Field(default_factory=list)


class MeanConvergenceRow(BaseModel):
    """Per-h Monte Carlo mean of J_h against its exact value."""
    h: float
    mean_modulus: float
    se_modulus: float
    exact_mean: float
    binned_mean: float
    binning_offset: float
    leading: float
    remainder: float
    oracle_remainder: float
    g_bar: float
    remainder_ratio: float
    remainder_se_ratio: float
    variance_bound: float
    within_tolerance: bool
    normalized_mean: Optional[float] = None
    normalized_se: Optional[float] = None


class ScalingRow(BaseModel):
    """Moments of alpha_t against scaled moments of alpha_1."""
    t: float
    bin_width: float
    mean_alpha: float
    se_alpha: float
    second_moment: float
    se_second_moment: float
    mean_ratio: float
    mean_ratio_se: float
    second_moment_ratio: float
    second_moment_ratio_se: float
    oracle_mean: float


class MomentRow(BaseModel):
    """L^n norms of alpha_t against t^2 psi^-1(1/t)."""
    t: float
    bin_width: float
    norms: dict[str, float]
    ratios: dict[str, float]
    oracle_mean: float
    se_mean: float
    oracle_within_tolerance: bool


class ExperimentReport(BaseModel):
    """
    Persisted record of one experiment run.

    Wall-clock fields are excluded from canonical_json so that identical
    configurations and seeds give byte-identical canonical reports.
    """
    kind: ExperimentKind
    config: dict[str, Any]
    provenance: SeedProvenance
    verdicts: dict[str, str] = Field(default_factory=dict)
    summary: dict[str, Optional[float]] = Field(default_factory=dict)
    generated_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    runtime_seconds: float = 0.0

    def canonical_json(self) -> str:
        return self.model_dump_json(indent=2, exclude=WALL_CLOCK_FIELDS)


class CltReport(ExperimentReport):
    """Report of the CLT experiment."""
    kind: ExperimentKind = ExperimentKind.CLT
    rows: list[CltRow] = Field(default_factory=list)
    mixture_samples: list[float] = Field(default_factory=list)


class ScalingReport(ExperimentReport):
    """Report of the scaling-law experiment."""
    kind: ExperimentKind = ExperimentKind.SCALING
    rows: list[ScalingRow] = Field(default_factory=list)


class MeanConvergenceReport(ExperimentReport):
    """Report of the mean-convergence experiment."""
    kind: ExperimentKind = ExperimentKind.MEAN_CONVERGENCE
    rows: list[MeanConvergenceRow] = Field(default_factory=list)


class MomentBoundReport(ExperimentReport):
    """Report of the moment-bound experiment."""
    kind: ExperimentKind = ExperimentKind.MOMENT_BOUND
    rows: list[MomentRow] = Field(default_factory=list)
    fitted_constants: dict[str, float] = Field(default_factory=dict)
