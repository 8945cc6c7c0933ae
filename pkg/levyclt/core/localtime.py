"""
Local-time fields estimated from discretized paths.

The estimator is the occupation density of the piecewise-constant path
(value frozen on [t_k, t_{k+1})) against indicator kernels of width eps:

    L^x_t ~ (1/eps) * sum_k dt * 1{X_{t_k} in bin(x)}.

This bookkeeping is exact for the occupation formula with bin-indicator
test functions and does not invent continuous crossings for jump paths.
From the field we compute alpha_t = integral L^2 dx and the L2 modulus
J_h = integral (L^{x+h} - L^x)^2 dx.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from levyclt.core.simulate import SamplePath

logger = logging.getLogger(__name__)

GRID_ROUNDING = 1e-6
MULTIPLE_TOL = 1e-9
DEFAULT_PADDING_BINS = 2


class LocalTimeError(ValueError):
    """Raised for degenerate grids or steps that are not bin multiples."""
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform spatial bins [x_min + i eps, x_min + (i+1) eps)."""
    x_min: float
    x_max: float
    eps: float

    def __post_init__(self):
        if not self.eps > 0 or not math.isfinite(self.eps):
            raise LocalTimeError(f"Bin width must be positive, got {self.eps}")
        span = self.x_max - self.x_min
        if span < self.eps * (1.0 - GRID_ROUNDING):
            raise LocalTimeError(
                f"Grid [{self.x_min}, {self.x_max}] is narrower than one bin of width {self.eps}"
            )
        bins = span / self.eps
        if abs(bins - round(bins)) > GRID_ROUNDING * max(1.0, bins):
            raise LocalTimeError(f"Grid span {span} is not a whole number of bins of width {self.eps}")

    @classmethod
    def from_bins(cls, x_min: float, eps: float, n_bins: int) -> "GridSpec":
        return cls(x_min=x_min, x_max=x_min + n_bins * eps, eps=eps)

    @property
    def n_bins(self) -> int:
        return int(round((self.x_max - self.x_min) / self.eps))

    @property
    def centres(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_bins) + 0.5) * self.eps

    def bin_index(self, values: np.ndarray) -> np.ndarray:
        """Bin of each value; out-of-range values map outside [0, n_bins)."""
        return np.floor((np.asarray(values) - self.x_min) / self.eps).astype(np.int64)


def default_grid(path: SamplePath, eps: float, padding_bins: int = DEFAULT_PADDING_BINS) -> GridSpec:
    """
    Grid covering the path range, anchored to multiples of eps and padded.

    Anchoring to the eps lattice keeps bins of different paths aligned.
    """
    if not eps > 0:
        raise LocalTimeError(f"Bin width must be positive, got {eps}")
    low = math.floor(float(np.min(path.positions)) / eps) - padding_bins
    high = math.floor(float(np.max(path.positions)) / eps) + 1 + padding_bins
    return GridSpec.from_bins(low * eps, eps, high - low)


@dataclass(frozen=True)
class LocalTimeField:
    """
    Grid-indexed local-time estimate.

    Attributes:
        grid: Spatial bins.
        values: Nonnegative occupation densities, one per bin.
        t: Horizon of the path.
        coverage: Fraction of path time spent inside the grid.
    """
    grid: GridSpec
    values: np.ndarray
    t: float
    coverage: float

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.grid.eps)

    @property
    def full_coverage(self) -> bool:
        """True when every sample of the path fell inside the grid."""
        return self.coverage >= 1.0


def estimate_local_time(path: SamplePath, grid: Optional[GridSpec] = None, eps: Optional[float] = None) -> LocalTimeField:
    """
    Left-endpoint occupation estimate of the local-time field.

    Args:
        path: Sample path with at least one step.
        grid: Spatial grid; defaults to default_grid(path, eps).
        eps: Bin width used when no grid is given.

    Returns:
        LocalTimeField with sum(values) * eps == T * coverage.

    Raises:
        LocalTimeError: For an empty path or missing grid information.
    """
    if path.n_steps < 1:
        raise LocalTimeError("Path must contain at least one step")
    if grid is None:
        if eps is None:
            raise LocalTimeError("Either a grid or a bin width is required")
        grid = default_grid(path, eps)

    samples = path.positions[:-1]
    idx = grid.bin_index(samples)
    inside = (idx >= 0) & (idx < grid.n_bins)
    counts = np.bincount(idx[inside], minlength=grid.n_bins)
    values = counts * (path.dt / grid.eps)
    coverage = float(inside.sum()) / path.n_steps

    if coverage < 1.0:
        logger.warning(f"Local-time grid covers only {coverage:.4%} of the path time")
    return LocalTimeField(grid=grid, values=values, t=path.horizon, coverage=coverage)


def alpha(field: LocalTimeField, require_full_coverage: bool = False) -> float:
    """
    alpha_t = sum values^2 * eps.

    Biased low when coverage < 1; field.full_coverage carries the flag.

    Raises:
        LocalTimeError: On partial coverage when require_full_coverage is set.
    """
    if not field.full_coverage:
        if require_full_coverage:
            raise LocalTimeError(f"alpha needs full grid coverage, got {field.coverage:.4%}")
        logger.warning(f"alpha computed on partial coverage {field.coverage:.4%}; biased low")
    return float(np.dot(field.values, field.values) * field.grid.eps)


def shift_bins(field: LocalTimeField, h: float) -> int:
    """Number of bins k with h = k eps."""
    eps = field.grid.eps
    k = int(round(h / eps))
    if k < 1 or abs(h - k * eps) > MULTIPLE_TOL * max(h, eps):
        raise LocalTimeError(f"h={h} is not a positive integer multiple of eps={eps}")
    return k


def l2_modulus(field: LocalTimeField, h: float) -> float:
    """
    J_h = sum_i (values[i + k] - values[i])^2 * eps with h = k eps.

    Values beyond the grid count as zero.

    Raises:
        LocalTimeError: If h is not a whole number of bins.
    """
    k = shift_bins(field, h)
    padded = np.concatenate((np.zeros(k), field.values, np.zeros(k)))
    diff = padded[k:] - padded[:-k]
    return float(np.dot(diff, diff) * field.grid.eps)


def occupation_integral(field: LocalTimeField, mask: np.ndarray) -> float:
    """integral g(x) L^x dx for g the indicator of the masked bins."""
    return float(np.sum(field.values[np.asarray(mask, dtype=bool)]) * field.grid.eps)


def time_in_set(path: SamplePath, grid: GridSpec, mask: np.ndarray) -> float:
    """integral_0^T g(X_s) ds for the same bin indicator, counted along the path."""
    mask = np.asarray(mask, dtype=bool)
    idx = grid.bin_index(path.positions[:-1])
    inside = (idx >= 0) & (idx < grid.n_bins)
    hits = mask[idx[inside]]
    return float(np.count_nonzero(hits) * path.dt)


def write_field_csv(field: LocalTimeField, target: Path) -> Path:
    """Dump (x, L) pairs at bin centres."""
    target.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"x": field.grid.centres, "L": field.values})
    frame.to_csv(target, index=False, float_format="%.17g")
    return target
