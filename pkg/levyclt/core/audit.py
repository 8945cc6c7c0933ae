"""
Numerical audit of the density estimates used in the CLT.

Each estimate is a bound "quantity <= C * shape" with an unspecified
constant C.  The audit evaluates quantity / shape over a grid, reports the
supremum per bound and the trend of that supremum as h decreases.  A bound
is called consistent when the log-log slope of its sup ratio against 1/h
stays below TREND_THRESHOLD; no absolute threshold on C is applied.

Spatial integrals of v, w and their squares are computed with the
trapezoidal rule on a geometric grid plus a power-law tail estimate.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from levyclt.core.density import DensityError, DensityEvaluator
from levyclt.core.parallel import ordered_map
from levyclt.core.quadrature import QuadratureError
from levyclt.core.statistics import StatisticalAnalyzer

logger = logging.getLogger(__name__)

TREND_THRESHOLD = 0.2
MAX_AUDIT_H = 0.5

DEFAULT_S_GRID = (1e-3, 1e-2, 1e-1, 1.0)

# Bounds with no h dependence
H_FREE_BOUNDS = ("density", "u", "occupation")


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


class AuditError(ValueError):
    """Raised for invalid audit grids."""
    pass


class AuditVerdict(str, Enum):
    """Outcome of a bound audit."""
    CONSISTENT = "consistent"
    GROWING = "growing"
    INCONCLUSIVE = "inconclusive"


@dataclass
class AuditRow:
    """One observed/shape ratio."""
    bound: str
    x: Optional[float]
    h: Optional[float]
    s: Optional[float]
    observed: float
    shape: float
    ratio: float
    flagged: bool = False
    note: str = ""


@dataclass
class BoundAuditReport:
    """Ratio tables with per-bound sups, trends and verdicts."""
    exponent: str
    x_grid: list[float]
    h_grid: list[float]
    s_grid: list[float]
    rows: list[AuditRow] = field(default_factory=list)
    sup_ratio: dict[str, float] = field(default_factory=dict)
    sup_by_h: dict[str, dict[str, float]] = field(default_factory=dict)
    trend: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, AuditVerdict] = field(default_factory=dict)

    @property
    def flagged_points(self) -> int:
        return sum(1 for row in self.rows if row.flagged)

    def summary(self) -> dict:
        """JSON summary {bound -> sup_ratio, trend, verdict}."""
        return {
            "exponent": self.exponent,
            "h_grid": self.h_grid,
            "flagged_points": self.flagged_points,
            "bounds": {
                bound: {
                    "sup_ratio": _finite_or_none(self.sup_ratio.get(bound)),
                    "sup_by_h": self.sup_by_h.get(bound, {}),
                    "trend": _finite_or_none(self.trend.get(bound)),
                    "verdict": self.verdicts[bound].value,
                }
                for bound in self.verdicts
            },
        }

    def to_frame(self) -> pd.DataFrame:
        """One row per (bound, x, h, s, ratio)."""
        return pd.DataFrame(
            [
                {
                    "bound": r.bound, "x": r.x, "h": r.h, "s": r.s,
                    "observed": r.observed, "shape": r.shape, "ratio": r.ratio,
                    "flagged": r.flagged,
                }
                for r in self.rows
            ]
        )


# ============================================================================
# Spatial integration
# ============================================================================

def spatial_grid(h: float, x_far: float, points_per_decade: int) -> np.ndarray:
    """Nonnegative grid 0 plus geometric points from h/8 to x_far."""
    start = h / 8.0
    n = max(2, int(math.ceil(points_per_decade * math.log10(x_far / start))) + 1)
    return np.concatenate(([0.0], np.geomspace(start, x_far, n)))


def half_line_integral(xs: np.ndarray, values: np.ndarray) -> tuple[float, bool]:
    """
    Trapezoid on the grid plus a power-law tail beyond its last point.

    Returns:
        Tuple of (integral, tail_ok).  tail_ok is False when the last two
        values do not decay faster than 1/x.
    """
    body = float(trapezoid(values, xs))
    x1, x2 = xs[-2], xs[-1]
    f1, f2 = values[-2], values[-1]
    if f2 == 0.0:
        return body, True
    if f1 <= 0 or f2 < 0:
        return body, False
    decay = -math.log(f2 / f1) / math.log(x2 / x1)
    if not decay > 1.05:
        return body, False
    return body + x2 * f2 / (decay - 1.0), True


# ============================================================================
# Audit
# ============================================================================

def _safe(func: Callable[[], float]) -> tuple[float, str]:
    try:
        return func(), ""
    except (QuadratureError, DensityError) as e:
        logger.warning(f"Audit point failed: {e}")
        return float("nan"), str(e)


def _ratio_row(bound, x, h, s, observed, shape, note="") -> AuditRow:
    ratio = observed / shape if shape > 0 and math.isfinite(observed) else float("nan")
    return AuditRow(
        bound=bound, x=x, h=h, s=s, observed=observed, shape=shape, ratio=ratio,
        flagged=bool(note) or not math.isfinite(ratio), note=note,
    )


def audit_density_bounds(
    ev: DensityEvaluator,
    x_grid: Sequence[float],
    h_grid: Sequence[float],
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    x_far: float = 20.0,
    points_per_decade: int = 6,
    threads: Optional[int] = 1,
) -> BoundAuditReport:
    """
    Audit the pointwise and integrated density estimates.

    Args:
        ev: Density evaluator.
        x_grid: Spatial points for the pointwise bounds.
        h_grid: Steps, each in (0, 0.5].
        s_grid: Times in (0, 1] for the density bound.
        x_far: Right end of the spatial integration grid.
        points_per_decade: Resolution of the integration grid.
        threads: Worker count for per-point evaluation.

    Returns:
        BoundAuditReport; points whose quadrature fails are flagged and
        excluded from the sups.

    Raises:
        AuditError: For empty grids or h outside (0, 0.5].
    """
    xs = [float(x) for x in x_grid]
    hs = sorted((float(h) for h in h_grid), reverse=True)
    ss = [float(s) for s in s_grid]
    if not xs or not hs or not ss:
        raise AuditError("Audit grids must be nonempty")
    if any(not (0 < h <= MAX_AUDIT_H) for h in hs):
        raise AuditError(f"Audit steps must lie in (0, {MAX_AUDIT_H}], got {hs}")
    if any(not (0 < s <= 1) for s in ss):
        raise AuditError(f"Audit times must lie in (0, 1], got {ss}")

    exponent = ev.exponent
    report = BoundAuditReport(exponent=exponent.spec(), x_grid=xs, h_grid=hs, s_grid=ss)
    rows = report.rows

    # Density and u bounds
    def density_row(point: tuple[float, float]) -> AuditRow:
        s, x = point
        observed, note = _safe(lambda: ev.density(s, x))
        shape = max(exponent.inverse(1.0 / s), 1.0) / (1.0 + x * x)
        return _ratio_row("density", x, None, s, observed, shape, note)

    rows.extend(ordered_map(density_row, [(s, x) for s in ss for x in xs], threads))

    def u_row(x: float) -> AuditRow:
        observed, note = _safe(lambda: ev.u_integral(x))
        return _ratio_row("u", x, None, None, observed, 1.0 / (1.0 + x * x), note)

    rows.extend(ordered_map(u_row, xs, threads))

    mass, note = _safe(lambda: ev.occupation_mass(1.0))
    rows.append(_ratio_row("occupation", None, None, 1.0, mass, 1.0, note))

    for h in hs:
        psi_h = exponent.psi(1.0 / h)

        # pointwise v and w
        def vw_rows(x: float, h=h, psi_h=psi_h) -> list[AuditRow]:
            ax = abs(x)
            v_obs, v_note = _safe(lambda: ev.v_integral(x, h))
            v_shape = min(
                1.0 / (h * psi_h),
                h / ax if ax > 0 else math.inf,
                h / (ax * ax) if ax > 0 else math.inf,
            )
            w_obs, w_note = _safe(lambda: ev.w_integral(x, h))
            w_shape = min(
                1.0 / (h * psi_h),
                1.0 / (psi_h * ax) if ax > 0 else math.inf,
                h * h / (ax * ax) if ax > 0 else math.inf,
            )
            return [
                _ratio_row("v", x, h, None, v_obs, v_shape, v_note),
                _ratio_row("w", x, h, None, w_obs, w_shape, w_note),
            ]

        for pair in ordered_map(vw_rows, xs, threads):
            rows.extend(pair)

        # integrated bounds; v is symmetric about -h/2 and w about 0
        grid = spatial_grid(h, x_far, points_per_decade)
        v_vals = np.array([_safe(lambda y=y: ev.v_integral(y - h / 2.0, h))[0]
                           for y in grid])
        w_vals = np.array(ordered_map(lambda y: _safe(lambda: ev.w_integral(y, h))[0],
                                      list(grid), threads))
        log_h = math.log(1.0 / h)

        integrated = {
            "v_int": (v_vals, 1.0, h * log_h),
            "v_sq": (v_vals, 2.0, 1.0 / psi_h),
            "w_int": (w_vals, 1.0, log_h / psi_h),
            "w_sq": (w_vals, 2.0, 1.0 / (h * psi_h ** 2)),
        }
        for bound, (vals, power, shape) in integrated.items():
            if not np.all(np.isfinite(vals)):
                rows.append(_ratio_row(bound, None, h, None, float("nan"), shape,
                                       "integrand evaluation failed"))
                continue
            total, tail_ok = half_line_integral(grid, vals ** power)
            rows.append(_ratio_row(bound, None, h, None, 2.0 * total, shape,
                                   "" if tail_ok else "tail estimate unavailable"))

        # integral over |x| >= 1 of w^2 against 1/psi^2(1/h)
        outer = grid >= 1.0
        if np.all(np.isfinite(w_vals)) and outer.sum() >= 2:
            total, tail_ok = half_line_integral(grid[outer], w_vals[outer] ** 2)
            rows.append(_ratio_row("w_sq_tail", 1.0, h, None, 2.0 * total, 1.0 / psi_h ** 2,
                                   "" if tail_ok else "tail estimate unavailable"))

    _summarise(report)
    logger.info(
        f"Bound audit for {report.exponent}: "
        f"{ {k: v.value for k, v in report.verdicts.items()} }"
    )
    return report


def _summarise(report: BoundAuditReport) -> None:
    bounds = list(dict.fromkeys(row.bound for row in report.rows))
    for bound in bounds:
        ratios = [r for r in report.rows if r.bound == bound and not r.flagged]
        if not ratios:
            report.verdicts[bound] = AuditVerdict.INCONCLUSIVE
            continue
        report.sup_ratio[bound] = max(r.ratio for r in ratios)

        if bound in H_FREE_BOUNDS:
            report.verdicts[bound] = AuditVerdict.CONSISTENT
            continue

        by_h: dict[float, float] = {}
        for r in ratios:
            by_h[r.h] = max(by_h.get(r.h, 0.0), r.ratio)
        report.sup_by_h[bound] = {f"{h:g}": v for h, v in by_h.items()}
        hs = sorted(by_h)
        slope = StatisticalAnalyzer.log_log_slope([1.0 / h for h in hs], [by_h[h] for h in hs])
        report.trend[bound] = slope
        if math.isnan(slope):
            report.verdicts[bound] = AuditVerdict.INCONCLUSIVE
        elif slope <= TREND_THRESHOLD:
            report.verdicts[bound] = AuditVerdict.CONSISTENT
        else:
            report.verdicts[bound] = AuditVerdict.GROWING


def write_audit(report: BoundAuditReport, out_dir: Path) -> tuple[Path, Path]:
    """Write audit.csv and audit.json into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "audit.csv"
    json_path = out_dir / "audit.json"
    report.to_frame().to_csv(csv_path, index=False, float_format="%.17g")
    json_path.write_text(json.dumps(report.summary(), indent=2))
    return csv_path, json_path
