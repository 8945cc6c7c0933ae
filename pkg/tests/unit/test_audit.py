"""
Unit tests for the density bound audit.
"""

import json

import numpy as np
import pandas as pd
import pytest

from levyclt.core.audit import (
    AuditError,
    AuditRow,
    AuditVerdict,
    BoundAuditReport,
    _summarise,
    audit_density_bounds,
    half_line_integral,
    spatial_grid,
    write_audit,
)
from levyclt.core.density import DensityError, DensityEvaluator
from levyclt.core.exponent import LevyExponent


@pytest.fixture(scope="module")
def small_audit():
    """Audit of Stable(2) on a coarse grid, shared by the module."""
    return audit_density_bounds(
        DensityEvaluator(LevyExponent.stable(2.0)), x_grid=[0.0, 1.0], h_grid=[0.2, 0.1], s_grid=(0.1, 1.0),
        x_far=5.0, points_per_decade=3, threads=2,
    )


class TestSpatialIntegration:
    """Tests for the audit's spatial grid and tail rule."""

    def test_grid_starts_at_zero(self):
        """Grid is 0 then geometric from h/8 to x_far."""
        grid = spatial_grid(0.1, 10.0, 4)
        assert grid[0] == 0.0
        assert grid[1] == pytest.approx(0.0125)
        assert grid[-1] == pytest.approx(10.0)
        assert np.all(np.diff(grid) > 0)

    def test_power_tail_is_added(self):
        """integral_1^inf x^-3 = 1/2 from a grid on [1, 10] plus tail."""
        xs = np.geomspace(1.0, 10.0, 2001)
        total, tail_ok = half_line_integral(xs, xs ** -3.0)
        assert tail_ok
        assert total == pytest.approx(0.5, rel=1e-4)

    def test_slow_decay_has_no_tail(self):
        """1/x decay admits no finite tail."""
        xs = np.geomspace(1.0, 10.0, 50)
        _, tail_ok = half_line_integral(xs, 1.0 / xs)
        assert not tail_ok


class TestAudit:
    """Tests for audit_density_bounds and its summaries."""

    def test_every_bound_has_a_verdict(self, small_audit):
        """Pointwise, integrated and h-free bounds are all summarised."""
        expected = {"density", "u", "occupation", "v", "w", "v_int", "v_sq", "w_int", "w_sq"}
        assert expected <= set(small_audit.verdicts)

    def test_h_free_bounds_are_consistent(self, small_audit):
        """Bounds without an h dependence have no trend to grow."""
        for bound in ("density", "u", "occupation"):
            assert small_audit.verdicts[bound] == AuditVerdict.CONSISTENT
            assert np.isfinite(small_audit.sup_ratio[bound])

    def test_h_bounds_have_trends(self, small_audit):
        """Every h-dependent bound gets a sup per h and a slope."""
        assert set(small_audit.sup_by_h["v"]) == {"0.2", "0.1"}
        assert np.isfinite(small_audit.trend["w"])

    def test_h_grid_sorted_descending(self, small_audit):
        """Steps are audited from large to small."""
        assert small_audit.h_grid == [0.2, 0.1]

    def test_failed_points_are_flagged(self, gaussian_ev, mocker):
        """A failing evaluation is flagged and excluded from the sup."""
        mocker.patch.object(type(gaussian_ev), "u_integral", side_effect=DensityError("boom"))
        report = audit_density_bounds(
            gaussian_ev, x_grid=[0.5], h_grid=[0.2], s_grid=(1.0,), x_far=2.0, points_per_decade=2,
        )
        assert report.flagged_points > 0
        assert report.verdicts["u"] == AuditVerdict.INCONCLUSIVE

    def test_growing_trend(self):
        """A sup ratio rising like 1/h is reported as growing."""
        report = BoundAuditReport(exponent="stable:2", x_grid=[0.0], h_grid=[0.1, 0.01], s_grid=[1.0])
        report.rows = [
            AuditRow("v", 0.0, 0.1, None, observed=1.0, shape=0.1, ratio=10.0),
            AuditRow("v", 0.0, 0.01, None, observed=1.0, shape=0.01, ratio=100.0),
        ]
        _summarise(report)
        assert report.trend["v"] == pytest.approx(1.0)
        assert report.verdicts["v"] == AuditVerdict.GROWING

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"x_grid": [], "h_grid": [0.1]},
            {"x_grid": [0.0], "h_grid": [0.6]},
            {"x_grid": [0.0], "h_grid": [0.1], "s_grid": (2.0,)},
        ],
    )
    def test_rejects_bad_grids(self, gaussian_ev, kwargs):
        """Empty grids, h > 1/2 and s > 1 are rejected."""
        with pytest.raises(AuditError):
            audit_density_bounds(gaussian_ev, **kwargs)

    def test_write_audit(self, small_audit, tmp_path):
        """audit.csv holds every row, audit.json the summary."""
        csv_path, json_path = write_audit(small_audit, tmp_path)
        frame = pd.read_csv(csv_path)
        assert len(frame) == len(small_audit.rows)
        assert {"bound", "ratio", "flagged"} <= set(frame.columns)
        summary = json.loads(json_path.read_text())
        assert summary["bounds"]["density"]["verdict"] == "consistent"
