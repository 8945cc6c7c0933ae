"""
Unit tests for statistical helpers and the ordered worker pool.
"""

import math
import time

import pytest

from levyclt.core.parallel import ordered_map, resolve_threads
from levyclt.core.statistics import StatisticalAnalyzer


class TestStatisticalAnalyzer:
    """Tests for StatisticalAnalyzer."""

    def test_mean_and_se(self):
        """Mean 2 and SE 1/sqrt(3) for 1, 2, 3."""
        mean, se = StatisticalAnalyzer.mean_and_se([1.0, 2.0, 3.0])
        assert mean == 2.0
        assert se == pytest.approx(1.0 / math.sqrt(3.0))

    def test_mean_and_se_degenerate(self):
        """One value has zero SE; none has NaN."""
        assert StatisticalAnalyzer.mean_and_se([4.0]) == (4.0, 0.0)
        mean, se = StatisticalAnalyzer.mean_and_se([])
        assert math.isnan(mean) and math.isnan(se)

    def test_log_log_slope(self):
        """y = x^3 has slope 3."""
        xs = [1.0, 2.0, 4.0, 8.0]
        assert StatisticalAnalyzer.log_log_slope(xs, [x ** 3 for x in xs]) == pytest.approx(3.0)

    def test_log_log_slope_skips_nonpositive(self):
        """Nonpositive pairs are dropped; fewer than two leave NaN."""
        assert math.isnan(StatisticalAnalyzer.log_log_slope([1.0, 2.0], [0.0, 1.0]))

    def test_aitken_geometric(self):
        """Aitken is exact on geometric sequences."""
        values = [1.0 - 0.5 ** n for n in range(1, 6)]
        assert StatisticalAnalyzer.aitken(values) == pytest.approx(1.0, abs=1e-12)

    def test_aitken_short_sequence(self):
        """Fewer than three values return the last."""
        assert StatisticalAnalyzer.aitken([0.3, 0.4]) == 0.4

    def test_observed_rates(self):
        """Errors proportional to h^2 give rate 2."""
        hs = [0.1, 0.01, 0.001]
        rates = StatisticalAnalyzer.observed_rates(hs, [3.0 * h * h for h in hs])
        assert rates == pytest.approx([2.0, 2.0])

    def test_observed_rates_zero_error(self):
        """A vanishing error gives NaN."""
        rates = StatisticalAnalyzer.observed_rates([0.1, 0.01], [0.0, 1.0])
        assert math.isnan(rates[0])

    def test_ratio_se(self):
        """Delta method for independent estimates."""
        se = StatisticalAnalyzer.ratio_se(2.0, 0.2, 4.0, 0.4)
        assert se == pytest.approx(0.5 * math.sqrt(0.02))

    def test_within(self):
        """Tolerance is the larger of n_se SE and the relative allowance."""
        assert StatisticalAnalyzer.within(1.09, 1.0, se=0.001)
        assert StatisticalAnalyzer.within(1.2, 1.0, se=0.1)
        assert not StatisticalAnalyzer.within(1.2, 1.0, se=0.01)

    def test_ks_identical_samples(self):
        """Identical samples have statistic 0 and p-value 1."""
        sample = [0.1, 0.5, 0.9, 1.3]
        stat, p_value = StatisticalAnalyzer.ks_two_sample(sample, sample)
        assert stat == 0.0
        assert p_value == pytest.approx(1.0)

    def test_ks_separated_samples(self):
        """Disjoint samples are detected."""
        stat, p_value = StatisticalAnalyzer.ks_two_sample(range(50), range(100, 150))
        assert stat == 1.0
        assert p_value < 1e-6


class TestOrderedMap:
    """Tests for the ordered worker pool."""

    def test_preserves_order(self):
        """Results follow input order even when later items finish first."""
        def work(i):
            time.sleep(0.001 * (5 - i))
            return i * i

        assert ordered_map(work, range(5), threads=4) == [0, 1, 4, 9, 16]

    def test_serial_path(self):
        """threads=1 runs in the calling thread."""
        assert ordered_map(str, [1, 2], threads=1) == ["1", "2"]

    def test_empty_input(self):
        """No work, no results."""
        assert ordered_map(str, [], threads=3) == []

    def test_rejects_nonpositive_threads(self):
        """Zero workers is an error."""
        with pytest.raises(ValueError):
            resolve_threads(0)

    def test_default_from_configuration(self, monkeypatch):
        """None falls back to the active configuration."""
        monkeypatch.setenv("LEVYCLT_ENV", "testing")
        assert resolve_threads(None) == 2
