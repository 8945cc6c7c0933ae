"""
Statistical helpers shared by the audits, constant tables and experiments.

Provides:
- Sample means with standard errors
- Least-squares trends on log-log data
- Aitken extrapolation and observed convergence rates
- Delta-method error bars for ratios of means
- Two-sample Kolmogorov-Smirnov comparison
"""

import logging
import math
from typing import Sequence

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)


class StatisticalAnalyzer:
    """Statistical methods for Monte Carlo and convergence diagnostics."""

    @staticmethod
    def mean_and_se(data: Sequence[float]) -> tuple[float, float]:
        """
        Sample mean and its standard error.

        Args:
            data: Sample values.

        Returns:
            Tuple of (mean, standard error).  The error is 0 for fewer than
            two values.
        """
        values = np.asarray(data, dtype=float)
        if values.size == 0:
            return float("nan"), float("nan")
        if values.size < 2:
            return float(values[0]), 0.0
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))

    @staticmethod
    def linear_trend(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
        """
        Least-squares slope and intercept of y against x.

        Returns:
            Tuple of (slope, intercept); (0, mean) for degenerate input.
        """
        xs = np.asarray(x, dtype=float)
        ys = np.asarray(y, dtype=float)
        if xs.size < 2 or np.ptp(xs) == 0:
            return 0.0, float(ys.mean()) if ys.size else 0.0
        slope, intercept = np.polyfit(xs, ys, 1)
        return float(slope), float(intercept)

    @staticmethod
    def log_log_slope(x: Sequence[float], y: Sequence[float]) -> float:
        """Slope of log y against log x over the finite positive pairs."""
        pairs = [
            (math.log(a), math.log(b))
            for a, b in zip(x, y)
            if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)
        ]
        if len(pairs) < 2:
            return float("nan")
        slope, _ = StatisticalAnalyzer.linear_trend([p[0] for p in pairs], [p[1] for p in pairs])
        return slope

    @staticmethod
    def aitken(values: Sequence[float]) -> float:
        """
        Aitken delta-squared extrapolation from the last three values.

        Falls back to the last value when the second difference vanishes.
        """
        if len(values) < 3:
            return float(values[-1]) if values else float("nan")
        a, b, c = (float(v) for v in values[-3:])
        denominator = (c - b) - (b - a)
        if denominator == 0 or not math.isfinite(denominator):
            return c
        return c - (c - b) ** 2 / denominator

    @staticmethod
    def observed_rates(h_values: Sequence[float], errors: Sequence[float]) -> list[float]:
        """
        Local orders r_k with |error| ~ h^r between consecutive schedule points.

        Returns NaN where an error vanishes.
        """
        rates = []
        for k in range(len(h_values) - 1):
            e0, e1 = abs(errors[k]), abs(errors[k + 1])
            h0, h1 = h_values[k], h_values[k + 1]
            if e0 > 0 and e1 > 0 and h0 != h1:
                rates.append(math.log(e1 / e0) / math.log(h1 / h0))
            else:
                rates.append(float("nan"))
        return rates

    @staticmethod
    def ratio_se(num: float, num_se: float, den: float, den_se: float) -> float:
        """Delta-method standard error of num/den for independent estimates."""
        if den == 0 or num == 0:
            return float("nan")
        ratio = num / den
        return abs(ratio) * math.sqrt((num_se / num) ** 2 + (den_se / den) ** 2)

    @staticmethod
    def within(observed: float, expected: float, se: float, n_se: float = 3.0, rel: float = 0.1) -> bool:
        """True if |observed - expected| <= max(n_se * se, rel * |expected|)."""
        return abs(observed - expected) <= max(n_se * se, rel * abs(expected))

    @staticmethod
    def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
        """
        Two-sample Kolmogorov-Smirnov statistic and p-value.

        Returns:
            Tuple of (statistic, p-value).
        """
        result = stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        return float(result.statistic), float(result.pvalue)
