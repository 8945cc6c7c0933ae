"""
Spectral constants of the L2 modulus CLT.

    c_{beta,0}   = (2/pi)  integral_0^inf sin^2(p/2) / p^beta     dp
    c_{beta,1}   = (16/pi) integral_0^inf sin^4(p/2) / p^(2 beta) dp
    c_{psi,h,0}  = (1/pi)  integral_0^inf (1 - cos ph) / psi(p)   dp
    c_{psi,h,1}  = (16/pi) integral_0^inf sin^4(hp/2) / psi^2(p)  dp

Every integral is split at p = 1 (after the substitution q = ph for the
h-dependent constants).  The head is a plain adaptive quadrature; the tail is
rewritten through sin^2(p/2) = (1 - cos p)/2 and
sin^4(p/2) = (3 - 4 cos p + cos 2p)/8 into a non-oscillatory algebraic part
and Fourier integrals handled by QAWF.

For Stable(beta) the h-dependent constants obey the exact scalings
c_{psi,h,0} = h^(beta-1) c_{beta,0} and h psi^2(1/h) c_{psi,h,1} = c_{beta,1};
for mixtures the scaled constants converge to the values at the index of
regular variation at infinity.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from levyclt.core.exponent import BETA_MAX, BETA_MIN, LevyExponent
from levyclt.core.parallel import ordered_map
from levyclt.core.quadrature import integrate, integrate_oscillatory
from levyclt.core.statistics import StatisticalAnalyzer

logger = logging.getLogger(__name__)

ABS_TOL = 1e-11


class ConstantsError(ValueError):
    """Raised for out-of-range parameters of the spectral constants."""
    pass


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (BETA_MIN < beta <= BETA_MAX):
        raise ConstantsError(f"beta must lie in (1, 2], got {beta}")
    return beta


def _check_h(h: float) -> float:
    h = float(h)
    if not h > 0 or not math.isfinite(h):
        raise ConstantsError(f"h must be positive and finite, got {h}")
    return h


def _fourier_tail(amplitude: Callable[[float], float], omega: float, context: str) -> float:
    """integral_1^inf amplitude(q) cos(omega q) dq."""
    return integrate_oscillatory(
        amplitude, 1.0, np.inf, omega=omega, kind="cos", epsabs=ABS_TOL
    ).require(context)


def _plain(amplitude: Callable[[float], float], a: float, b: float, context: str) -> float:
    return integrate(amplitude, a, b, epsabs=ABS_TOL, epsrel=1e-11).require(context)


# ============================================================================
# Stable constants
# ============================================================================

def c_beta_0(beta: float) -> float:
    """(2/pi) integral_0^inf sin^2(p/2) / p^beta dp for beta in (1, 2]."""
    beta = _check_beta(beta)
    head = _plain(lambda p: math.sin(p / 2.0) ** 2 / p ** beta, 0.0, 1.0, "c_beta_0 head")
    cosine = _fourier_tail(lambda p: p ** -beta, 1.0, "c_beta_0 tail")
    tail = 1.0 / (2.0 * (beta - 1.0)) - 0.5 * cosine
    return 2.0 * (head + tail) / math.pi


def c_beta_1(beta: float) -> float:
    """(16/pi) integral_0^inf sin^4(p/2) / p^(2 beta) dp for beta in (1, 2]."""
    beta = _check_beta(beta)
    power = 2.0 * beta
    head = _plain(lambda p: math.sin(p / 2.0) ** 4 / p ** power, 0.0, 1.0, "c_beta_1 head")
    cos1 = _fourier_tail(lambda p: p ** -power, 1.0, "c_beta_1 tail (cos p)")
    cos2 = _fourier_tail(lambda p: p ** -power, 2.0, "c_beta_1 tail (cos 2p)")
    tail = 3.0 / (8.0 * (power - 1.0)) - 0.5 * cos1 + 0.125 * cos2
    return 16.0 * (head + tail) / math.pi


# ============================================================================
# h-dependent constants
# ============================================================================

def _scaled_0(exponent: LevyExponent, h: float) -> float:
    """(1/pi) integral_0^inf (1 - cos q) psi(1/h) / psi(q/h) dq."""
    psi = exponent.psi
    psi_h = psi(1.0 / h)

    def ratio(q: float) -> float:
        return psi_h / psi(q / h)

    head = _plain(lambda q: 2.0 * math.sin(q / 2.0) ** 2 * ratio(q), 0.0, 1.0, "c_psi_h_0 head")
    algebraic = _plain(ratio, 1.0, np.inf, "c_psi_h_0 algebraic tail")
    cosine = _fourier_tail(ratio, 1.0, "c_psi_h_0 oscillatory tail")
    return (head + algebraic - cosine) / math.pi


def _scaled_1(exponent: LevyExponent, h: float) -> float:
    """(16/pi) integral_0^inf sin^4(q/2) psi^2(1/h) / psi^2(q/h) dq."""
    psi = exponent.psi
    psi_h = psi(1.0 / h)

    def ratio_sq(q: float) -> float:
        return (psi_h / psi(q / h)) ** 2

    head = _plain(lambda q: math.sin(q / 2.0) ** 4 * ratio_sq(q), 0.0, 1.0, "c_psi_h_1 head")
    algebraic = _plain(ratio_sq, 1.0, np.inf, "c_psi_h_1 algebraic tail")
    cos1 = _fourier_tail(ratio_sq, 1.0, "c_psi_h_1 tail (cos q)")
    cos2 = _fourier_tail(ratio_sq, 2.0, "c_psi_h_1 tail (cos 2q)")
    return 16.0 * (head + 0.375 * algebraic - 0.5 * cos1 + 0.125 * cos2) / math.pi


def c_psi_h_0(exponent: LevyExponent, h: float) -> float:
    """
    (1/pi) integral_0^inf (1 - cos ph) / psi(p) dp.

    Integrated in q = ph with psi(q/h) normalised by psi(1/h), which keeps
    the integrand of order one for every h.
    """
    h = _check_h(h)
    return _scaled_0(exponent, h) / (h * exponent.psi(1.0 / h))


def c_psi_h_1(exponent: LevyExponent, h: float) -> float:
    """(16/pi) integral_0^inf sin^4(hp/2) / psi^2(p) dp."""
    h = _check_h(h)
    return _scaled_1(exponent, h) / (h * exponent.psi(1.0 / h) ** 2)


def scaled_constants(exponent: LevyExponent, h: float) -> tuple[float, float]:
    """(h psi(1/h) c_{psi,h,0}, h psi^2(1/h) c_{psi,h,1})."""
    h = _check_h(h)
    return _scaled_0(exponent, h), _scaled_1(exponent, h)


# ============================================================================
# Limit table
# ============================================================================

@dataclass
class ConstantsRow:
    """Constants at one h."""
    h: float
    c_psi_h_0: float
    c_psi_h_1: float
    scaled_0: float
    scaled_1: float


@dataclass
class ConstantsTable:
    """Scaled constants over an h schedule with convergence diagnostics."""
    exponent: str
    beta: float
    c_beta_0: float
    c_beta_1: float
    rows: list[ConstantsRow] = field(default_factory=list)
    differences_0: list[float] = field(default_factory=list)
    differences_1: list[float] = field(default_factory=list)
    rates_0: list[float] = field(default_factory=list)
    rates_1: list[float] = field(default_factory=list)
    extrapolated_0: float = float("nan")
    extrapolated_1: float = float("nan")
    monotone_0: bool = False
    monotone_1: bool = False

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(row) for row in self.rows])

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        def clean(values):
            return [v if math.isfinite(v) else None for v in values]

        return {
            "exponent": self.exponent,
            "beta": self.beta,
            "c_beta_0": self.c_beta_0,
            "c_beta_1": self.c_beta_1,
            "rows": [vars(row) for row in self.rows],
            "differences_0": clean(self.differences_0),
            "differences_1": clean(self.differences_1),
            "rates_0": clean(self.rates_0),
            "rates_1": clean(self.rates_1),
            "extrapolated_0": clean([self.extrapolated_0])[0],
            "extrapolated_1": clean([self.extrapolated_1])[0],
            "monotone_0": self.monotone_0,
            "monotone_1": self.monotone_1,
        }


def _monotone_approach(values: list[float], target: float) -> bool:
    gaps = [abs(v - target) for v in values]
    return all(b <= a for a, b in zip(gaps, gaps[1:]))


def limit_table(exponent: LevyExponent, h_schedule: Sequence[float], threads=1) -> ConstantsTable:
    """
    Scaled constants along a strictly decreasing h schedule.

    Args:
        exponent: Levy exponent.
        h_schedule: Strictly decreasing positive steps.
        threads: Worker count; rows are merged in schedule order.

    Returns:
        ConstantsTable with successive differences, observed rates,
        Aitken-extrapolated limits and monotone-approach flags against the
        constants at beta_infinity.

    Raises:
        ConstantsError: For an empty or non-decreasing schedule.
    """
    hs = [_check_h(h) for h in h_schedule]
    if not hs:
        raise ConstantsError("h schedule must be nonempty")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ConstantsError(f"h schedule must be strictly decreasing, got {hs}")

    beta = exponent.beta_infinity
    table = ConstantsTable(
        exponent=exponent.spec(), beta=beta, c_beta_0=c_beta_0(beta), c_beta_1=c_beta_1(beta)
    )

    def row_for(h: float) -> ConstantsRow:
        psi_h = exponent.psi(1.0 / h)
        scaled_0, scaled_1 = scaled_constants(exponent, h)
        return ConstantsRow(
            h=h,
            c_psi_h_0=scaled_0 / (h * psi_h),
            c_psi_h_1=scaled_1 / (h * psi_h ** 2),
            scaled_0=scaled_0,
            scaled_1=scaled_1,
        )

    table.rows = ordered_map(row_for, hs, threads)

    s0 = [r.scaled_0 for r in table.rows]
    s1 = [r.scaled_1 for r in table.rows]
    table.differences_0 = [b - a for a, b in zip(s0, s0[1:])]
    table.differences_1 = [b - a for a, b in zip(s1, s1[1:])]
    table.rates_0 = StatisticalAnalyzer.observed_rates(hs, [v - table.c_beta_0 for v in s0])
    table.rates_1 = StatisticalAnalyzer.observed_rates(hs, [v - table.c_beta_1 for v in s1])
    table.extrapolated_0 = StatisticalAnalyzer.aitken(s0)
    table.extrapolated_1 = StatisticalAnalyzer.aitken(s1)
    table.monotone_0 = _monotone_approach(s0, table.c_beta_0)
    table.monotone_1 = _monotone_approach(s1, table.c_beta_1)

    logger.info(
        f"Constants for {table.exponent}: scaled_0 -> {s0[-1]:.6g} "
        f"(target {table.c_beta_0:.6g}), scaled_1 -> {s1[-1]:.6g} (target {table.c_beta_1:.6g})"
    )
    return table


def write_table(table: ConstantsTable, out_dir: Path) -> tuple[Path, Path]:
    """Write constants.csv and constants.json into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "constants.csv"
    json_path = out_dir / "constants.json"
    table.to_frame().to_csv(csv_path, index=False, float_format="%.17g")
    json_path.write_text(json.dumps(table.to_dict(), indent=2))
    return csv_path, json_path
