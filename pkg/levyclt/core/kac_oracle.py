"""
Exact moments of local-time functionals from Kac's moment formula.

For points x_1..x_m and a start z,

    E^z[prod_i L^{x_i}_t]
        = sum over permutations pi of
          integral_{r_1 + ... + r_m <= t} prod_j p_{r_j}(x_{pi(j)} - x_{pi(j-1)}) dr,

with x_{pi(0)} = z.  Each permutation term is a chain of densities over the
time simplex, evaluated recursively: the innermost time integral is the
closed frequency form of integral_0^tau p_r(d) dr, and every outer level is
integrated on dyadic panels that isolate the r^(-1/beta) singularity at
both ends.

Quadratic functionals collapse further after integrating out space:

    E[alpha_t]           = 2 integral_0^t (t - r) p_r(0) dr
    E[J_h(t)]            = 4 integral_0^t (t - r) (p_r(0) - p_r(h)) dr

and both have exact frequency forms.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from levyclt.core.constants import c_beta_0, c_beta_1, c_psi_h_0
from levyclt.core.density import DensityEvaluator
from levyclt.core.exponent import LevyExponent
from levyclt.core.quadrature import (
    dyadic_panels,
    gauss_legendre,
    integrate,
    integrate_oscillatory,
    singular_time_integral,
)

logger = logging.getLogger(__name__)

MAX_ORDER = 3

# (panel depth, nodes per panel) by moment order
_CHAIN_RULES = {1: (16, 8), 2: (16, 8), 3: (10, 6)}

SERIES_THRESHOLD = 1e-3

# Log-frequency span of the kernel tails before the closed power-law form
TAIL_DECADES = 8.0
TAIL_LIMIT = 1000


class KacOracleError(ValueError):
    """Raised for moment requests outside the supported range."""
    pass


def _check_t(t: float) -> float:
    t = float(t)
    if not (0.0 < t <= 1.0):
        raise KacOracleError(f"t must lie in (0, 1], got {t}")
    return t


def _check_h(h: float) -> float:
    h = float(h)
    if not h > 0 or not math.isfinite(h):
        raise KacOracleError(f"h must be positive and finite, got {h}")
    return h


@dataclass(frozen=True)
class MomentRequest:
    """
    A mixed moment E^z[prod_i L^{x_i}_t] with terminal weight 1.

    Attributes:
        exponent: Levy exponent.
        t: Horizon in (0, 1].
        points: Levels x_1..x_m, 1 <= m <= 3.
        start: Starting point z.
    """
    exponent: LevyExponent
    t: float
    points: tuple[float, ...]
    start: float = 0.0

    def __post_init__(self):
        _check_t(self.t)
        if not 1 <= len(self.points) <= MAX_ORDER:
            raise KacOracleError(
                f"Kac moments are supported for 1 <= m <= {MAX_ORDER}, got m={len(self.points)}"
            )
        object.__setattr__(self, "points", tuple(float(x) for x in self.points))

    @property
    def order(self) -> int:
        return len(self.points)


class _ChainIntegrator:
    """Time-simplex integrals of density chains with memoized terms."""

    def __init__(self, ev: DensityEvaluator, depth: int, nodes: int):
        self.ev = ev
        self.depth = depth
        self.nodes = nodes
        self._cache: dict[tuple[tuple[float, ...], float], float] = {}

    def chain(self, displacements: tuple[float, ...], tau: float) -> float:
        """integral_{r_1 + ... + r_k <= tau} prod_j p_{r_j}(d_j) dr."""
        key = (displacements, tau)
        if key in self._cache:
            return self._cache[key]

        first = displacements[0]
        if len(displacements) == 1:
            value = self.ev.time_integrated_density(first, 0.0, tau)
            self._cache[key] = value
            return value

        rest = displacements[1:]
        depth, nodes = self.depth, self.nodes
        half = tau / 2.0

        # r near 0: density singular, remaining chain smooth
        def near_start(r: float) -> float:
            return self.ev.density(r, first) * self.chain(rest, tau - r)

        lower, cutoff = singular_time_integral(near_start, half, depth=depth, nodes=nodes)
        lower_head = self.chain(rest, tau) * self.ev.time_integrated_density(first, 0.0, cutoff)

        # r near tau: remaining chain vanishes like sigma^(1 - 1/beta)
        def near_end(sigma: float) -> float:
            return self.ev.density(tau - sigma, first) * self.chain(rest, sigma)

        upper = 0.0
        for lo, hi in dyadic_panels(half, depth):
            upper += gauss_legendre(near_end, lo, hi, nodes)
        upper_head = 0.5 * cutoff * self.ev.density(tau, first) * self.chain(rest, cutoff)

        value = lower + lower_head + upper + upper_head
        self._cache[key] = value
        return value


def kac_moment(req: MomentRequest, ev: Optional[DensityEvaluator] = None) -> float:
    """
    E^z[prod_i L^{x_i}_t] by Kac's moment formula.

    Permutation terms are evaluated independently, memoized by their
    displacement tuples and summed in lexicographic permutation order.

    Args:
        req: Moment request.
        ev: Density evaluator; built from req.exponent when omitted.

    Returns:
        The moment, clamped at 0 from below.
    """
    ev = ev or DensityEvaluator(req.exponent)
    integrator = _ChainIntegrator(ev, *_CHAIN_RULES[req.order])

    total = 0.0
    for perm in itertools.permutations(range(req.order)):
        previous = req.start
        displacements = []
        for index in perm:
            displacements.append(req.points[index] - previous)
            previous = req.points[index]
        total += integrator.chain(tuple(displacements), req.t)

    logger.debug(f"Kac moment m={req.order} at t={req.t}: {total:.10g}")
    return max(total, 0.0)


# ============================================================================
# Quadratic functionals
# ============================================================================

def _alpha_kernel(psi: float, t: float) -> float:
    """t/psi - (1 - exp(-t psi))/psi^2, continuous at psi = 0."""
    x = t * psi
    if x < SERIES_THRESHOLD:
        return t * t * (0.5 - x / 6.0 + x * x / 24.0)
    return t * t * (x + math.expm1(-x)) / (x * x)


def _alpha_kernel_integral(exponent: LevyExponent, t: float) -> float:
    """
    integral_0^inf K_t(p) dp with K_t the alpha kernel.

    K_t is flat at t^2/2 up to the knee psi^-1(1/t) and decays like t/psi
    beyond it; the decay is integrated in log frequency and closed in power
    form past Q = knee 10^TAIL_DECADES.
    """
    psi = exponent.psi
    beta = exponent.beta_infinity
    knee = exponent.inverse(1.0 / t)

    def kernel(p: float) -> float:
        return _alpha_kernel(psi(p), t)

    head = integrate(kernel, 0.0, knee, epsabs=1e-12, epsrel=1e-11).require("alpha kernel head")
    span = TAIL_DECADES * math.log(10.0)
    tail = integrate(
        lambda u: kernel(knee * math.exp(u)) * knee * math.exp(u),
        0.0, span, epsabs=1e-12, epsrel=1e-11, limit=TAIL_LIMIT,
    ).require("alpha kernel tail")
    q = knee * math.exp(span)
    psi_q = psi(q)
    closure = t * q / ((beta - 1.0) * psi_q) - q / ((2.0 * beta - 1.0) * psi_q ** 2)
    return head + tail + closure


def _sinc_sq(u: float) -> float:
    """(sin u / u)^2."""
    return float(np.sinc(u / math.pi)) ** 2


def _cosine_tail(amplitude, a: float, omega: float) -> float:
    """integral_a^inf amplitude(p) cos(omega p) dp for a decaying amplitude."""
    if omega == 0.0:
        return integrate(amplitude, a, np.inf, epsabs=1e-13, epsrel=1e-11).require("binned kernel tail")
    return integrate_oscillatory(
        amplitude, a, np.inf, omega=omega, kind="cos", epsabs=1e-13
    ).require(f"binned kernel tail at frequency {omega:g}")


def _binned_kernel_cosine(exponent: LevyExponent, t: float, omega: float, bin_width: float) -> float:
    """
    integral_0^inf cos(omega p) sinc^2(p eps / 2) K_t(p) dp with eps = bin_width.

    Up to one period 2 pi / eps of the window the product is integrated
    directly.  Beyond it sinc^2(p eps / 2) = 2 (1 - cos(eps p)) / (eps p)^2
    and the cosine products split into three Fourier tails.
    """
    psi = exponent.psi
    split = 2.0 * math.pi / bin_width

    def windowed(p: float) -> float:
        return math.cos(omega * p) * _sinc_sq(p * bin_width / 2.0) * _alpha_kernel(psi(p), t)

    head = integrate(windowed, 0.0, split, epsabs=1e-13, epsrel=1e-11, limit=TAIL_LIMIT).require(
        "binned kernel head"
    )

    def envelope(p: float) -> float:
        return 2.0 * _alpha_kernel(psi(p), t) / (bin_width * p) ** 2

    tail = (
        _cosine_tail(envelope, split, omega)
        - 0.5 * _cosine_tail(envelope, split, omega + bin_width)
        - 0.5 * _cosine_tail(envelope, split, abs(omega - bin_width))
    )
    return head + tail


def _check_bin_width(bin_width: float) -> float:
    bin_width = float(bin_width)
    if not bin_width >= 0 or not math.isfinite(bin_width):
        raise KacOracleError(f"bin_width must be nonnegative and finite, got {bin_width}")
    return bin_width


def mean_alpha(exponent: LevyExponent, t: float, bin_width: float = 0.0) -> float:
    """
    E[alpha_t] = (2/pi) integral_0^inf [t/psi - (1 - exp(-t psi))/psi^2] dp.

    Equal to 2 integral_0^t (t - r) p_r(0) dr.  With bin_width > 0 the
    result is the mean of the binned estimator with bins of that width,
    whose field is the local time smoothed by a box of width bin_width; the
    kernel then carries the factor sinc^2(p bin_width / 2).
    """
    t = _check_t(t)
    bin_width = _check_bin_width(bin_width)
    if bin_width == 0.0:
        return 2.0 * _alpha_kernel_integral(exponent, t) / math.pi
    return 2.0 * _binned_kernel_cosine(exponent, t, 0.0, bin_width) / math.pi


def mean_alpha_time_domain(
    exponent: LevyExponent, t: float, ev: Optional[DensityEvaluator] = None
) -> float:
    """2 integral_0^t (t - r) p_r(0) dr on dyadic time panels."""
    t = _check_t(t)
    ev = ev or DensityEvaluator(exponent)
    body, head = singular_time_integral(lambda r: (t - r) * ev.density(r, 0.0), t, depth=20)
    # (t - r) ~ t on the head
    head_value = t * ev.time_integrated_density(0.0, 0.0, head)
    return 2.0 * (body + head_value)


def mean_sq_increment(exponent: LevyExponent, t: float, h: float, bin_width: float = 0.0) -> float:
    """
    E integral (L^{x+h}_t - L^x_t)^2 dx from its frequency form

        (8/pi) integral_0^inf sin^2(hp/2) [t/psi - (1 - exp(-t psi))/psi^2] dp
        = 2 E[alpha_t] - (4/pi) integral_0^inf cos(hp) K_t(p) dp.

    With bin_width > 0 this is the exact mean of the binned modulus
    sum_i (L_{i+k} - L_i)^2 eps, averaged over the position of the bin
    lattice: the integrand gains the factor sinc^2(p bin_width / 2), which
    removes the frequencies the bins cannot resolve.
    """
    t = _check_t(t)
    h = _check_h(h)
    bin_width = _check_bin_width(bin_width)
    if bin_width > 0.0:
        value = 4.0 * (
            _binned_kernel_cosine(exponent, t, 0.0, bin_width)
            - _binned_kernel_cosine(exponent, t, h, bin_width)
        ) / math.pi
        return max(value, 0.0)

    psi = exponent.psi
    cosine = integrate_oscillatory(
        lambda p: _alpha_kernel(psi(p), t), 0.0, np.inf, omega=h, kind="cos", epsabs=1e-12
    ).require(f"mean square increment at h={h}")
    value = 4.0 * (_alpha_kernel_integral(exponent, t) - cosine) / math.pi
    return max(value, 0.0)


def binning_offset(exponent: LevyExponent, t: float, h: float, bin_width: float) -> float:
    """E J_h(t) of the binned estimator minus its eps -> 0 limit; negative."""
    return mean_sq_increment(exponent, t, h, bin_width) - mean_sq_increment(exponent, t, h)


def mean_sq_increment_time_domain(
    exponent: LevyExponent, t: float, h: float, ev: Optional[DensityEvaluator] = None
) -> float:
    """4 integral_0^t (t - r) (p_r(0) - p_r(h)) dr on dyadic time panels."""
    t = _check_t(t)
    h = _check_h(h)
    ev = ev or DensityEvaluator(exponent)
    body, head = singular_time_integral(
        lambda r: (t - r) * (ev.density(r, 0.0) - ev.density(r, h)), t, depth=20
    )
    head_value = t * ev.signed_second_diff_integral(0.0, h, 0.0, head) / 2.0
    return 4.0 * (body + head_value)


def g_shape(exponent: LevyExponent, h: float, t: float) -> float:
    """Remainder shape g(h, t) of the mean square increment."""
    beta = exponent.beta_infinity
    if beta > 1.5:
        return h * h * t * t * exponent.inverse(1.0 / t) ** 3
    if beta == 1.5:
        return h * h * math.log(1.0 / h)
    return 1.0 / (h * exponent.psi(1.0 / h) ** 2)


def g_bar_shape(exponent: LevyExponent, h: float) -> float:
    """Remainder shape g-bar(h) at t = 1."""
    beta = exponent.beta_infinity
    if beta > 1.5:
        return h * h
    if beta == 1.5:
        return h * h * math.log(1.0 / h)
    return 1.0 / (h * exponent.psi(1.0 / h) ** 2)


@dataclass
class MeanSqIncrementReport:
    """Both representations of E J_h(t) with its leading-order split."""
    exponent: str
    t: float
    h: float
    spectral: float
    time_domain: float
    leading: float
    remainder: float
    g: float
    g_bar: float
    remainder_ratio: float
    stable_leading: Optional[float] = None

    @property
    def agreement(self) -> float:
        return abs(self.spectral - self.time_domain)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            "exponent": self.exponent,
            "t": self.t,
            "h": self.h,
            "spectral": self.spectral,
            "time_domain": self.time_domain,
            "agreement": self.agreement,
            "leading": self.leading,
            "remainder": self.remainder,
            "g": self.g,
            "g_bar": self.g_bar,
            "remainder_ratio": self.remainder_ratio,
            "stable_leading": self.stable_leading,
        }


def mean_sq_increment_report(
    exponent: LevyExponent, t: float, h: float, ev: Optional[DensityEvaluator] = None
) -> MeanSqIncrementReport:
    """E J_h(t) in both forms, split as 4 c_{psi,h,0} t plus remainder."""
    spectral = mean_sq_increment(exponent, t, h)
    time_domain = mean_sq_increment_time_domain(exponent, t, h, ev)
    leading = 4.0 * c_psi_h_0(exponent, h) * t
    g = g_shape(exponent, h, t)
    stable_leading = None
    if exponent.is_stable:
        beta = exponent.beta_infinity
        stable_leading = 4.0 * c_beta_0(beta) * h ** (beta - 1.0) * t
    return MeanSqIncrementReport(
        exponent=exponent.spec(),
        t=t,
        h=h,
        spectral=spectral,
        time_domain=time_domain,
        leading=leading,
        remainder=spectral - leading,
        g=g,
        g_bar=g_bar_shape(exponent, h),
        remainder_ratio=abs(spectral - leading) / g,
        stable_leading=stable_leading,
    )


# ============================================================================
# Variance sizing
# ============================================================================

@dataclass
class VarianceBound:
    """The four terms bounding Var J_h(t), constant stripped."""
    t: float
    h: float
    terms: dict[str, float] = field(default_factory=dict)

    @property
    def dominant(self) -> str:
        return max(self.terms, key=self.terms.get)

    @property
    def total(self) -> float:
        return sum(self.terms.values())

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {"t": self.t, "h": self.h, "terms": self.terms,
                "dominant": self.dominant, "total": self.total}


def variance_bound_check(exponent: LevyExponent, t: float, h: float) -> VarianceBound:
    """
    Evaluate the variance bound terms for J_h(t).

    Used only to size Monte Carlo error bars.

    Raises:
        KacOracleError: For h >= 1 or t outside (0, 1].
    """
    t = _check_t(t)
    h = _check_h(h)
    if h >= 1.0:
        raise KacOracleError(f"Variance bound applies to small h only, got h={h}")
    psi_h = exponent.psi(1.0 / h)
    g = g_shape(exponent, h, t)
    terms = {
        "centering": t * g / (h * psi_h),
        "occupation": t * t * exponent.inverse(1.0 / t) / (h * psi_h ** 2),
        "cross": t / (h ** 1.5 * psi_h ** 2.5),
        "logarithmic": t * math.log(1.0 / h) / (h * h * psi_h ** 3),
    }
    return VarianceBound(t=t, h=h, terms=terms)


# ============================================================================
# Moment bound of alpha_1
# ============================================================================

def fitted_moment_constant(moment: float, n: int, beta: float) -> float:
    """C_n with E alpha_1^n = (C_n)^n ((2n)!)^(1/(2 beta))."""
    if n < 1:
        raise KacOracleError(f"Moment order must be positive, got {n}")
    scale = math.factorial(2 * n) ** (1.0 / (2.0 * beta))
    return (moment / scale) ** (1.0 / n)


def limit_variance(exponent: LevyExponent) -> float:
    """8 c_{beta,1} E[alpha_1], the variance of the mixture limit."""
    return 8.0 * c_beta_1(exponent.beta_infinity) * mean_alpha(exponent, 1.0)
