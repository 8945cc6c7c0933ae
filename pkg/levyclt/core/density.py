"""
Transition densities of symmetric Levy processes by Fourier inversion.

For a symmetric exponent psi the density of X_s is the cosine transform

    p_s(x) = (1/pi) * integral_0^inf cos(p x) exp(-s psi(p)) dp.

The integrand is smooth, decaying and oscillatory.  It is truncated at the
frequency P_max(s) where exp(-s psi) drops below 1e-16 and integrated with
QUADPACK's QAWO rule, which handles the oscillation with Chebyshev moments
instead of resolving every period.

Besides the density itself the evaluator provides the first and second
spatial differences, their time integrals u, v, w over [0, 1], and a few
identities (mass, Chapman-Kolmogorov, occupation mass) used as oracles.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from levyclt.core.exponent import LevyExponent
from levyclt.core.quadrature import (
    QuadratureError,
    gauss_legendre,
    integrate,
    integrate_oscillatory,
    singular_time_integral,
)

logger = logging.getLogger(__name__)

# exp(-s psi(P_max)) <= 1e-16
CUTOFF_EXPONENT = 16.0 * math.log(10.0)

# Depth of the dyadic time panels used for |.|-valued time integrals
TIME_PANEL_DEPTH = 14
TIME_PANEL_NODES = 8

# Frequencies beyond P_max(s1) * 10^8 are summed in closed power-law form
TAIL_DECADES = 8.0
TAIL_LIMIT = 1000


class DensityError(RuntimeError):
    """Raised when a density functional cannot be evaluated reliably."""
    pass


def _spectral_kernel(psi: float, s0: float, s1: float) -> float:
    """(exp(-s0 psi) - exp(-s1 psi)) / psi, continuous at psi = 0."""
    if psi == 0.0:
        return s1 - s0
    return math.exp(-s0 * psi) * -math.expm1(-(s1 - s0) * psi) / psi


@dataclass(frozen=True)
class DensityEvaluator:
    """
    Quadrature engine for p_s(x) and its finite differences.

    Attributes:
        exponent: Levy exponent of the process.
        abs_tol: Absolute tolerance of every density value.
    """
    exponent: LevyExponent
    abs_tol: float = 1e-9

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def cutoff(self, s: float) -> float:
        """Frequency P_max(s) beyond which exp(-s psi) < 1e-16."""
        if not s > 0:
            raise ValueError(f"Time s must be positive, got {s}")
        return self.exponent.inverse(CUTOFF_EXPONENT / s)

    def _cosine_transform(self, amplitude, x: float, upper: float, context: str) -> float:
        """integral_0^upper amplitude(p) cos(p x) dp for x >= 0."""
        tol = self.abs_tol * math.pi / 10.0
        if x == 0.0:
            result = integrate(amplitude, 0.0, upper, epsabs=tol, epsrel=1e-10)
        else:
            result = integrate_oscillatory(
                amplitude, 0.0, upper, omega=x, kind="cos", epsabs=tol, epsrel=1e-10
            )
        if not result.converged and result.abserr > self.abs_tol * math.pi:
            raise DensityError(
                f"{context}: cosine transform did not converge "
                f"(abserr={result.abserr:.3e}, {result.message})"
            )
        return result.value

    def _check_time(self, s: float) -> None:
        if not s > 0 or not math.isfinite(s):
            raise ValueError(f"Time s must be positive and finite, got {s}")

    def _check_step(self, h: float) -> None:
        if not h > 0 or not math.isfinite(h):
            raise ValueError(f"Step h must be positive and finite, got {h}")

    # ------------------------------------------------------------------
    # Densities and differences
    # ------------------------------------------------------------------

    def density(self, s: float, x: float) -> float:
        """
        Transition density p_s(x).

        Evaluated on |x| so that p_s(x) == p_s(-x) holds exactly.  Negative
        lobes within abs_tol are clamped to zero.

        Raises:
            ValueError: If s <= 0.
            DensityError: If the quadrature fails or returns a clearly
                negative value.
        """
        self._check_time(s)
        x = abs(float(x))
        psi = self.exponent.psi

        value = self._cosine_transform(
            lambda p: math.exp(-s * psi(p)), x, self.cutoff(s), f"p_{s}({x})"
        ) / math.pi

        if value < 0:
            if value < -self.abs_tol:
                raise DensityError(
                    f"Density p_{s}({x}) = {value:.3e} is negative beyond tolerance"
                )
            logger.warning(f"Clamping negative density lobe p_{s}({x}) = {value:.3e} to 0")
            value = 0.0
        return value

    def delta_h(self, s: float, x: float, h: float) -> float:
        """First difference p_s(x + h) - p_s(x)."""
        self._check_step(h)
        return self.density(s, x + h) - self.density(s, x)

    def delta_h_spectral(self, s: float, x: float, h: float) -> float:
        """
        First difference from its sine representation

            -(2/pi) integral_0^inf sin(p (x + h/2)) sin(p h/2) exp(-s psi(p)) dp.
        """
        self._check_time(s)
        self._check_step(h)
        centre = x + h / 2.0
        if centre == 0.0:
            return 0.0
        psi = self.exponent.psi
        sign = 1.0 if centre > 0 else -1.0
        result = integrate_oscillatory(
            lambda p: math.sin(p * h / 2.0) * math.exp(-s * psi(p)),
            0.0,
            self.cutoff(s),
            omega=abs(centre),
            kind="sin",
            epsabs=self.abs_tol * math.pi / 10.0,
            epsrel=1e-10,
        )
        value = result.require(f"delta_h spectral at s={s}, x={x}, h={h}")
        return -2.0 * sign * value / math.pi

    def second_diff(self, s: float, x: float, h: float) -> float:
        """
        2 p_s(x) - p_s(x + h) - p_s(x - h) from its spectral form

            (4/pi) integral_0^inf cos(p x) sin^2(h p / 2) exp(-s psi(p)) dp.
        """
        self._check_time(s)
        self._check_step(h)
        psi = self.exponent.psi
        value = self._cosine_transform(
            lambda p: math.sin(h * p / 2.0) ** 2 * math.exp(-s * psi(p)),
            abs(float(x)),
            self.cutoff(s),
            f"second difference at s={s}, x={x}, h={h}",
        )
        return 4.0 * value / math.pi

    def second_diff_direct(self, s: float, x: float, h: float) -> float:
        """Three-point form of the second difference."""
        self._check_step(h)
        return 2.0 * self.density(s, x) - self.density(s, x + h) - self.density(s, x - h)

    # ------------------------------------------------------------------
    # Time integrals
    # ------------------------------------------------------------------

    def time_integrated_density(self, x: float, s0: float, s1: float) -> float:
        """
        integral_{s0}^{s1} p_s(x) ds from its frequency form

            (1/pi) integral_0^inf cos(p x) (exp(-s0 psi) - exp(-s1 psi)) / psi dp.

        Args:
            x: Spatial point.
            s0: Lower time, >= 0.
            s1: Upper time, finite and > s0.
        """
        if not (0.0 <= s0 < s1) or not math.isfinite(s1):
            raise ValueError(f"Need 0 <= s0 < s1 < inf, got s0={s0}, s1={s1}")
        x = abs(float(x))
        if x == 0.0:
            total = self._origin_time_integral(s0, s1)
        else:
            total = self._offset_time_integral(x, s0, s1)

        value = total / math.pi
        if value < 0:
            if value < -self.abs_tol:
                raise DensityError(
                    f"Time integral of p_s({x}) over [{s0}, {s1}] = {value:.3e} "
                    f"is negative beyond tolerance"
                )
            logger.debug(f"Clamping time integral {value:.3e} at x={x} to 0")
            value = 0.0
        return value

    def _origin_time_integral(self, s0: float, s1: float) -> float:
        """
        integral_0^inf (exp(-s0 psi) - exp(-s1 psi)) / psi dp.

        The amplitude is flat at s1 - s0 up to the knee psi^-1(1/s1) and
        decays like exp(-s0 psi) / psi beyond it.  The decay is integrated in
        the log frequency u = log(p / knee); for s0 = 0 the range is closed
        with integral_Q^inf dp / psi = Q / ((beta - 1) psi(Q)).
        """
        psi = self.exponent.psi
        tol = self.abs_tol * math.pi / 10.0
        knee = self.exponent.inverse(1.0 / s1)

        def amplitude(p: float) -> float:
            return _spectral_kernel(psi(p), s0, s1)

        head = integrate(amplitude, 0.0, knee, epsabs=tol, epsrel=1e-10).require(
            f"time integral head on [{s0}, {s1}]"
        )

        points = None
        if s0 > 0:
            upper = max(self.cutoff(s0), knee)
            closure = 0.0
            points = [math.log(self.exponent.inverse(1.0 / s0) / knee)]
        else:
            upper = self.cutoff(s1) * 10.0 ** TAIL_DECADES
            closure = upper / ((self.exponent.beta_infinity - 1.0) * psi(upper))

        span = math.log(upper / knee)
        if span <= 0:
            return head + closure

        def log_amplitude(u: float) -> float:
            p = knee * math.exp(u)
            return amplitude(p) * p

        if points is not None and not 0.0 < points[0] < span:
            points = None
        tail = integrate(
            log_amplitude, 0.0, span, epsabs=tol, epsrel=1e-10, limit=TAIL_LIMIT, points=points
        ).require(f"time integral tail on [{s0}, {s1}]")
        return head + tail + closure

    def _offset_time_integral(self, x: float, s0: float, s1: float) -> float:
        """
        integral_0^inf cos(p x) (exp(-s0 psi) - exp(-s1 psi)) / psi dp for x > 0.

        The cosine weight is handled by QAWO up to P_max of the window and
        by QAWF on the 1/psi tail that remains when s0 = 0.
        """
        psi = self.exponent.psi
        tol = self.abs_tol * math.pi / 10.0

        def amplitude(p: float) -> float:
            return _spectral_kernel(psi(p), s0, s1)

        upper = self.cutoff(s0) if s0 > 0 else self.cutoff(s1)
        body = integrate_oscillatory(
            amplitude, 0.0, upper, omega=x, kind="cos", epsabs=tol, epsrel=1e-10, limit=TAIL_LIMIT
        ).require(f"time integral at x={x} on [{s0}, {s1}]")
        if s0 > 0:
            return body

        tail = integrate_oscillatory(
            lambda p: 1.0 / psi(p), upper, np.inf, omega=x, kind="cos", epsabs=tol
        ).require(f"time integral tail at x={x}")
        return body + tail

    def u_integral(self, x: float) -> float:
        """u(x) = integral_0^1 p_s(x) ds."""
        return self.time_integrated_density(x, 0.0, 1.0)

    def v_integral(self, x: float, h: float) -> float:
        """
        v(x) = integral_0^1 |p_s(x + h) - p_s(x)| ds.

        Symmetric mixtures of stable laws are unimodal, so the first
        difference keeps the sign of |x| - |x + h| for every s and the
        absolute value can be taken after the time integration.
        """
        self._check_step(h)
        return abs(self.u_integral(x + h) - self.u_integral(x))

    def signed_second_diff_integral(self, x: float, h: float, s0: float, s1: float) -> float:
        """integral_{s0}^{s1} (2 p_s(x) - p_s(x+h) - p_s(x-h)) ds."""
        return (
            2.0 * self.time_integrated_density(x, s0, s1)
            - self.time_integrated_density(x + h, s0, s1)
            - self.time_integrated_density(x - h, s0, s1)
        )

    def w_integral(self, x: float, h: float) -> float:
        """
        w(x) = integral_0^1 |2 p_s(x) - p_s(x+h) - p_s(x-h)| ds.

        The second difference may change sign in s, so the body is integrated
        on dyadic panels; the short head [0, 2^-depth] is taken in closed
        spectral form.
        """
        self._check_step(h)
        if x == 0.0:
            # nonnegative for every s at the origin
            return max(self.signed_second_diff_integral(0.0, h, 0.0, 1.0), 0.0)

        body, head = singular_time_integral(
            lambda s: abs(self.second_diff(s, x, h)),
            1.0,
            depth=TIME_PANEL_DEPTH,
            nodes=TIME_PANEL_NODES,
        )
        return body + abs(self.signed_second_diff_integral(x, h, 0.0, head))

    # ------------------------------------------------------------------
    # Identities
    # ------------------------------------------------------------------

    def _sine_mass(self, amplitude, x_max: float, upper: float, context: str) -> float:
        """(2/pi) integral_0^upper sin(p x_max) amplitude(p) / p dp."""
        tol = self.abs_tol * math.pi / 10.0
        split = math.pi / x_max
        head = integrate(
            lambda p: x_max * np.sinc(p * x_max / math.pi) * amplitude(p),
            0.0,
            min(split, upper),
            epsabs=tol,
            epsrel=1e-10,
        ).require(f"{context} head")
        if upper <= split:
            return 2.0 * head / math.pi
        tail = integrate_oscillatory(
            lambda p: amplitude(p) / p, split, upper, omega=x_max, kind="sin",
            epsabs=tol, epsrel=1e-10, limit=1000,
        ).require(f"{context} tail")
        return 2.0 * (head + tail) / math.pi

    def _tail_estimate(self, value_at_edge: float, x_max: float) -> float:
        # p(x) ~ x^(-1-beta) beyond the window: 2 integral_X^inf = 2 X p(X) / beta
        return 2.0 * x_max * value_at_edge / self.exponent.beta_infinity

    def total_mass(self, s: float, x_max: float = 1000.0) -> float:
        """
        integral p_s(x) dx over [-x_max, x_max] plus a power-law tail estimate.

        Should equal 1 up to quadrature and tail error.
        """
        self._check_time(s)
        psi = self.exponent.psi
        window = self._sine_mass(
            lambda p: math.exp(-s * psi(p)), x_max, self.cutoff(s) + math.pi / x_max,
            f"mass of p_{s}",
        )
        return window + self._tail_estimate(self.density(s, x_max), x_max)

    def occupation_mass(self, t: float, x_max: float = 1000.0) -> float:
        """integral integral_0^t p_s(x) ds dx; equals t."""
        self._check_time(t)
        psi = self.exponent.psi
        tol = self.abs_tol * math.pi / 10.0

        def amplitude(p: float) -> float:
            return _spectral_kernel(psi(p), 0.0, t)

        split = math.pi / x_max
        head = integrate(
            lambda p: x_max * np.sinc(p * x_max / math.pi) * amplitude(p),
            0.0, split, epsabs=tol, epsrel=1e-10,
        ).require("occupation mass head")
        tail = integrate_oscillatory(
            lambda p: amplitude(p) / p, split, np.inf, omega=x_max, kind="sin", epsabs=tol,
        ).require("occupation mass tail")
        window = 2.0 * (head + tail) / math.pi
        edge = self.time_integrated_density(x_max, 0.0, t)
        return window + self._tail_estimate(edge, x_max)

    def chapman_kolmogorov(
        self, s: float, t: float, x: float, half_width: Optional[float] = None
    ) -> tuple[float, float]:
        """
        Both sides of integral p_s(y) p_t(x - y) dy = p_{s+t}(x).

        The convolution is integrated over a window centred at x/2 whose
        default half-width is 40 natural length scales.

        Returns:
            Tuple (convolution, p_{s+t}(x)).
        """
        self._check_time(s)
        self._check_time(t)
        if half_width is None:
            scale = 1.0 / self.exponent.inverse(1.0 / max(s, t))
            half_width = 40.0 * max(scale, 1.0)
        centre = x / 2.0
        result = integrate(
            lambda y: self.density(s, y) * self.density(t, x - y),
            centre - half_width,
            centre + half_width,
            epsabs=self.abs_tol,
            epsrel=1e-8,
            points=[0.0, x] if x != 0 else [0.0],
        )
        lhs = result.require(f"Chapman-Kolmogorov at s={s}, t={t}, x={x}")
        return lhs, self.density(s + t, x)

    def c_psi_h_0_time_domain(self, h: float, head_depth: int = 12, tail_depth: int = 6) -> float:
        """
        integral_0^inf (p_s(0) - p_s(h)) ds evaluated in time.

        The body [2^-head_depth, 2^tail_depth] is integrated on dyadic panels
        from density values; the head and the tail beyond 2^tail_depth are
        closed frequency integrals.
        """
        self._check_step(h)
        psi = self.exponent.psi
        tol = self.abs_tol * math.pi / 10.0
        s_head = 2.0 ** -head_depth
        s_tail = 2.0 ** tail_depth

        def difference(s: float) -> float:
            return self.density(s, 0.0) - self.density(s, h)

        body = 0.0
        lo = s_head
        while lo < s_tail:
            hi = 2.0 * lo
            body += gauss_legendre(difference, lo, hi, TIME_PANEL_NODES)
            lo = hi

        head = self.signed_second_diff_integral(0.0, h, 0.0, s_head) / 2.0

        def tail_amplitude(p: float) -> float:
            value = psi(p)
            if value == 0.0:
                return 0.0
            return 2.0 * math.sin(p * h / 2.0) ** 2 * math.exp(-s_tail * value) / value

        tail = integrate(
            tail_amplitude, 0.0, self.cutoff(s_tail), epsabs=tol, epsrel=1e-10
        ).require("time-domain constant tail")
        return body + head + tail / math.pi


# ============================================================================
# Module-level operations
# ============================================================================

def density(ev: DensityEvaluator, s: float, x: float) -> float:
    """p_s(x)."""
    return ev.density(s, x)


def delta_h(ev: DensityEvaluator, s: float, x: float, h: float) -> float:
    """p_s(x + h) - p_s(x)."""
    return ev.delta_h(s, x, h)


def second_diff(ev: DensityEvaluator, s: float, x: float, h: float) -> float:
    """2 p_s(x) - p_s(x + h) - p_s(x - h), spectral form."""
    return ev.second_diff(s, x, h)


def u_integral(ev: DensityEvaluator, x: float) -> float:
    return ev.u_integral(x)


def v_integral(ev: DensityEvaluator, x: float, h: float) -> float:
    return ev.v_integral(x, h)


def w_integral(ev: DensityEvaluator, x: float, h: float) -> float:
    return ev.w_integral(x, h)


__all__ = [
    "DensityError",
    "DensityEvaluator",
    "QuadratureError",
    "delta_h",
    "density",
    "second_diff",
    "u_integral",
    "v_integral",
    "w_integral",
]
