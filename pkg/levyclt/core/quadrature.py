"""
Thin wrappers around QUADPACK and Gauss-Legendre rules.

scipy.integrate.quad is used for everything adaptive:
- QAGS / QAGI for smooth integrands with endpoint singularities
- QAWO for cosine/sine weighted integrals on finite ranges
- QAWF for cosine/sine weighted integrals on [a, inf)

Each call returns a QuadResult instead of a bare float so that callers can
tell a converged value from a best effort.  Time integrals with an
integrable singularity at s = 0 are handled with dyadic panels and a fixed
Gauss-Legendre rule on each panel.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate as sp_integrate

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 200
DEFAULT_LIMLST = 200


class QuadratureError(RuntimeError):
    """Raised when an integral fails to converge or is not finite."""
    pass


@dataclass(frozen=True)
class QuadResult:
    """Value and error estimate of a single quadrature."""
    value: float
    abserr: float
    converged: bool
    message: str = ""

    def require(self, context: str) -> float:
        """
        Return the value or raise if the quadrature did not converge.

        Args:
            context: Description used in the error message.

        Raises:
            QuadratureError: If the result is unconverged or not finite.
        """
        if not self.converged or not math.isfinite(self.value):
            raise QuadratureError(
                f"{context}: quadrature failed (value={self.value}, "
                f"abserr={self.abserr}, {self.message or 'not finite'})"
            )
        return self.value


def _wrap(raw: tuple, epsabs: float, epsrel: float) -> QuadResult:
    # full_output=1 yields 3 items on success, 4 or 5 when QUADPACK flags ier
    value, abserr = float(raw[0]), float(raw[1])
    message = raw[3] if len(raw) > 3 else ""
    converged = len(raw) == 3
    if not converged and math.isfinite(abserr):
        # roundoff flags are common once the requested tolerance is reached
        converged = abserr <= 10.0 * max(epsabs, epsrel * abs(value))
    if not math.isfinite(value):
        converged = False
    return QuadResult(value=value, abserr=abserr, converged=converged, message=str(message))


def integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    epsabs: float = 1e-10,
    epsrel: float = 1e-10,
    limit: int = DEFAULT_LIMIT,
    points: Optional[list[float]] = None,
) -> QuadResult:
    """
    Adaptive Gauss-Kronrod integral of func over [a, b].

    Either bound may be infinite (QAGI).  Breakpoints are only honoured on
    finite ranges.
    """
    kwargs = {"epsabs": epsabs, "epsrel": epsrel, "limit": limit, "full_output": 1}
    if points and math.isfinite(a) and math.isfinite(b):
        kwargs["points"] = points
    raw = sp_integrate.quad(func, a, b, **kwargs)
    return _wrap(raw, epsabs, epsrel)


def integrate_oscillatory(
    func: Callable[[float], float],
    a: float,
    b: float,
    omega: float,
    kind: str = "cos",
    epsabs: float = 1e-10,
    epsrel: float = 1e-10,
    limit: int = DEFAULT_LIMIT,
    limlst: int = DEFAULT_LIMLST,
) -> QuadResult:
    """
    Integral of func(p) * cos(omega p) (or sin) over [a, b].

    A finite b selects QAWO, b = inf selects QAWF.  QAWF only honours the
    absolute tolerance.

    Args:
        func: Non-oscillatory amplitude.
        a: Lower bound.
        b: Upper bound, possibly np.inf.
        omega: Angular frequency; must be nonzero.
        kind: "cos" or "sin".

    Raises:
        ValueError: For omega == 0 or an unknown kind.
    """
    if kind not in ("cos", "sin"):
        raise ValueError(f"Unknown oscillatory weight '{kind}'")
    if omega == 0:
        raise ValueError("Oscillatory quadrature needs a nonzero frequency")

    if math.isinf(b):
        raw = sp_integrate.quad(
            func, a, b, weight=kind, wvar=omega,
            epsabs=epsabs, limlst=limlst, limit=limit, full_output=1,
        )
        return _wrap(raw, epsabs, 0.0)

    raw = sp_integrate.quad(
        func, a, b, weight=kind, wvar=omega,
        epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1,
    )
    return _wrap(raw, epsabs, epsrel)


@lru_cache(maxsize=16)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


def gauss_legendre(func: Callable[[float], float], a: float, b: float, n: int = 8) -> float:
    """Fixed n-point Gauss-Legendre rule on [a, b]; func is called per node."""
    nodes, weights = _legendre(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(sum(w * func(mid + half * x) for x, w in zip(nodes, weights)))


def dyadic_panels(length: float, depth: int) -> list[tuple[float, float]]:
    """
    Panels [length 2^-(k+1), length 2^-k] for k = 0 .. depth-1.

    The uncovered head is [0, length 2^-depth].
    """
    return [(length * 2.0 ** -(k + 1), length * 2.0 ** -k) for k in range(depth)]


def singular_time_integral(
    func: Callable[[float], float],
    t: float,
    depth: int = 20,
    nodes: int = 8,
) -> tuple[float, float]:
    """
    Integral of func over [t 2^-depth, t] on dyadic panels.

    Suitable for integrands behaving like s^(-1/beta) at s = 0.

    Returns:
        Tuple of (body integral, head cutoff t 2^-depth).  The caller
        accounts for [0, head] separately, usually in closed spectral form.
    """
    body = 0.0
    for lo, hi in dyadic_panels(t, depth):
        body += gauss_legendre(func, lo, hi, nodes)
    return body, t * 2.0 ** -depth
