"""Mittag-Leffler functions on the real line.

Covers the one-, two- and three-parameter (Prabhakar) functions, their
derivatives in the argument, and the Rabotnov fractional exponential.
Certified evaluation is restricted to real arguments: a ball around the
origin where the power series is trusted, plus the whole negative axis when
``gamma == 1`` and ``0 < alpha < 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from ._series import EPS, rgamma, rgamma_log, sum_power_series
from .errors import (CancellationError, ConvergenceError, DivergenceError,
                     DomainError, SeriesDomainError)
from .numerics import DEFAULT_TOL, Tolerance, integrate_interval

__all__ = [
    "Method",
    "MLParams",
    "EvalResult",
    "series_bound",
    "ml_series",
    "ml",
    "ml_value",
    "ml_derivative_k",
    "rabotnov",
]


class Method(str, Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    SPECTRAL = "spectral-integral"
    CLOSED_FORM = "closed-form"
    EXTENDED = "extended-series"
    INTEGRAL = "integral"


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise DomainError(f"beta must be finite, got {self.beta}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class EvalResult:
    value: float
    est_error: float
    method: Method

    def __post_init__(self) -> None:
        if not self.est_error >= 0:
            raise ValueError("est_error must be non-negative")

    def __float__(self) -> float:
        return float(self.value)


# Past this |z|**(1/alpha) the optimally truncated asymptotic series is
# accurate to about exp(-36) relative; below it the spectral integral is used.
ASYMPTOTIC_T = 36.0
# Cancellation limit used by the dispatcher (the bare series accepts 1e8).
DISPATCH_CANCEL = 1e3
_SPECTRAL_TOL = Tolerance(abs_tol=1e-16, rel_tol=1e-12, max_subdivisions=2000)


def series_bound(alpha: float) -> float:
    return 5.0 if alpha >= 0.5 else 2.0


def _ml_coef(alpha: float, beta: float, gamma: float):
    def coef(n: np.ndarray):
        lg, sg = rgamma_log(alpha * n + beta)
        if gamma != 1.0:
            lg = lg + gammaln(gamma + n) - gammaln(gamma) - gammaln(n + 1.0)
        return lg, sg

    return coef


def ml_series(params: MLParams, z: float, tol: Tolerance = DEFAULT_TOL,
              bound: float | None = None, cancel_limit: float = 1e8) -> EvalResult:
    """Power series ``sum (gamma)_n z**n / (n! Gamma(alpha n + beta))``.

    Refuses arguments beyond ``bound`` (default: 5 for alpha >= 1/2, else 2)
    and alternating sums whose largest term exceeds ``cancel_limit`` times
    the result.
    """
    bound = series_bound(params.alpha) if bound is None else bound
    if abs(z) > bound:
        raise SeriesDomainError(f"|z|={abs(z)} exceeds the series bound {bound}; use ml()")
    s = sum_power_series(_ml_coef(params.alpha, params.beta, params.gamma), z,
                         tol.abs_tol, cancel_limit)
    return EvalResult(s.value, s.error, Method.SERIES)


def _asymptotic_terms(alpha: float, beta: float, x: float):
    # E_{a,b}(-x) ~ sum_{n>=1} (-1)^(n-1) x^-n / Gamma(b - a n)
    t = x ** (1.0 / alpha)
    n_max = int(min(2.0 * t / alpha + 20, 100_000))
    n = np.arange(1, n_max + 1, dtype=float)
    lg, sg = rgamma_log(beta - alpha * n)
    lt = lg - n * math.log(x)
    sign = sg * np.where(n % 2 == 1, 1.0, -1.0)
    return n, lt, sign


def _ml_asymptotic(alpha: float, beta: float, x: float) -> EvalResult:
    n, lt, sign = _asymptotic_terms(alpha, beta, x)
    live = sign != 0
    idx = np.flatnonzero(live)
    stop = idx[np.argmin(lt[idx])]
    terms = sign[:stop] * np.exp(np.where(live[:stop], lt[:stop], -np.inf))
    value = math.fsum(terms.tolist())
    err = math.exp(lt[stop]) + 4 * EPS * float(np.abs(terms).sum())
    return EvalResult(value, float(err), Method.ASYMPTOTIC)


def _ml_spectral(alpha: float, beta: float, x: float) -> EvalResult:
    """E_{alpha,beta}(-x), 0 < alpha < 1, from the real-axis Hankel integral.

    The contour collapses onto the negative real axis, giving a non-oscillatory
    integral over rho in (0, inf) with weight exp(-rho).  It is valid for
    beta < 1 + alpha; larger beta is lowered with the step-down recurrence.
    """
    if beta >= 1.0 + alpha:
        inner = _ml_spectral(alpha, beta - alpha, x)
        v = (rgamma(beta - alpha) - inner.value) / x
        return EvalResult(v, inner.est_error / x + EPS * abs(v), Method.SPECTRAL)
    ca = math.cos(alpha * math.pi)
    sb, sba = math.sin(beta * math.pi), math.sin((beta - alpha) * math.pi)

    def h(rho: float) -> float:
        ra = rho ** alpha
        num = ra * sb + x * sba
        den = ra * ra + 2.0 * x * ra * ca + x * x
        return math.exp(-rho) * rho ** (alpha - beta) * num / den

    t = x ** (1.0 / alpha)
    upper = 2.0 * t + 60.0
    pts = sorted({min(1.0, t / 2), t, 2.0 * t})
    sing = beta - alpha if beta > alpha else None
    tol = _SPECTRAL_TOL
    for _ in range(3):
        try:
            q = integrate_interval(h, 0.0, upper, tol, singularity=sing, points=pts)
            break
        except ConvergenceError:
            tol = Tolerance(tol.abs_tol * 100, tol.rel_tol * 100, tol.max_subdivisions)
    else:
        raise ConvergenceError(f"spectral integral failed for E_{alpha},{beta}(-{x})")
    # the dropped tail is bounded by exp(-upper) times the rational factor
    tail = math.exp(-upper) * upper ** abs(alpha - beta) * (upper ** alpha + x) / (x * x * (1 - abs(ca)) + 1e-300)
    return EvalResult(q.value / math.pi, (q.error_estimate + tail) / math.pi, Method.SPECTRAL)


def ml(params: MLParams, z: float, tol: Tolerance = DEFAULT_TOL) -> EvalResult:
    """Mittag-Leffler function on the real line with branch dispatch.

    Small |z| uses the series; the negative axis beyond it uses the
    real-axis integral or, far out, the asymptotic expansion.  Large positive
    arguments and non-unit ``gamma`` outside the series ball raise
    :class:`DomainError`.
    """
    a, b, g = params.alpha, params.beta, params.gamma
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("argument must be finite")
    if z == 0.0:
        return EvalResult(rgamma(b), 0.0, Method.SERIES)
    if a == 1.0 and b == 1.0 and g == 1.0:
        v = math.exp(z)
        return EvalResult(v, EPS * v, Method.CLOSED_FORM)
    bound = series_bound(a)
    if abs(z) <= bound:
        try:
            return ml_series(params, z, tol, bound, DISPATCH_CANCEL if z < 0 else None)
        except CancellationError:
            pass
    if z > 0:
        raise DomainError(f"positive argument z={z} beyond the series domain is unsupported")
    if g != 1.0:
        raise DomainError("Prabhakar gamma != 1 is supported only inside the series domain")
    if not 0.0 < a < 1.0:
        raise DomainError(f"alpha={a} on the far negative axis is unsupported (need 0 < alpha < 1)")
    x = -z
    if x ** (1.0 / a) >= ASYMPTOTIC_T:
        return _ml_asymptotic(a, b, x)
    return _ml_spectral(a, b, x)


def ml_value(alpha: float, z: float, beta: float = 1.0, gamma: float = 1.0) -> float:
    return ml(MLParams(alpha, beta, gamma), z).value


def _derivative_coef(alpha: float, beta: float, k: int):
    def coef(m: np.ndarray):
        lg, sg = rgamma_log(alpha * (m + k) + beta)
        return lg + gammaln(m + k + 1.0) - gammaln(m + 1.0), sg

    return coef


def _lowering_combination(alpha: float, beta: float, k: int) -> list[float]:
    # z^k d^k/dz^k = L(L-1)...(L-k+1) with L = z d/dz, and
    # L E_{a,b} = (E_{a,b-1} - (b-1) E_{a,b}) / a.  Coefficient j multiplies E_{a,b-j}.
    c = [1.0]
    for i in range(k):
        nxt = [0.0] * (len(c) + 1)
        for j, cj in enumerate(c):
            b = beta - j
            nxt[j + 1] += cj / alpha
            nxt[j] += cj * (-(b - 1.0) / alpha - i)
        c = nxt
    return c


def _subordinated_derivative(alpha: float, x: float, k: int) -> float:
    # E_a(-x s) is the Laplace transform of the M-Wright density, hence
    # E_a^{(k)}(-x) = int_0^inf u^k exp(-x u) M_a(u) du with a positive integrand.
    from .wright import m_wright

    def f(u: float) -> float:
        return u ** k * math.exp(-x * u) * m_wright(alpha, u)

    scale = (k + 1.0) / x
    top = scale * 40.0 + 40.0
    q = integrate_interval(f, 0.0, top, Tolerance(1e-300, 1e-11, 4000), points=[scale, 4 * scale])
    return q.value


def ml_derivative_k(alpha: float, z: float, k: int, tol: Tolerance = DEFAULT_TOL,
                    beta: float = 1.0) -> float:
    """k-th derivative in z of ``E_{alpha,beta}(z)``.

    Inside the series domain the differentiated series is summed.  On the
    negative axis beyond it, ``beta == 1`` uses a positive subordination
    integral and other ``beta`` a finite combination of lowered
    two-parameter functions.
    """
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k}")
    k = int(k)
    MLParams(alpha, beta)
    if k == 0:
        return ml(MLParams(alpha, beta), z, tol).value
    if alpha == 1.0 and beta == 1.0:
        return math.exp(z)
    bound = series_bound(alpha)
    if abs(z) <= bound:
        try:
            return sum_power_series(_derivative_coef(alpha, beta, k), z, tol.abs_tol,
                                    DISPATCH_CANCEL if z < 0 else None).value
        except CancellationError:
            pass
    if z > 0:
        raise DomainError(f"positive argument z={z} beyond the series domain is unsupported")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} on the far negative axis is unsupported")
    if beta == 1.0:
        return _subordinated_derivative(alpha, -z, k)
    coeffs = _lowering_combination(alpha, beta, k)
    acc = math.fsum(c * ml(MLParams(alpha, beta - j), z, tol).value for j, c in enumerate(coeffs))
    return acc / z ** k


def rabotnov(alpha: float, beta: float, t: float) -> float:
    """Fractional exponential ``t**alpha * E_{alpha+1,alpha+1}(beta t**(alpha+1))``."""
    if not -1.0 < alpha <= 0.0:
        raise DomainError(f"alpha must lie in (-1, 0], got {alpha}")
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        if alpha < 0:
            raise DivergenceError("Rabotnov function diverges like t**alpha at t=0")
        return 1.0
    a1 = alpha + 1.0
    return t ** alpha * ml(MLParams(a1, a1), beta * t ** a1).value
