"""Fractional relaxation ``e_alpha(t) = E_alpha(-t**alpha)`` and friends.

Besides the relaxation function itself this module holds its derivative
``phi_alpha``, the spectral density that writes ``e_alpha`` as a mixture of
exponentials, short- and long-time approximants, and quadrature-based Caputo
and Riemann-Liouville derivatives used for residual checks.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._series import EPS, rgamma, rgamma_log
from .errors import (DiracSpectrumError, DivergenceError, DivergentSeriesWarning,
                     DomainError)
from .mittag_leffler import EvalResult, Method, MLParams, ml
from .numerics import (DEFAULT_TOL, QuadResult, Tolerance, finite_difference,
                       integrate_interval)

__all__ = [
    "RelaxOrder",
    "SpectralDensity",
    "e_alpha",
    "e_alpha_array",
    "phi_alpha",
    "spectral_density",
    "e_alpha_spectral",
    "e_approx_short",
    "e_approx_long",
    "optimal_terms",
    "e_alpha_asymptotic_series",
    "caputo_derivative",
    "rl_derivative",
]


@dataclass(frozen=True)
class RelaxOrder:
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"relaxation order must lie in (0, 1], got {self.alpha}")


def _alpha(order: RelaxOrder | float) -> float:
    return order.alpha if isinstance(order, RelaxOrder) else RelaxOrder(float(order)).alpha


def e_alpha(order: RelaxOrder | float, t: float) -> EvalResult:
    """Relaxation function; equals 1 at t=0 and decreases to 0."""
    a = _alpha(order)
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        return EvalResult(1.0, 0.0, Method.CLOSED_FORM)
    if a == 1.0:
        v = math.exp(-t)
        return EvalResult(v, EPS * v, Method.CLOSED_FORM)
    return ml(MLParams(a), -t ** a)


def phi_alpha(order: RelaxOrder | float, t: float) -> float:
    """``-d/dt e_alpha(t) = t**(alpha-1) E_{alpha,alpha}(-t**alpha)``."""
    a = _alpha(order)
    if t < 0:
        raise DomainError("t must be non-negative")
    if a == 1.0:
        return math.exp(-t)
    if t == 0:
        raise DivergenceError("phi_alpha diverges like t**(alpha-1) at t=0")
    return t ** (a - 1.0) * ml(MLParams(a, a), -t ** a).value


@dataclass(frozen=True)
class SpectralDensity:
    """Density ``K_alpha`` of relaxation rates; the same formula gives the
    density of relaxation times."""

    order: RelaxOrder

    def __post_init__(self) -> None:
        if self.order.alpha == 1.0:
            raise DiracSpectrumError("alpha=1 has a Dirac-delta spectrum at r=1")

    def __call__(self, x):
        a = self.order.alpha
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("spectral density is defined for x > 0")
        xa = x ** a
        s, c = math.sin(a * math.pi), math.cos(a * math.pi)
        out = x ** (a - 1.0) * s / (math.pi * (xa * xa + 2.0 * xa * c + 1.0))
        return float(out) if out.ndim == 0 else out


def spectral_density(order: RelaxOrder | float, x):
    a = _alpha(order)
    if a == 1.0:
        raise DiracSpectrumError("alpha=1 has a Dirac-delta spectrum at r=1")
    return SpectralDensity(RelaxOrder(a))(x)


def e_alpha_spectral(order: RelaxOrder | float, t: float, tol: Tolerance = DEFAULT_TOL) -> QuadResult:
    """``int_0^inf exp(-r t) K_alpha(r) dr`` by quadrature.

    Folding ``r -> 1/r`` (K is invariant under ``K(r) dr -> K(1/r) dr/r^2``)
    leaves a finite range: ``int_0^1 (exp(-r t) + exp(-t/r)) K(r) dr``, with
    the ``r**(alpha-1)`` endpoint handled by substitution.
    """
    a = _alpha(order)
    if a == 1.0:
        raise DiracSpectrumError("alpha=1 has no spectral density; use e_alpha")
    if t < 0:
        raise DomainError("t must be non-negative")
    k = SpectralDensity(RelaxOrder(a))

    def f(r: float) -> float:
        w = math.exp(-r * t) + (math.exp(-t / r) if t > 0 else 1.0)
        return w * k(r)

    return integrate_interval(f, 0.0, 1.0, tol, singularity=1.0 - a)


def e_approx_short(order: RelaxOrder | float, t: float) -> float:
    """Stretched exponential ``exp(-t**alpha / Gamma(1+alpha))``."""
    a = _alpha(order)
    if t < 0:
        raise DomainError("t must be non-negative")
    return math.exp(-t ** a / math.gamma(1.0 + a))


def e_approx_long(order: RelaxOrder | float, t: float) -> float:
    """Power tail ``t**(-alpha) / Gamma(1-alpha)``."""
    a = _alpha(order)
    if a == 1.0:
        raise DivergenceError("long-time approximant hits the Gamma(0) pole at alpha=1")
    if not t > 0:
        raise DomainError("t must be positive")
    return t ** -a / math.gamma(1.0 - a)


def _asym_terms(a: float, t: float, n_max: int):
    n = np.arange(1, n_max + 1, dtype=float)
    lg, sg = rgamma_log(1.0 - a * n)
    lt = lg - a * n * math.log(t)
    return lt, sg * np.where(n % 2 == 1, 1.0, -1.0)


def optimal_terms(order: RelaxOrder | float, t: float) -> int:
    """Index of the smallest non-vanishing term of the asymptotic series."""
    a = _alpha(order)
    if a == 1.0:
        raise DivergenceError("the asymptotic series is identically zero at alpha=1")
    if not t ** a > 1:
        raise DomainError("asymptotic series needs t**alpha > 1")
    lt, sg = _asym_terms(a, t, int(min(2 * t / a + 20, 200_000)))
    live = np.flatnonzero(sg != 0)
    return int(live[np.argmin(lt[live])]) + 1


def e_alpha_asymptotic_series(order: RelaxOrder | float, t: float, n_terms: int | None = None) -> float:
    """``sum_{n=1}^{N} (-1)**(n-1) t**(-alpha n) / Gamma(1 - alpha n)``.

    ``n_terms=None`` truncates at the smallest term.  Asking for more terms
    than that emits :class:`DivergentSeriesWarning`.
    """
    a = _alpha(order)
    best = optimal_terms(a, t)
    n = best if n_terms is None else int(n_terms)
    if n < 1:
        raise DomainError("n_terms must be at least 1")
    if n > best:
        warnings.warn(f"{n} terms exceed the smallest-term index {best}; "
                      "the asymptotic series diverges", DivergentSeriesWarning, stacklevel=2)
    lt, sg = _asym_terms(a, t, n)
    terms = sg * np.exp(np.where(sg != 0, lt, -np.inf))
    return math.fsum(terms.tolist())


# --- vectorised evaluation, used by the survival-inversion sampler ----------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _panels(a: float) -> np.ndarray:
    # geometric panels towards w=0, uniform ones where the kernel denominator
    # w^2 + 2 w cos(a pi) + 1 comes close to zero (a near 1)
    geo = 2.0 ** -np.arange(40, 0, -1)
    uni = np.linspace(0.5, 1.0, 33 if a > 0.8 else 5)
    return np.concatenate(([0.0], geo, uni[1:]))


def _e_alpha_quad(a: float, t: np.ndarray) -> np.ndarray:
    # e_a(t) = sin(a pi)/(a pi) int_0^1 [exp(-t w^(1/a)) + exp(-t w^(-1/a))]
    #          / (w^2 + 2 w cos(a pi) + 1) dw, smooth on [0, 1]
    edges = _panels(a)
    lo, hi = edges[:-1], edges[1:]
    w = (0.5 * (hi - lo)[:, None] * (_GL_X[None, :] + 1.0) + lo[:, None]).ravel()
    wt = (0.5 * (hi - lo)[:, None] * _GL_W[None, :]).ravel()
    kern = wt / (w * w + 2.0 * w * math.cos(a * math.pi) + 1.0)
    p, q = w ** (1.0 / a), w ** (-1.0 / a)
    out = np.empty_like(t)
    for i in range(0, t.size, 2048):
        tt = t[i:i + 2048, None]
        out[i:i + 2048] = (np.exp(-tt * p) + np.exp(-tt * q)) @ kern
    return out * math.sin(a * math.pi) / (a * math.pi)


def _e_alpha_series_vec(a: float, t: np.ndarray) -> np.ndarray:
    x = t ** a
    xmax = float(x.max(initial=0.0))
    n = 0
    coefs = []
    while True:
        c = rgamma(a * n + 1.0)
        coefs.append(c)
        if n > 4 and abs(c) * max(xmax, 1.0) ** n < 1e-18:
            break
        n += 1
    acc = np.zeros_like(x)
    for c in reversed(coefs):
        acc = acc * (-x) + c
    return acc


def _e_alpha_asym_vec(a: float, t: np.ndarray, t_min: float) -> np.ndarray:
    n_max = max(int(t_min / a), 1)
    n = np.arange(1, n_max + 1)
    c = np.array([rgamma(1.0 - a * k) for k in n]) * np.where(n % 2 == 1, 1.0, -1.0)
    y = t ** -a
    acc = np.zeros_like(t)
    for ck in reversed(c):
        acc = (acc + ck) * y
    return acc


def e_alpha_array(order: RelaxOrder | float, t) -> np.ndarray:
    """Vectorised ``e_alpha`` over an array of times (about 1e-13 accuracy).

    Uses a Horner series for ``t <= 8``, the asymptotic series for ``t >= 40``
    and fixed Gauss-Legendre panels on the smooth spectral form in between.
    """
    a = _alpha(order)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    flat = t.ravel()
    if a == 1.0:
        return np.exp(-t)
    out = np.empty_like(flat)
    small = flat <= 8.0
    big = flat >= 40.0
    mid = ~(small | big)
    if small.any():
        out[small] = _e_alpha_series_vec(a, flat[small])
    if big.any():
        out[big] = _e_alpha_asym_vec(a, flat[big], 40.0)
    if mid.any():
        out[mid] = _e_alpha_quad(a, flat[mid])
    return out.reshape(t.shape)


# --- fractional derivatives -------------------------------------------------

Func = Callable[[float], float]


def _derivative_of(f: Func, df: Func | None) -> Func:
    if df is not None:
        return df

    def d(tau: float) -> float:
        return finite_difference(f, tau, 1, 1e-4 * tau)

    return d


def caputo_derivative(f: Func, mu: float, t: float, tol: Tolerance = DEFAULT_TOL,
                      df: Func | None = None, singularity: float | None = None) -> float:
    """Caputo derivative ``1/Gamma(1-mu) int_0^t f'(tau) (t-tau)**(-mu) dtau``.

    ``df`` supplies ``f'`` analytically; otherwise a central difference with a
    step proportional to ``tau`` is used.  ``singularity=p`` declares
    ``|f'(tau)| ~ tau**(-p)`` at the origin.  The integral is split at t/2;
    on the upper half ``u = (t - tau)**(1-mu)`` absorbs the kernel exactly.
    """
    if not 0.0 < mu < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    if not t > 0:
        raise DomainError("t must be positive")
    d = _derivative_of(f, df)
    half = 0.5 * t

    def lower(tau: float) -> float:
        return d(tau) * (t - tau) ** -mu

    q = 1.0 / (1.0 - mu)

    def upper(u: float) -> float:
        return d(t - u ** q) * q

    part1 = integrate_interval(lower, 0.0, half, tol, singularity=singularity)
    part2 = integrate_interval(upper, 0.0, half ** (1.0 - mu), tol)
    return (part1.value + part2.value) / math.gamma(1.0 - mu)


def rl_derivative(f: Func, f0: float, mu: float, t: float, tol: Tolerance = DEFAULT_TOL,
                  df: Func | None = None, singularity: float | None = None) -> float:
    """Riemann-Liouville derivative via the Caputo one plus ``f0 t**-mu / Gamma(1-mu)``."""
    c = caputo_derivative(f, mu, t, tol, df=df, singularity=singularity)
    return c + f0 * t ** -mu / math.gamma(1.0 - mu)
