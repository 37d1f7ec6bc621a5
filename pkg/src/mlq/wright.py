"""Wright functions, the M-Wright density and diffusion-wave Green functions.

``W_{lam,mu}(z) = sum z**n / (n! Gamma(lam n + mu))`` with ``lam > -1``.
The auxiliary functions of the second kind are ``M_nu(z) = W_{-nu,1-nu}(-z)``
and ``F_nu(z) = W_{-nu,0}(-z) = nu z M_nu(z)``.  For moderate and large
``z`` the M-function is evaluated from a non-oscillatory integral over
``(0, pi)`` (the Zolotarev form of the one-sided stable density), which is
free of the cancellation that ruins the alternating series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import gammaln

from ._series import EPS, rgamma, rgamma_log, sum_power_series
from .errors import (CancellationError, ConvergenceError, DomainError,
                     TruncationError)
from .mittag_leffler import EvalResult, Method
from .numerics import DEFAULT_TOL, Tolerance, finite_difference, integrate_interval

__all__ = [
    "WrightParams",
    "DiffusionConfig",
    "GridFunction",
    "wright",
    "m_wright",
    "f_wright",
    "airy_ai",
    "m_wright_special",
    "m_spacetime",
    "green_cauchy",
    "green_signalling",
    "solve_cauchy",
    "solve_signalling",
    "pde_residual",
]


@dataclass(frozen=True)
class WrightParams:
    lam: float
    mu: float

    def __post_init__(self) -> None:
        if not self.lam > -1.0:
            raise DomainError(f"lambda must exceed -1, got {self.lam}")
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")

    @property
    def kind(self) -> str:
        return "first" if self.lam >= 0 else "second"


@dataclass(frozen=True)
class DiffusionConfig:
    """Order ``nu = beta/2`` of the diffusion-wave equation and its diffusivity."""

    nu: float
    diffusivity: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must lie in (0, 1], got {self.nu}")
        if not self.diffusivity > 0:
            raise DomainError("diffusivity must be positive")

    @property
    def regime(self) -> str:
        return "diffusion" if self.nu <= 0.5 else "wave"


@dataclass
class GridFunction:
    origin: float
    step: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=float)
        if not self.step > 0:
            raise DomainError("grid step must be positive")
        if self.samples.ndim != 1 or not np.all(np.isfinite(self.samples)):
            raise DomainError("grid samples must be a finite 1-D sequence")

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.samples.size)

    def mass(self) -> float:
        return float(math.fsum(self.samples.tolist()) * self.step)

    def __len__(self) -> int:
        return self.samples.size


# --- Wright series -----------------------------------------------------------

_WRIGHT_CANCEL = 1e8


def _wright_coef(lam: float, mu: float):
    def coef(n: np.ndarray):
        lg, sg = rgamma_log(lam * n + mu)
        return lg - gammaln(n + 1.0), sg

    return coef


def _wright_mp(lam: float, mu: float, z: float, peak_log10: float) -> tuple[float, float]:
    """Series in mpmath with enough digits to resolve the sum relative to itself.

    Returns ``(value, error_bound)``.  The first pass covers the peak term;
    if the sum is far below the peak the precision is raised and it reruns.
    """
    dps = int(30 + max(peak_log10, 0.0))
    while True:
        with mpmath.workdps(dps):
            lam_, mu_, z_ = mpmath.mpf(lam), mpmath.mpf(mu), mpmath.mpf(z)
            tiny = mpmath.mpf(10) ** (-dps + 5)
            s, term_n, n = mpmath.mpf(0), mpmath.mpf(1), 0
            peak = mpmath.mpf(0)
            run = 0
            while True:
                t = term_n * mpmath.rgamma(lam_ * n + mu_)
                s += t
                peak = max(peak, abs(t))
                # terms at or next to Gamma poles are (nearly) zero and say
                # nothing about the tail: stop only after a run of small terms
                small = abs(t) <= tiny * max(abs(s), peak * tiny) and abs(t) < peak
                run = run + 1 if small else 0
                if n > 10 and run >= 4:
                    break
                n += 1
                term_n = term_n * z_ / n
                if n > 200_000:
                    raise ConvergenceError("extended-precision Wright series did not converge")
            err = peak * mpmath.mpf(10) ** (-dps + 3)
            if s != 0 and abs(s) > err * 10 ** 17:
                return float(s), float(err)
            lost = 20 if s == 0 else int(mpmath.log10(err / abs(s))) + 20
            dps += max(lost, 20)
            if dps > 6000:
                raise ConvergenceError("Wright series needs more than 6000 digits")


def wright(params: WrightParams, z: float, tol: Tolerance = DEFAULT_TOL) -> EvalResult:
    """Wright function on the real line.

    The double-precision series is used when its cancellation guard passes.
    Otherwise the M and F special cases go through the integral form and any
    other parameters through an extended-precision series.
    """
    lam, mu = params.lam, params.mu
    z = float(z)
    if z == 0:
        return EvalResult(rgamma(mu), 0.0, Method.SERIES)
    if lam == 0:
        v = math.exp(z) * rgamma(mu)
        return EvalResult(v, EPS * abs(v), Method.CLOSED_FORM)
    try:
        s = sum_power_series(_wright_coef(lam, mu), z, tol.abs_tol, _WRIGHT_CANCEL)
        return EvalResult(s.value, s.error, Method.SERIES)
    except CancellationError:
        pass
    if lam < 0 and z < 0:
        nu = -lam
        # the integral is resolved to _M_TOL.rel_tol; report ten times that
        if abs(mu - (1.0 - nu)) < 1e-15:
            v = m_wright(nu, -z)
            return EvalResult(v, 10 * _M_TOL.rel_tol * abs(v), Method.INTEGRAL)
        if mu == 0.0:
            v = f_wright(nu, -z)
            return EvalResult(v, 10 * _M_TOL.rel_tol * abs(v), Method.INTEGRAL)
    # peak term estimate in log10 sets the working precision
    n = np.arange(0, 4000, dtype=float)
    lg, _ = rgamma_log(lam * n + mu)
    peak = float(np.max(lg - gammaln(n + 1.0) + n * math.log(abs(z)))) / math.log(10)
    v, err = _wright_mp(lam, mu, z, peak)
    return EvalResult(v, err + EPS * abs(v), Method.EXTENDED)


# --- M-Wright function -------------------------------------------------------

_M_SERIES_MAX = 1.0
_M_TOL = Tolerance(abs_tol=1e-300, rel_tol=1e-13, max_subdivisions=500)


def _check_nu(nu: float) -> None:
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu}")


def _m_zolotarev(nu: float, z: float) -> float:
    # M_nu(z) = z^(nu/(1-nu)) / ((1-nu) pi) int_0^pi A exp(-z^(1/(1-nu)) A) dphi,
    # A(phi) = (sin(nu phi)/sin phi)^(1/(1-nu)) sin((1-nu) phi)/sin(nu phi)
    e = 1.0 / (1.0 - nu)
    c = z ** e

    def g(phi: float) -> float:
        snp = math.sin(nu * phi)
        a = (snp / math.sin(phi)) ** e * math.sin((1.0 - nu) * phi) / snp
        return a * math.exp(-c * a)

    q = integrate_interval(g, 0.0, math.pi, _M_TOL)
    return z ** (nu * e) * q.value / ((1.0 - nu) * math.pi)


def _m_series(nu: float, z: float, cancel: float | None) -> float:
    return sum_power_series(_wright_coef(-nu, 1.0 - nu), -z, 1e-300, cancel).value


def m_wright(nu: float, z: float) -> float:
    """M-Wright function ``M_nu(z)`` for ``z >= 0`` (a density on the half-line)."""
    _check_nu(nu)
    z = float(z)
    if z < 0:
        raise DomainError("m_wright is defined here for z >= 0; use |x|")
    if nu == 0.5:
        return math.exp(-0.25 * z * z) / math.sqrt(math.pi)
    if z == 0:
        return rgamma(1.0 - nu)
    if z <= _M_SERIES_MAX:
        try:
            return _m_series(nu, z, 1e3)
        except CancellationError:
            pass
    return _m_zolotarev(nu, z)


def f_wright(nu: float, z: float) -> float:
    """Auxiliary function ``F_nu(z) = nu z M_nu(z)``."""
    return nu * z * m_wright(nu, z)


def f_wright_series(nu: float, z: float) -> float:
    """``F_nu(z) = W_{-nu,0}(-z)`` summed directly (small z only)."""
    _check_nu(nu)
    return sum_power_series(_wright_coef(-nu, 0.0), -float(z), 1e-300, 1e8).value


# --- Airy closed forms -------------------------------------------------------

_AIRY_MAX = 6.0


def _airy_series(x: float) -> tuple[float, float]:
    # Ai = c1 f - c2 g, f = sum a_k x^(3k), g = sum b_k x^(3k+1) with
    # a_{k+1} = a_k/((3k+2)(3k+3)), b_{k+1} = b_k/((3k+3)(3k+4))
    c1 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    c2 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)
    x3 = x ** 3
    a = b = p = 1.0  # p = x^(3k)
    f = g = fp = gp = 0.0
    for k in range(200):
        f += a * p
        g += b * p * x
        gp += (3 * k + 1) * b * p
        if k and x != 0.0:
            fp += 3 * k * a * p / x
        if k > 2 and (abs(a) + abs(b)) * abs(p) * max(1.0, abs(x)) < 1e-18:
            break
        a /= (3 * k + 2) * (3 * k + 3)
        b /= (3 * k + 3) * (3 * k + 4)
        p *= x3
    return c1 * f - c2 * g, c1 * fp - c2 * gp


def airy_ai(x: float) -> tuple[float, float]:
    """``(Ai(x), Ai'(x))`` from the Maclaurin series, for ``|x| <= 6``."""
    if abs(x) > _AIRY_MAX:
        raise DomainError(f"Airy series is used only for |x| <= {_AIRY_MAX}")
    return _airy_series(float(x))


def m_wright_special(nu: float, x: float) -> float:
    """Closed forms of ``M_nu`` at ``nu`` = 1/3 (Airy), 1/2 (Gauss), 2/3 (Airy)."""
    if x < 0:
        raise DomainError("x must be non-negative")
    if abs(nu - 0.5) < 1e-15:
        return math.exp(-0.25 * x * x) / math.sqrt(math.pi)
    if abs(nu - 1.0 / 3.0) < 1e-15:
        ai, _ = airy_ai(x / 3.0 ** (1.0 / 3.0))
        return 3.0 ** (2.0 / 3.0) * ai
    if abs(nu - 2.0 / 3.0) < 1e-15:
        y = x * x / 3.0 ** (4.0 / 3.0)
        ai, aip = airy_ai(y)
        return (3.0 ** (-2.0 / 3.0) * (3.0 ** (1.0 / 3.0) * x * ai - 3.0 * aip)
                * math.exp(-2.0 * x ** 3 / 27.0))
    raise DomainError(f"closed forms exist for nu in {{1/3, 1/2, 2/3}}, got {nu}")


# --- space-time densities and Green functions --------------------------------

def m_spacetime(nu: float, x: float, t: float) -> float:
    """``t**-nu M_nu(x t**-nu)``: for fixed t a density in ``x > 0``."""
    if not t > 0:
        raise DomainError("t must be positive")
    return t ** -nu * m_wright(nu, x * t ** -nu)


def _scale(cfg: DiffusionConfig, t: float) -> float:
    if not t > 0:
        raise DomainError("t must be positive")
    if cfg.nu == 1.0:
        raise DomainError("nu=1 kernels are Dirac spikes and cannot be sampled")
    return math.sqrt(cfg.diffusivity) * t ** cfg.nu


def green_cauchy(cfg: DiffusionConfig, x: float, t: float) -> float:
    """Cauchy-problem Green function ``M_nu(|x|/L) / (2L)``, ``L = sqrt(a) t**nu``."""
    L = _scale(cfg, t)
    return m_wright(cfg.nu, abs(x) / L) / (2.0 * L)


def green_signalling(cfg: DiffusionConfig, x: float, t: float) -> float:
    """Signalling-problem Green function ``F_nu(xi)/t = nu x M_nu(xi)/(sqrt(a) t**(1+nu))``."""
    if not x > 0:
        raise DomainError("x must be positive")
    L = _scale(cfg, t)
    return cfg.nu * x * m_wright(cfg.nu, x / L) / (L * t)


_KERNEL_CAP = 200_000


def _sampled_kernel(cfg: DiffusionConfig, t: float, h: float, n: int) -> np.ndarray:
    """Green function sampled at offsets ``k h`` for k = 1..K, K covering both
    the grid and the whole numerical support of the kernel."""
    L = _scale(cfg, t)
    zc = 1.0
    while m_wright(cfg.nu, zc) > 1e-18 * rgamma(1.0 - cfg.nu) and zc < 1e4:
        zc *= 1.5
    k_max = max(n, int(math.ceil(zc * L / h))) + 1
    if k_max > _KERNEL_CAP:
        raise TruncationError(f"grid step {h} too fine for the kernel width {zc * L:.3g}")
    return np.array([green_cauchy(cfg, k * h, t) for k in range(1, k_max + 1)])


def solve_cauchy(cfg: DiffusionConfig, f: GridFunction, t: float,
                 max_lost_mass: float = 1e-6) -> GridFunction:
    """Grid convolution ``r_i = sum_j G_c(x_i - x_j, t) f_j step``.

    The kernel is sampled at the grid offsets.  Its centre sample, where
    ``G_c`` has a cusp, is set so that the sampled kernel has unit mass; this
    makes the scheme conservative.  Mass carried past either end of the grid
    must stay below ``max_lost_mass``, otherwise :class:`TruncationError`.
    """
    n = len(f)
    h = f.step
    side = _sampled_kernel(cfg, t, h, n)
    centre = 1.0 / h - 2.0 * math.fsum(side.tolist())
    # tails[k] = sum of side samples at offsets >= k (k = 1..K), tails[K+1] = 0
    tails = np.concatenate(([0.0], np.cumsum(side[::-1])))[::-1]
    tails = np.concatenate(([np.nan], tails))
    j = np.flatnonzero(f.samples)
    lost = h * h * float(np.abs(f.samples[j]) @ (tails[j + 1] + tails[n - j]))
    if lost > max_lost_mass:
        raise TruncationError(f"Green-function mass {lost:.3g} leaves the grid window")
    kern = np.concatenate((side[:n - 1][::-1], [centre], side[:n - 1]))
    r = np.convolve(f.samples, kern)[n - 1:2 * n - 1] * h
    return GridFunction(f.origin, h, r)


def solve_signalling(cfg: DiffusionConfig, h: GridFunction, x: float, t: float) -> float:
    """Time convolution ``sum_j G_s(x, t - tau_j) h_j step`` over samples with tau_j < t."""
    if not x > 0:
        raise DomainError("x must be positive")
    if not t > 0:
        raise DomainError("t must be positive")
    acc = []
    for tau, hv in zip(h.points, h.samples):
        if tau < t and hv != 0.0:
            acc.append(green_signalling(cfg, x, t - tau) * hv)
    return math.fsum(acc) * h.step


def pde_residual(cfg: DiffusionConfig, x: float, t: float, dx: float = 1e-3) -> float:
    """``D_t^{2 nu} G_c - a d^2 G_c/dx^2`` at ``(x, t)``, ``x != 0``.

    The time derivative is the Caputo one for ``2 nu < 1``, the ordinary one
    at ``2 nu = 1`` and, for ``2 nu > 1``, the Caputo derivative of order
    ``2 nu - 1`` applied to the first time derivative.
    """
    from .relaxation import caputo_derivative

    if x == 0:
        raise DomainError("the Green function has a cusp at x=0")
    beta = 2.0 * cfg.nu

    def g(tau: float) -> float:
        return green_cauchy(cfg, x, tau)

    def gt(tau: float) -> float:
        return finite_difference(g, tau, 1, 1e-4 * tau)

    if beta == 1.0:
        lhs = gt(t)
    elif beta < 1.0:
        lhs = caputo_derivative(g, beta, t, Tolerance(1e-12, 1e-9), df=gt)
    else:
        def gtt(tau: float) -> float:
            return finite_difference(g, tau, 2, 1e-3 * tau)

        lhs = caputo_derivative(gt, beta - 1.0, t, Tolerance(1e-12, 1e-9), df=gtt)
    rhs = cfg.diffusivity * finite_difference(lambda y: green_cauchy(cfg, y, t), x, 2, dx)
    return lhs - rhs
