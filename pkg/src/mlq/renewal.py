"""Renewal processes: Poisson and fractional Poisson counting laws.

Waiting-time laws are small frozen dataclasses carrying their survival
function, Laplace transform, tail constants for the universality limit and
an inverse-transform sampler.  Monte-Carlo counting runs in fixed path
blocks, each block with its own random stream, so results do not depend on
the number of worker threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaincc, gammaln

from .errors import AtomError, ConvergenceError, DomainError
from .mittag_leffler import ml_derivative_k
from .numerics import RngStream, map_blocks
from .relaxation import e_alpha, e_alpha_array

__all__ = [
    "Exponential",
    "MittagLeffler",
    "PowerLaw",
    "WaitingTimeLaw",
    "RenewalPath",
    "poisson_pmf",
    "erlang_pdf",
    "erlang_cdf",
    "frac_poisson_pmf",
    "frac_poisson_distribution",
    "gen_erlang_pdf",
    "gen_erlang_cdf",
    "sample_waiting_time",
    "sample_waiting_times",
    "simulate_counting",
    "simulate_counts",
]


@dataclass(frozen=True)
class Exponential:
    rate: float = 1.0

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise DomainError("rate must be positive")

    tail_exponent = 1.0

    @property
    def tail_coefficient(self) -> float:
        # 1 - phi(s) ~ rho s with rho the mean waiting time
        return 1.0 / self.rate

    def survival(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    def laplace(self, s: float) -> float:
        return self.rate / (self.rate + s)

    def laplace_complement(self, s: float) -> float:
        return s / (self.rate + s)


@dataclass(frozen=True)
class MittagLeffler:
    beta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"Mittag-Leffler order must lie in (0, 1], got {self.beta}")

    @property
    def tail_exponent(self) -> float:
        return self.beta

    tail_coefficient = 1.0

    def survival(self, t):
        return e_alpha_array(self.beta, t)

    def laplace(self, s: float) -> float:
        return 1.0 / (1.0 + s ** self.beta)

    def laplace_complement(self, s: float) -> float:
        sb = s ** self.beta
        return sb / (1.0 + sb)


@dataclass(frozen=True)
class PowerLaw:
    """Pareto waiting times, density ``c t**-(beta+1)`` for ``t >= t_min``.

    ``t_min = (c/beta)**(1/beta)`` makes the survival ``(c/beta) t**-beta``
    start at 1.
    """

    beta: float
    c: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"power-law order must lie in (0, 1), got {self.beta}")
        if not self.c > 0:
            raise DomainError("scale c must be positive")

    @property
    def t_min(self) -> float:
        return (self.c / self.beta) ** (1.0 / self.beta)

    @property
    def tail_exponent(self) -> float:
        return self.beta

    @property
    def tail_coefficient(self) -> float:
        # |c Gamma(-beta)| = c pi / (Gamma(1+beta) sin(beta pi))
        b = self.beta
        return self.c * math.pi / (math.gamma(1.0 + b) * math.sin(b * math.pi))

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return np.minimum(1.0, (self.c / self.beta) * t ** -self.beta)

    def _incomplete(self, s: float) -> float:
        # (c/beta) s^beta Gamma(1-beta, s t_min)
        b = self.beta
        return (self.c / b) * s ** b * math.gamma(1.0 - b) * gammaincc(1.0 - b, s * self.t_min)

    def laplace(self, s: float) -> float:
        return math.exp(-s * self.t_min) - self._incomplete(s)

    def laplace_complement(self, s: float) -> float:
        # both pieces are positive, so no cancellation near s = 0
        return -math.expm1(-s * self.t_min) + self._incomplete(s)


WaitingTimeLaw = Union[Exponential, MittagLeffler, PowerLaw]


@dataclass(frozen=True)
class RenewalPath:
    event_times: np.ndarray
    horizon: float

    def __post_init__(self) -> None:
        ev = np.asarray(self.event_times, dtype=float)
        object.__setattr__(self, "event_times", ev)
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")
        if ev.size and (ev[0] <= 0 or np.any(np.diff(ev) <= 0) or ev[-1] > self.horizon):
            raise DomainError("event times must be strictly increasing in (0, horizon]")

    def count(self, t: float) -> int:
        """Counting function ``N(t) = #{k : t_k <= t}``."""
        if t < 0 or t > self.horizon:
            raise DomainError("t must lie in [0, horizon]")
        return int(np.searchsorted(self.event_times, t, side="right"))


# --- classical Poisson -------------------------------------------------------

def _check_k(k: int, minimum: int = 0) -> int:
    if int(k) != k or k < minimum:
        raise DomainError(f"k must be an integer >= {minimum}, got {k}")
    return int(k)


def poisson_pmf(lam: float, t: float, k: int) -> float:
    """``(lam t)**k exp(-lam t) / k!`` in log space."""
    k = _check_k(k)
    if not lam > 0 or t < 0:
        raise DomainError("need lam > 0 and t >= 0")
    if t == 0:
        return 1.0 if k == 0 else 0.0
    x = lam * t
    return math.exp(k * math.log(x) - x - gammaln(k + 1.0))


def erlang_pdf(lam: float, k: int, t: float) -> float:
    """Density of the k-th event time of a Poisson process."""
    k = _check_k(k)
    if k == 0:
        raise AtomError("the 0-th event time is a point mass at t=0")
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        return lam if k == 1 else 0.0
    return lam * poisson_pmf(lam, t, k - 1)


def erlang_cdf(lam: float, k: int, t: float) -> float:
    """``P(t_k <= t) = 1 - sum_{n<k} P(N(t) = n)``; equals 1 for k = 0."""
    k = _check_k(k)
    if k == 0:
        return 1.0
    if t < 0:
        raise DomainError("t must be non-negative")
    return max(0.0, 1.0 - math.fsum(poisson_pmf(lam, t, n) for n in range(k)))


# --- fractional Poisson --------------------------------------------------------

def _check_beta(beta: float) -> None:
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")


def frac_poisson_pmf(beta: float, t: float, k: int) -> float:
    """``P(N(t) = k) = t**(k beta) / k! * E_beta^{(k)}(-t**beta)``."""
    _check_beta(beta)
    k = _check_k(k)
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        return 1.0 if k == 0 else 0.0
    if beta == 1.0:
        return poisson_pmf(1.0, t, k)
    if k == 0:
        return e_alpha(beta, t).value
    d = ml_derivative_k(beta, -t ** beta, k)
    if d <= 0:
        return 0.0
    return math.exp(k * beta * math.log(t) - gammaln(k + 1.0) + math.log(d))


def frac_poisson_distribution(beta: float, t: float, tail_tol: float = 1e-10,
                              k_cap: int = 400) -> np.ndarray:
    """``P(N(t) = k)`` for k = 0..K, K the first index past the mode with
    ``P < tail_tol``."""
    out = []
    for k in range(k_cap + 1):
        p = frac_poisson_pmf(beta, t, k)
        out.append(p)
        if k > 2 and p < tail_tol and p <= out[-2]:
            return np.array(out)
    raise ConvergenceError(f"pmf tail not below {tail_tol} within k <= {k_cap}")


def gen_erlang_pdf(beta: float, k: int, t: float) -> float:
    """Density of the k-th event time of the fractional Poisson process."""
    _check_beta(beta)
    k = _check_k(k)
    if k == 0:
        raise AtomError("the 0-th event time is a point mass at t=0")
    if not t > 0:
        raise DomainError("t must be positive")
    if beta == 1.0:
        return erlang_pdf(1.0, k, t)
    d = ml_derivative_k(beta, -t ** beta, k)
    return beta * t ** (k * beta - 1.0) * d / math.gamma(k)


def gen_erlang_cdf(beta: float, k: int, t: float) -> float:
    """``1 - sum_{n<k} P(N(t) = n)``; equals 1 for k = 0."""
    _check_beta(beta)
    k = _check_k(k)
    if k == 0:
        return 1.0
    if t < 0:
        raise DomainError("t must be non-negative")
    return 1.0 - math.fsum(frac_poisson_pmf(beta, t, n) for n in range(k))


# --- sampling ----------------------------------------------------------------

_INVERT_RTOL = 1e-10


@lru_cache(maxsize=32)
def _survival_table(beta: float) -> tuple[np.ndarray, np.ndarray]:
    # log-grid in t wide enough that every uniform in (2^-54, 1 - 2^-54) is
    # bracketed: near 1, S ~ 1 - t^b/Gamma(1+b); near 0, S ~ t^-b/Gamma(1-b)
    lo = math.log(2.0 ** -54 * math.gamma(1.0 + beta)) / beta - 3.0
    hi = -math.log(2.0 ** -54 * math.gamma(1.0 - beta)) / beta + 3.0
    y = np.linspace(lo, hi, 4000)
    return y, e_alpha_array(beta, np.exp(y))


def _invert_ml_survival(beta: float, u: np.ndarray) -> np.ndarray:
    """Solve ``E_beta(-T**beta) = u`` for T.

    A tabulated survival function gives a bracket ``[y0, y1]`` in ``y = ln T``;
    the Illinois variant of regula falsi shrinks it until its width is below
    the relative tolerance 1e-10 in T.
    """
    y, s = _survival_table(beta)
    i = np.clip(np.searchsorted(-s, -u, side="right"), 1, y.size - 1)
    y0, y1 = y[i - 1], y[i]
    f0, f1 = s[i - 1] - u, s[i] - u  # f0 >= 0 > f1
    side = np.zeros(u.shape, dtype=np.int8)
    for _ in range(100):
        open_ = (y1 - y0) > _INVERT_RTOL
        if not open_.any():
            return np.exp(0.5 * (y0 + y1))
        ym = np.where(open_, (y0 * f1 - y1 * f0) / (f1 - f0), 0.5 * (y0 + y1))
        ym = np.clip(ym, y0, y1)
        # fall back to the midpoint on degenerate steps
        stuck = (ym <= y0) | (ym >= y1) | ~np.isfinite(ym)
        ym = np.where(stuck, 0.5 * (y0 + y1), ym)
        fm = e_alpha_array(beta, np.exp(ym)) - u
        left = fm >= 0
        y0 = np.where(open_ & left, ym, y0)
        y1 = np.where(open_ & ~left, ym, y1)
        y1 = np.where(open_ & (fm == 0), ym, y1)  # exact hit closes the bracket
        f0n = np.where(open_ & left, fm, f0)
        f1n = np.where(open_ & ~left, fm, f1)
        # Illinois: halve the stale end's value when the same end survives twice
        f1n = np.where(open_ & left & (side == 1), f1n * 0.5, f1n)
        f0n = np.where(open_ & ~left & (side == -1), f0n * 0.5, f0n)
        side = np.where(open_, np.where(left, 1, -1), side).astype(np.int8)
        f0, f1 = f0n, f1n
    raise ConvergenceError("survival inversion did not converge")


def _ml_mixture(beta: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # T = -ln U (sin(b pi)/tan(b pi V) - cos(b pi))^(1/b)
    bp = beta * math.pi
    return -np.log(u) * (math.sin(bp) / np.tan(bp * v) - math.cos(bp)) ** (1.0 / beta)


def sample_waiting_times(law: WaitingTimeLaw, rng: RngStream, size: int,
                         method: str = "inversion") -> np.ndarray:
    """Draw ``size`` waiting times.

    Mittag-Leffler laws are sampled by inverting the survival function
    (``method="inversion"``) or with the exact two-uniform mixture formula
    (``method="mixture"``), which is much faster.
    """
    u = rng.uniform(size)
    if isinstance(law, Exponential):
        return -np.log(u) / law.rate
    if isinstance(law, PowerLaw):
        return law.t_min * u ** (-1.0 / law.beta)
    if isinstance(law, MittagLeffler):
        if law.beta == 1.0:
            return -np.log(u)
        if method == "mixture":
            return _ml_mixture(law.beta, u, rng.uniform(size))
        if method != "inversion":
            raise DomainError(f"unknown sampling method {method!r}")
        return _invert_ml_survival(law.beta, u)
    raise DomainError(f"unsupported waiting-time law {law!r}")


def sample_waiting_time(law: WaitingTimeLaw, rng: RngStream, method: str = "inversion") -> float:
    return float(sample_waiting_times(law, rng, 1, method)[0])


def simulate_counting(law: WaitingTimeLaw, horizon: float, rng: RngStream,
                      method: str = "inversion") -> RenewalPath:
    """One renewal path: event instants up to ``horizon``."""
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    events = []
    clock = 0.0
    while True:
        clock += sample_waiting_time(law, rng, method)
        if clock > horizon:
            return RenewalPath(np.array(events), horizon)
        events.append(clock)


BLOCK = 8192


def _count_block(law, times: np.ndarray, n: int, rng: RngStream, method: str) -> np.ndarray:
    counts = np.zeros((n, times.size), dtype=np.int64)
    clock = np.zeros(n)
    active = np.arange(n)
    horizon = times[-1]
    while active.size:
        clock[active] += sample_waiting_times(law, rng, active.size, method)
        c = clock[active]
        counts[active] += c[:, None] <= times[None, :]
        active = active[c <= horizon]
    return counts


def simulate_counts(law: WaitingTimeLaw, times: Sequence[float], n_paths: int, seed: int,
                    method: str = "inversion") -> np.ndarray:
    """``N(t)`` at each observation time for ``n_paths`` independent paths.

    Paths are split into blocks of 8192; block ``b`` draws from stream
    ``(seed, b)``.  The result has shape ``(n_paths, len(times))``.
    """
    times = np.sort(np.asarray(times, dtype=float))
    if times.size == 0 or times[0] <= 0:
        raise DomainError("observation times must be positive")
    n_blocks = -(-int(n_paths) // BLOCK)

    def run(b: int) -> np.ndarray:
        n = min(BLOCK, n_paths - b * BLOCK)
        return _count_block(law, times, n, RngStream(seed, b), method)

    return np.concatenate(map_blocks(run, range(n_blocks)))
