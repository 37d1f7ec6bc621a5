"""Continuous-time random walks driven by renewal waiting times.

Laplace-domain operators on waiting-time densities (thinning, rescaling
with respeeding) and the universality gap that measures convergence to the
Mittag-Leffler law; the lattice CTRW density as a renewal series and its
characteristic function; Monte-Carlo CTRW paths; memory kernels.

The diffusivity of the diffusion-wave module and the respeed factor used
here are different quantities; the latter is always called ``respeed``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import AtomError, DomainError, TruncationError
from .mittag_leffler import MLParams, ml
from .numerics import RngStream, map_blocks
from .renewal import (BLOCK, Exponential, MittagLeffler, PowerLaw, WaitingTimeLaw,
                      frac_poisson_pmf, sample_waiting_times)
from .wright import GridFunction

__all__ = [
    "LaplaceWaitingDensity",
    "uniform_waiting_density",
    "thin_laplace",
    "rescale_respeed_laplace",
    "universality_gap",
    "DiracUnit",
    "Lattice",
    "GridDensity",
    "JumpLaw",
    "symmetric_unit_jump",
    "CtrwDensity",
    "ctrw_pdf_series",
    "ctrw_characteristic",
    "simulate_ctrw",
    "Delta",
    "PowerKernel",
    "MemoryFunction",
    "memory_kernel",
]


# --- Laplace-domain waiting densities ---------------------------------------

@dataclass(frozen=True)
class LaplaceWaitingDensity:
    """``s -> phi~(s)`` with optional exact ``1 - phi~(s)`` and tail data.

    ``tail_exponent`` and ``tail_coefficient`` are the ``beta`` and
    ``lambda`` of ``1 - phi~(s) ~ lambda s**beta`` as ``s -> 0``.
    """

    phi: Callable[[float], float]
    complement: Callable[[float], float] | None = None
    law: object = None
    tail_exponent: float | None = None
    tail_coefficient: float | None = None

    @classmethod
    def from_law(cls, law: WaitingTimeLaw) -> "LaplaceWaitingDensity":
        return cls(law.laplace, law.laplace_complement, law,
                   law.tail_exponent, law.tail_coefficient)

    def __call__(self, s: float) -> float:
        return self.phi(s)

    def one_minus(self, s: float) -> float:
        return self.complement(s) if self.complement is not None else 1.0 - self.phi(s)

    def scaled(self, tau: float) -> "LaplaceWaitingDensity":
        """Density of ``tau * T``: ``s -> phi~(tau s)``."""
        if not tau > 0:
            raise DomainError("tau must be positive")
        comp = self.complement
        beta, lam = self.tail_exponent, self.tail_coefficient
        return LaplaceWaitingDensity(
            lambda s: self.phi(tau * s),
            (lambda s: comp(tau * s)) if comp is not None else None,
            self.law,
            beta,
            None if lam is None or beta is None else lam * tau ** beta,
        )


def _as_density(phi) -> LaplaceWaitingDensity:
    if isinstance(phi, LaplaceWaitingDensity):
        return phi
    if isinstance(phi, (Exponential, MittagLeffler, PowerLaw)):
        return LaplaceWaitingDensity.from_law(phi)
    raise DomainError(f"expected a waiting-time law or Laplace density, got {phi!r}")


def uniform_waiting_density(width: float = 2.0) -> LaplaceWaitingDensity:
    """Uniform waiting times on ``(0, width)``: a finite-mean law that is not
    exponential."""
    if not width > 0:
        raise DomainError("width must be positive")

    def phi(s: float) -> float:
        x = width * s
        return -math.expm1(-x) / x

    def comp(s: float) -> float:
        x = width * s
        if x < 0.1:
            # (x - 1 + exp(-x))/x = sum_{n>=2} (-1)^n x^(n-1)/n!
            return math.fsum((-1) ** n * x ** (n - 1) / math.factorial(n) for n in range(2, 20))
        return (x + math.expm1(-x)) / x

    return LaplaceWaitingDensity(phi, comp, None, 1.0, width / 2.0)


def thin_laplace(phi, q: float, s: float) -> float:
    """Thinned density ``q phi~ / (1 - (1-q) phi~)`` at ``s``."""
    if not 0.0 < q <= 1.0:
        raise DomainError(f"q must lie in (0, 1], got {q}")
    d = _as_density(phi)
    p = d(s)
    return q * p / (d.one_minus(s) + q * p)


def rescale_respeed_laplace(phi, tau: float, respeed: float, s: float) -> float:
    """Rescaled-and-respeeded density ``a phi~(tau s) / (1 - (1-a) phi~(tau s))``."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    if not respeed > 0:
        raise DomainError("respeed factor must be positive")
    d = _as_density(phi)
    p = d(tau * s)
    return respeed * p / (d.one_minus(tau * s) + respeed * p)


def universality_gap(law, tau: float, s: float) -> float:
    """``|rescale_respeed(law, tau, lambda tau**beta, s) - 1/(1 + s**beta)|``."""
    d = _as_density(law)
    beta, lam = d.tail_exponent, d.tail_coefficient
    if beta is None or lam is None:
        raise DomainError("tail exponent and coefficient are required for the universality gap")
    r = rescale_respeed_laplace(d, tau, lam * tau ** beta, s)
    return abs(r - 1.0 / (1.0 + s ** beta))


# --- jump laws -----------------------------------------------------------------

@dataclass(frozen=True)
class DiracUnit:
    """Every jump has length +1."""

    def lattice(self) -> tuple[int, np.ndarray]:
        return 1, np.ones(1)

    def characteristic(self, kappa: float) -> complex:
        return complex(math.cos(kappa), math.sin(kappa))

    def sample(self, u: np.ndarray) -> np.ndarray:
        return np.ones_like(u)


@dataclass(frozen=True)
class Lattice:
    sites: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.sites) != len(self.probs) or not self.sites:
            raise DomainError("sites and probs must be non-empty and equally long")
        if any(int(s) != s for s in self.sites) or len(set(self.sites)) != len(self.sites):
            raise DomainError("sites must be distinct integers")
        if any(p < 0 for p in self.probs) or abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise DomainError("probs must be non-negative and sum to 1")

    def lattice(self) -> tuple[int, np.ndarray]:
        lo, hi = min(self.sites), max(self.sites)
        w = np.zeros(hi - lo + 1)
        for s, p in zip(self.sites, self.probs):
            w[s - lo] = p
        return lo, w

    def characteristic(self, kappa: float) -> complex:
        return complex(sum(p * complex(math.cos(kappa * s), math.sin(kappa * s))
                           for s, p in zip(self.sites, self.probs)))

    def sample(self, u: np.ndarray) -> np.ndarray:
        cdf = np.cumsum(self.probs)
        idx = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), len(self.sites) - 1)
        return np.asarray(self.sites, dtype=float)[idx]


@dataclass(frozen=True)
class GridDensity:
    """Continuous jump density sampled on a uniform grid that contains 0."""

    density: GridFunction = field(compare=False)

    def __post_init__(self) -> None:
        g = self.density
        if np.any(g.samples < 0) or abs(g.mass() - 1.0) > 1e-12:
            raise DomainError("jump density must be non-negative with unit mass")
        k0 = -g.origin / g.step
        if abs(k0 - round(k0)) > 1e-9:
            raise DomainError("the grid must contain x = 0")

    def lattice(self) -> tuple[int, np.ndarray]:
        g = self.density
        return int(round(g.origin / g.step)), g.samples * g.step

    def characteristic(self, kappa: float) -> complex:
        x = self.density.points
        w = self.density.samples * self.density.step
        return complex(np.sum(w * np.cos(kappa * x)), np.sum(w * np.sin(kappa * x)))

    def sample(self, u: np.ndarray) -> np.ndarray:
        g = self.density
        cdf = np.cumsum(g.samples * g.step)
        idx = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), g.samples.size - 1)
        return g.points[idx]


JumpLaw = Union[DiracUnit, Lattice, GridDensity]


def symmetric_unit_jump() -> Lattice:
    return Lattice((-1, 1), (0.5, 0.5))


# --- renewal-series density ----------------------------------------------------

@dataclass
class CtrwDensity:
    """``p(x, t)``: an atom at x=0 (no jump yet) plus the jump part on a grid.

    For lattice jumps ``grid.samples`` are site masses (step 1); for grid
    densities they are density values.
    """

    atom: float
    grid: GridFunction
    pmf: np.ndarray

    def total_mass(self) -> float:
        return self.atom + self.grid.mass()

    def site_masses(self) -> tuple[np.ndarray, np.ndarray]:
        """Grid points and masses with the atom folded into x = 0."""
        x = self.grid.points
        m = self.grid.samples * self.grid.step
        i0 = int(round(-self.grid.origin / self.grid.step))
        m = m.copy()
        m[i0] += self.atom
        return x, m

    def fourier(self, kappa: float) -> complex:
        x, m = self.site_masses()
        return complex(np.sum(m * np.cos(kappa * x)), np.sum(m * np.sin(kappa * x)))


def ctrw_pdf_series(jump: JumpLaw, beta: float, t: float, k_max: int = 200,
                    tol: float = 1e-8) -> CtrwDensity:
    """``p(x,t) = sum_k P(N(t)=k) w^{*k}(x)``, summed until the neglected
    probability ``1 - sum_k P(N(t)=k)`` drops below ``tol``."""
    if not t > 0:
        raise DomainError("t must be positive")
    lo, w = jump.lattice()
    step = jump.density.step if isinstance(jump, GridDensity) else 1.0
    pmf = [frac_poisson_pmf(beta, t, 0)]
    parts: list[tuple[int, np.ndarray]] = []
    wk, off = np.ones(1), 0
    k = 0
    while 1.0 - math.fsum(pmf) >= tol:
        k += 1
        if k > k_max:
            raise TruncationError(f"renewal series needs more than k_max={k_max} terms")
        wk, off = np.convolve(wk, w), off + lo
        p = frac_poisson_pmf(beta, t, k)
        pmf.append(p)
        parts.append((off, p * wk))
    if parts:
        first = min(o for o, _ in parts)
        last = max(o + a.size for o, a in parts)
    else:
        first, last = 0, 1
    first, last = min(first, 0), max(last, 1)
    acc = np.zeros(last - first)
    for o, a in parts:
        acc[o - first:o - first + a.size] += a
    return CtrwDensity(pmf[0], GridFunction(first * step, step, acc / step), np.array(pmf))


def ctrw_characteristic(jump: JumpLaw, beta: float, kappa: float, t: float) -> float:
    """``E_beta((w^(kappa) - 1) t**beta)`` for jump laws with real ``w^``."""
    if not t > 0:
        raise DomainError("t must be positive")
    w = jump.characteristic(kappa)
    if abs(w.imag) > 1e-12:
        raise DomainError("characteristic function is complex; only symmetric jump laws are supported")
    # |w^| <= 1; probabilities summing to 1 + ulp must not push E_beta above 1
    z = (min(max(w.real, -1.0), 1.0) - 1.0) * t ** beta
    if z == 0.0:
        return 1.0
    return ml(MLParams(beta), z).value


# --- Monte Carlo ---------------------------------------------------------------

def _ctrw_block(jump, waiting, times, n, rng, method) -> np.ndarray:
    pos = np.zeros((n, times.size))
    clock = np.zeros(n)
    active = np.arange(n)
    horizon = times[-1]
    while active.size:
        clock[active] += sample_waiting_times(waiting, rng, active.size, method)
        c = clock[active]
        active = active[c <= horizon]
        c = clock[active]
        jumps = jump.sample(rng.uniform(active.size))
        pos[active] += jumps[:, None] * (c[:, None] <= times[None, :])
    return pos


def simulate_ctrw(jump: JumpLaw, waiting: WaitingTimeLaw, horizon, n_paths: int, seed: int,
                  method: str = "inversion") -> np.ndarray:
    """Positions at ``horizon`` (a scalar or an increasing sequence of times).

    Returns shape ``(n_paths,)`` for a scalar horizon and
    ``(n_paths, len(horizon))`` otherwise.  Block ``b`` of 8192 paths uses
    stream ``(seed, b)``.
    """
    scalar = np.ndim(horizon) == 0
    times = np.sort(np.atleast_1d(np.asarray(horizon, dtype=float)))
    if times[0] <= 0:
        raise DomainError("observation times must be positive")
    n_blocks = -(-int(n_paths) // BLOCK)

    def run(b: int) -> np.ndarray:
        n = min(BLOCK, n_paths - b * BLOCK)
        return _ctrw_block(jump, waiting, times, n, RngStream(seed, b), method)

    pos = np.concatenate(map_blocks(run, range(n_blocks)))
    return pos[:, 0] if scalar else pos


# --- memory functions ------------------------------------------------------------

@dataclass(frozen=True)
class Delta:
    """Memoryless kernel ``H(t) = delta(t)`` (order 1)."""

    beta: float = 1.0

    def laplace(self, s: float) -> float:
        return 1.0

    def reciprocal_laplace(self, s: float) -> float:
        return 1.0


@dataclass(frozen=True)
class PowerKernel:
    """``H(t) = t**-beta / Gamma(1-beta)`` with ``H~(s) = s**(beta-1)``."""

    beta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise DomainError("power kernel order must lie in (0, 1); use Delta for beta = 1")

    def laplace(self, s: float) -> float:
        return s ** (self.beta - 1.0)

    def reciprocal_laplace(self, s: float) -> float:
        return s ** (1.0 - self.beta)


MemoryFunction = Union[Delta, PowerKernel]


def memory_kernel(mem: MemoryFunction, t: float) -> float:
    if isinstance(mem, Delta):
        raise AtomError("the beta=1 memory function is a Dirac delta; it has no pointwise value")
    if not t > 0:
        raise DomainError("t must be positive")
    return t ** -mem.beta / math.gamma(1.0 - mem.beta)
