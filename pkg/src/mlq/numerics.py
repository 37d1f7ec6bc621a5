"""Quadrature, transform oracles, finite differences and seeded random streams.

Quadrature is delegated to QUADPACK (``scipy.integrate.quad``).  The wrappers
here add the pieces the rest of the package relies on: a declared endpoint
singularity is removed by a change of variables, semi-infinite integrals can
be truncated by an explicit decay bound, and every result is checked against
the requested tolerance instead of emitting a warning.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError

__all__ = [
    "Tolerance",
    "QuadResult",
    "DEFAULT_TOL",
    "integrate_interval",
    "integrate_semi_infinite",
    "laplace_transform_numeric",
    "fourier_cos_sin_numeric",
    "finite_difference",
    "RngStream",
    "uniform_stream",
    "worker_count",
    "map_blocks",
]

Func = Callable[[float], float]
T = TypeVar("T")


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer")

    def budget(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __post_init__(self) -> None:
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
        )

    def __float__(self) -> float:
        return float(self.value)


_ZERO = QuadResult(0.0, 0.0, 0)


def _checked(f: Func) -> Func:
    def g(x: float) -> float:
        y = f(x)
        if y != y:
            raise ConvergenceError(f"integrand returned NaN at x={x!r}")
        return y

    return g


def _quad(f: Func, a: float, b: float, tol: Tolerance, **kw) -> QuadResult:
    # QUADPACK stops at err <= max(epsabs, epsrel*|I|); with full_output it
    # reports problems through ier instead of warnings, and we judge the
    # returned estimate ourselves.
    out = integrate.quad(
        _checked(f), a, b,
        epsabs=tol.abs_tol, epsrel=tol.rel_tol, limit=int(tol.max_subdivisions),
        full_output=1, **kw,
    )
    value, err, info = out[0], out[1], out[2]
    if not math.isfinite(value):
        raise ConvergenceError(f"quadrature produced {value} on [{a}, {b}]")
    neval = int(info.get("neval", 0)) if isinstance(info, dict) else 0
    return QuadResult(float(value), float(abs(err)), neval)


def _verify(res: QuadResult, tol: Tolerance, what: str) -> QuadResult:
    if res.error_estimate > tol.budget(res.value):
        raise ConvergenceError(
            f"{what}: error estimate {res.error_estimate:.3g} exceeds "
            f"budget {tol.budget(res.value):.3g} (value {res.value:.17g})"
        )
    return res


def _singular_piece(f: Func, a: float, b: float, p: float, tol: Tolerance) -> QuadResult:
    # x = a + u**q, q = 1/(1-p) turns (x-a)**(-p) into a bounded factor.
    if not p < 1:
        raise DomainError(f"singularity exponent must be < 1, got {p}")
    if p <= 0:
        return _quad(f, a, b, tol)
    q = 1.0 / (1.0 - p)

    def g(u: float) -> float:
        # QUADPACK never samples the endpoints, so u > 0 here
        return q * u ** (q - 1.0) * f(a + u ** q)

    return _quad(g, 0.0, (b - a) ** (1.0 - p), tol)


def integrate_interval(f: Func, a: float, b: float, tol: Tolerance = DEFAULT_TOL,
                       singularity: float | None = None,
                       points: Sequence[float] | None = None) -> QuadResult:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    ``singularity=p`` declares ``|f(x)| ~ (x - a)**(-p)`` near the left
    endpoint; the piece adjacent to ``a`` is then integrated after the
    substitution ``x = a + u**(1/(1-p))``.
    """
    if not b > a:
        if b == a:
            return _ZERO
        raise DomainError("integration bounds must satisfy a < b")
    breaks = sorted({a, b, *(x for x in (points or ()) if a < x < b)})
    total = _ZERO
    for i, (lo, hi) in enumerate(zip(breaks[:-1], breaks[1:])):
        if i == 0 and singularity:
            total = total + _singular_piece(f, lo, hi, singularity, tol)
        else:
            total = total + _quad(f, lo, hi, tol)
    return _verify(total, tol, "integrate_interval")


def _tail_cut(bound: float, rate: float, tol: Tolerance) -> float:
    # tail of bound*exp(-rate*x) beyond T is below abs_tol/10
    return max(math.log(10.0 * bound / (rate * tol.abs_tol)) / rate, 0.0)


def integrate_semi_infinite(f: Func, tol: Tolerance = DEFAULT_TOL,
                            singularity: float | None = None,
                            decay: tuple[float, float] | None = None,
                            split: float = 1.0) -> QuadResult:
    """Integrate ``f`` over ``(0, inf)``.

    ``singularity`` declares an integrable ``x**(-p)`` behaviour at zero.
    ``decay=(C, r)`` asserts ``|f(x)| <= C*exp(-r*x)`` and replaces the
    infinite range by ``(0, T]`` with the tail below ``abs_tol/10``;
    without it the tail is mapped to a finite range by QUADPACK.
    """
    head = _singular_piece(f, 0.0, split, singularity, tol) if singularity else _quad(f, 0.0, split, tol)
    if decay is not None:
        cut = _tail_cut(decay[0], decay[1], tol)
        tail = _quad(f, split, cut, tol) if cut > split else _ZERO
        tail = QuadResult(tail.value, tail.error_estimate + tol.abs_tol / 10, tail.evaluations)
    else:
        tail = _quad(f, split, math.inf, tol)
    return _verify(head + tail, tol, "integrate_semi_infinite")


def laplace_transform_numeric(f: Func, s: float, tol: Tolerance = DEFAULT_TOL,
                              singularity: float | None = None,
                              bound: float | None = None) -> QuadResult:
    """Numerical Laplace transform ``int_0^inf exp(-s t) f(t) dt``.

    ``bound`` is an optional constant with ``|f(t)| <= bound`` away from the
    origin; it activates the explicit truncation rule.
    """
    if not s > 0:
        raise DomainError("Laplace variable must be positive")

    def g(t: float) -> float:
        return math.exp(-s * t) * f(t)

    decay = (bound, s) if bound is not None else None
    return integrate_semi_infinite(g, tol, singularity=singularity, decay=decay,
                                   split=min(1.0, 1.0 / s))


def fourier_cos_sin_numeric(f: Func, kappa: float, kind: str,
                            tol: Tolerance = DEFAULT_TOL) -> QuadResult:
    """Cosine or sine transform ``int_0^inf trig(kappa x) f(x) dx``."""
    if kind not in ("cos", "sin"):
        raise DomainError(f"kind must be 'cos' or 'sin', got {kind!r}")
    if kappa == 0:
        return integrate_semi_infinite(f, tol) if kind == "cos" else _ZERO
    sign = -1.0 if (kappa < 0 and kind == "sin") else 1.0
    # QAWF ignores epsrel and needs a finite starting epsabs
    res = _quad(f, 0.0, math.inf, tol, weight=kind, wvar=abs(kappa))
    res = QuadResult(sign * res.value, res.error_estimate, res.evaluations)
    try:
        return _verify(res, tol, "fourier_cos_sin_numeric")
    except ConvergenceError as exc:
        raise ConvergenceError(f"oscillatory integral not resolved at kappa={kappa}: {exc}") from None


_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def finite_difference(f: Func, t: float, order: int, h: float) -> float:
    """Central-difference estimate of the ``order``-th derivative, O(h^2)."""
    if order not in _STENCILS:
        raise DomainError(f"order must be in 1..4, got {order}")
    if not h > 0:
        raise DomainError("step h must be positive")
    acc = math.fsum(w * f(t + k * h) for k, w in _STENCILS[order])
    return acc / h ** order


class RngStream:
    """Deterministic uniform(0,1) stream keyed by ``(seed, stream_id)``.

    Streams with different ids are spawned children of the same
    ``SeedSequence`` and therefore independent.  A stream is stateful and
    belongs to one consumer at a time.
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise DomainError("seed must be an integer")
        if not 0 <= int(seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if int(stream_id) != stream_id or stream_id < 0:
            raise DomainError("stream_id must be a non-negative integer")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniform(self, size: int | None = None):
        # 53 random bits, shifted to the cell midpoint: never 0, never 1
        k = self._gen.integers(0, 2 ** 53, size=size, dtype=np.int64)
        u = (k + 0.5) * 2.0 ** -53
        return float(u) if size is None else u


def uniform_stream(rng: RngStream, n: int) -> np.ndarray:
    """Next ``n`` uniforms of ``rng``; values lie strictly inside (0, 1)."""
    return rng.uniform(int(n))


def worker_count() -> int:
    """Worker cap from ``MLQ_THREADS`` (default 1)."""
    raw = os.environ.get("MLQ_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"MLQ_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise DomainError(f"MLQ_THREADS must be a positive integer, got {raw!r}")
    return n


def map_blocks(fn: Callable[[int], T], blocks: Iterable[int]) -> list[T]:
    """Apply ``fn`` to block indices; results come back in block order.

    Each block owns its random stream, so the worker count changes only the
    wall time, never the output.
    """
    blocks = list(blocks)
    n = min(worker_count(), len(blocks)) or 1
    if n == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, blocks))
