"""Log-space power-series summation shared by the Mittag-Leffler and Wright code."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import CancellationError, ConvergenceError, SeriesDomainError

EPS = np.finfo(float).eps
_CHUNK = 64
_LOG_MAX = 700.0

CoefFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def rgamma_log(x) -> tuple[np.ndarray, np.ndarray]:
    """``log|1/Gamma(x)|`` and the sign of ``1/Gamma(x)``.

    At the poles (non-positive integers) the reciprocal is exactly zero:
    the log is ``-inf`` and the sign is 0.  Arguments within a few ulps of a
    pole are snapped onto it, since they only arise from rounding in
    expressions like ``1 - nu*(n+1)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = np.rint(x)
    pole = (r <= 0) & (np.abs(x - r) <= 64 * EPS * np.maximum(1.0, np.abs(x)))
    safe = np.where(pole, 0.5, x)
    lg = -gammaln(safe)
    sg = gammasgn(safe)
    lg[pole] = -np.inf
    sg[pole] = 0.0
    return lg, sg


def rgamma(x: float) -> float:
    lg, sg = rgamma_log(x)
    return float(sg[0] * math.exp(lg[0])) if sg[0] else 0.0


@dataclass(frozen=True)
class SeriesSum:
    value: float
    error: float
    max_term: float
    n_terms: int


def sum_power_series(coef: CoefFn, z: float, abs_tol: float,
                     cancel_limit: float | None = 1e8,
                     max_terms: int = 200_000) -> SeriesSum:
    """Sum ``sum_n c_n z**n`` with ``coef(n) -> (log|c_n|, sign c_n)``.

    Summation stops once a whole chunk of terms lies below
    ``min(abs_tol, eps*|S|/8)`` and the chunk is decreasing.  The error
    reported is twice the last term plus the rounding floor
    ``(2 + max|log term|) * eps * sum|terms|``.
    """
    if z == 0:
        lc, sc = coef(np.zeros(1))
        v = float(sc[0] * np.exp(lc[0])) if sc[0] else 0.0
        return SeriesSum(v, EPS * abs(v), abs(v), 1)
    logz = math.log(abs(z))
    neg = z < 0
    parts: list[float] = []
    abs_sum = 0.0
    max_term = 0.0
    max_log = 0.0
    has_neg = False
    start = 0
    while True:
        n = np.arange(start, start + _CHUNK, dtype=float)
        lc, sc = coef(n)
        lt = lc + n * logz
        live = sc != 0
        if np.any(lt[live] > _LOG_MAX):
            if neg and cancel_limit is not None:
                raise CancellationError(f"alternating series terms overflow at z={z!r}")
            raise SeriesDomainError(f"series term overflows at z={z!r}")
        sgn = sc * (np.where(n % 2 == 1, -1.0, 1.0) if neg else 1.0)
        mag = np.where(live, np.exp(np.where(live, lt, -np.inf)), 0.0)
        terms = sgn * mag
        # one correctly rounded sum per chunk keeps this linear in the
        # number of terms; the extra rounding is inside the error floor
        parts.append(math.fsum(terms.tolist()))
        has_neg = has_neg or bool(np.any(terms < 0))
        abs_sum += float(mag.sum())
        max_term = max(max_term, float(mag.max()))
        if live.any():
            max_log = max(max_log, float(np.abs(lt[live]).max()))
        s = math.fsum(parts)
        thresh = min(abs_tol, EPS * abs(s) / 8) if s != 0 else abs_tol * EPS
        nz = mag[live]
        if nz.size == 0 or (nz.max() < thresh and nz[0] >= nz[-1]):
            if nz.size == 0 and start < 4 * _CHUNK:
                start += _CHUNK
                continue
            break
        start += _CHUNK
        if start > max_terms:
            raise ConvergenceError(f"power series did not converge within {max_terms} terms")
    tail = 2.0 * float(nz[-1]) if nz.size else 0.0
    err = tail + (2.0 + max_log) * EPS * abs_sum
    if cancel_limit is not None and max_term > cancel_limit * abs(s) and has_neg:
        raise CancellationError(
            f"alternating series loses precision: max term {max_term:.3g} vs sum {s:.3g}"
        )
    return SeriesSum(float(s), float(err), max_term, start + _CHUNK)
