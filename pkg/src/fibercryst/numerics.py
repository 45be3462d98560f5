"""Special functions, root finding and quadrature used by every other module.

The modified Bessel functions and the complete elliptic integral are
implemented in-repo (power series plus large-argument asymptotics for I0/I1,
arithmetic-geometric mean for K) so that the test oracles and the library
remain independent code paths.  Root finding and adaptive quadrature are thin
wrappers over scipy with the error contracts used throughout the package.

All functions here are pure; there is no shared mutable state beyond a cache
of Gauss-Hermite nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import AccuracyError, BracketError, DomainError, RangeError

# Power series is accurate and cancellation-free for all x, but the
# asymptotic expansion needs far fewer terms beyond this point.
_SERIES_CUTOFF = 30.0
# exp(x) overflows just above x = 709; the contract caps |x| at 700.
_BESSEL_MAX_ARG = 700.0

ROOT_TOL = 1e-10  # default absolute tolerance on the independent variable


def _bessel_guard(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x!r}")
    if abs(x) > _BESSEL_MAX_ARG:
        raise RangeError(f"Bessel argument |x|={abs(x):g} exceeds overflow guard {_BESSEL_MAX_ARG:g}")
    return x


def _i0_series(ax: float) -> float:
    # I0(x) = sum_k (x^2/4)^k / (k!)^2, all terms positive
    t = 0.25 * ax * ax
    term = 1.0
    total = 1.0
    k = 1
    while True:
        term *= t / (k * k)
        total += term
        if term <= 1e-17 * total:
            return total
        k += 1


def _i1_series(ax: float) -> float:
    # I1(x) = (x/2) sum_k (x^2/4)^k / (k! (k+1)!)
    t = 0.25 * ax * ax
    term = 1.0
    total = 1.0
    k = 1
    while True:
        term *= t / (k * (k + 1))
        total += term
        if term <= 1e-17 * total:
            return 0.5 * ax * total
        k += 1


def _i_asymptotic(ax: float, nu: int) -> float:
    # I_nu(x) ~ e^x/sqrt(2 pi x) * sum_k c_k, c_0 = 1,
    # c_{k+1} = -c_k (mu - (2k+1)^2) / (8 x (k+1)), mu = 4 nu^2
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(60):
        term *= -(mu - (2 * k + 1) ** 2) / (8.0 * ax * (k + 1))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return math.exp(ax) / math.sqrt(2.0 * math.pi * ax) * total


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero.

    Relative error below 1e-12 for |x| <= 700.
    """
    x = _bessel_guard(x)
    ax = abs(x)
    if ax <= _SERIES_CUTOFF:
        return _i0_series(ax)
    return _i_asymptotic(ax, 0)


def bessel_i1(x: float) -> float:
    """Modified Bessel function of the first kind, order one (odd in x)."""
    x = _bessel_guard(x)
    ax = abs(x)
    if ax == 0.0:
        return 0.0
    val = _i1_series(ax) if ax <= _SERIES_CUTOFF else _i_asymptotic(ax, 1)
    return math.copysign(val, x)


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m).

    The argument is the *parameter* m (the squared modulus).  Diverges
    logarithmically as m -> 1; m >= 1 and m < 0 raise :class:`DomainError`.
    """
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise DomainError(f"elliptic_k requires 0 <= m < 1, got {m!r}")
    a, b = 1.0, math.sqrt(1.0 - m)
    # quadratic convergence: 60 iterations is far beyond what any m < 1 needs
    for _ in range(60):
        if abs(a - b) <= 4.0 * np.finfo(float).eps * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


@dataclass(frozen=True)
class BracketedRoot:
    """A root located inside a sign-changing bracket."""

    location: float
    residual: float
    bracket: tuple[float, float]


def find_root(f: Callable[[float], float], bracket: tuple[float, float], tol: float = ROOT_TOL) -> BracketedRoot:
    """Locate the root of ``f`` inside ``bracket`` to absolute tolerance ``tol``.

    Raises :class:`BracketError` when f does not change sign across the bracket.
    Deterministic: identical inputs give identical output.
    """
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return BracketedRoot(a, 0.0, (a, b))
    if fb == 0.0:
        return BracketedRoot(b, 0.0, (a, b))
    if fa * fb > 0.0:
        raise BracketError(f"no sign change on bracket ({a:g}, {b:g}): f(a)={fa:g}, f(b)={fb:g}")
    x0 = optimize.brentq(f, a, b, xtol=tol, rtol=8.0 * np.finfo(float).eps, maxiter=200)
    return BracketedRoot(float(x0), float(f(x0)), (a, b))


def find_all_roots(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    subdivisions: int,
    tol: float = ROOT_TOL,
) -> list[BracketedRoot]:
    """All roots of ``f`` on (lo, hi) found by a uniform sign scan.

    One root is reported per sign-changing subinterval, sorted ascending.
    An empty list is a valid result.
    """
    if subdivisions < 2:
        raise DomainError("subdivisions must be >= 2")
    grid = np.linspace(lo, hi, subdivisions + 1)
    return scan_roots(f, grid, tol=tol)


def scan_roots(f: Callable[[float], float], grid, tol: float = ROOT_TOL) -> list[BracketedRoot]:
    """Sign-scan ``f`` on an explicit (ascending) grid and polish each bracket."""
    grid = np.asarray(grid, dtype=float)
    vals = np.array([f(x) for x in grid])
    roots: list[BracketedRoot] = []
    for i in range(len(grid) - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            if not roots or abs(roots[-1].location - grid[i]) > tol:
                roots.append(BracketedRoot(float(grid[i]), 0.0, (float(grid[i]), float(grid[i + 1]))))
        elif fa * fb < 0.0:
            roots.append(find_root(f, (float(grid[i]), float(grid[i + 1])), tol=tol))
    if vals[-1] == 0.0:
        x = float(grid[-1])
        if not roots or abs(roots[-1].location - x) > tol:
            roots.append(BracketedRoot(x, 0.0, (float(grid[-2]), x)))
    return roots


def quad_adaptive(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Adaptive quadrature of ``f`` on (a, b); infinite endpoints allowed.

    Raises :class:`AccuracyError` when the requested tolerance cannot be met.
    """
    result, abserr = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=300)
    if abserr > tol * (1.0 + abs(result)) * 10.0:
        raise AccuracyError(f"quad_adaptive error estimate {abserr:g} exceeds tolerance for result {result:g}")
    return result


@lru_cache(maxsize=8)
def _hermgauss(order: int):
    x, w = np.polynomial.hermite.hermgauss(order)
    return x, w


def quad_hermite(f: Callable[[np.ndarray], np.ndarray], order: int = 200) -> float:
    """Gauss-Hermite quadrature of integral f(u) exp(-u^2) du over the real line.

    ``f`` is evaluated on the node vector, without the Gaussian weight.
    """
    if order < 1:
        raise DomainError("quad_hermite order must be >= 1")
    x, w = _hermgauss(int(order))
    return float(np.sum(w * np.asarray(f(x), dtype=float)))
