"""Dispersion function of the normal phase and growth rates of its unstable modes.

Normal modes of the linearized field/kinetic system exist when D_n(s) = 0 for
some integer n >= 0.  The search is restricted to the positive real s axis
(s = gamma > 0, omega = 0), which is where this system's unstable roots live.

Separability
------------
In dimensionless variables the double integral entering D_n runs over the
product distribution

    f0(xi, u) = [exp(-xi^2/ell^2) / (sqrt(pi) ell)] * [exp(-u^2/2) / sqrt(2 pi)],

and the integrand is f0 times a function of u alone.  The xi integral of the
normalized Gaussian profile is exactly one, so the double integral reduces to
a single Maxwellian velocity average

    D_n(gamma) = (2n+1) pi - 2 pi zeta0 eps * V(gamma),
    V(gamma)   = < u^2 / (gamma^2 + u^2) >_u,

independent of ell.  The 2D quadrature oracle in the test suite cross-checks
this reduction.  V decreases strictly from V(0) = 1 to 0, so D_n is strictly
increasing in gamma and has at most one positive root per branch; the root
exists precisely when eps > (1+2n) * eps_c with eps_c = 1/(2 zeta0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import Params, critical_pump
from .numerics import find_root, quad_adaptive, quad_hermite

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class ModeParameter:
    """Real growth rate and frequency of a normal mode (units beta_m * v_th)."""

    gamma: float
    omega: float = 0.0


@dataclass(frozen=True)
class StabilityReport:
    """Stability of branch n at one pump strength: gamma present iff unstable."""

    n: int
    eps: float
    eps_over_eps_c: float
    gamma: float | None


def velocity_integral(gamma: float, method: str = "adaptive", order: int = 200) -> float:
    """Maxwellian velocity average V(gamma) = < u^2/(gamma^2+u^2) > over N(0,1).

    ``method='adaptive'`` resolves the Lorentzian dip of width gamma at any
    gamma > 0 and is the default.  ``method='hermite'`` uses Gauss-Hermite
    quadrature of the given order; accurate for gamma of order one and above,
    it underresolves the kernel for gamma well below the node spacing.
    """
    gamma = float(gamma)
    if gamma < 0.0:
        raise DomainError("gamma must be >= 0")
    if gamma == 0.0:
        return 1.0
    if method == "hermite":
        # u = sqrt(2) x maps the weight onto exp(-x^2)
        return quad_hermite(lambda x: (2.0 / np.sqrt(np.pi)) * x * x / (gamma * gamma + 2.0 * x * x), order)
    if method != "adaptive":
        raise DomainError(f"unknown velocity integral method {method!r}")

    def kernel(u):
        return (u * u / (gamma * gamma + u * u)) * np.exp(-0.5 * u * u) / _SQRT_2PI

    from scipy.integrate import quad

    upper = max(12.0, 6.0 * gamma)
    # short panels bracketing the Lorentzian dip keep QUADPACK happy at any gamma
    cuts = sorted({c for c in (gamma, 3.0 * gamma, 10.0 * gamma, 1.0, 3.0, upper) if c <= upper})
    total = 0.0
    err = 0.0
    lo = 0.0
    for hi in cuts:
        if hi > lo:
            piece, piece_err = quad(kernel, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
            total += piece
            err += piece_err
            lo = hi
    if err > 1e-9 * (1.0 + abs(total)):
        from .errors import AccuracyError
        raise AccuracyError(f"velocity integral error estimate {err:g} above 1e-9 relative")
    return 2.0 * total


def dispersion(n: int, gamma: float, params: Params, method: str = "adaptive") -> float:
    """Dimensionless dispersion function D_n evaluated on the real axis.

    Continuous and strictly increasing in gamma; D_n -> (2n+1) pi for
    gamma -> infinity and for eps = 0.
    """
    if n < 0:
        raise DomainError("branch index n must be >= 0")
    v = velocity_integral(gamma, method=method)
    return (2 * n + 1) * np.pi - 2.0 * np.pi * params.zeta0 * params.eps * v


def growth_rate(n: int, params: Params) -> ModeParameter | None:
    """Unique positive growth rate of branch n, or None at/below threshold.

    The root exists iff eps > (1+2n) eps_c; monotonicity of the dispersion
    function guarantees uniqueness (checked by a property test).
    """
    d0 = dispersion(n, 0.0, params)
    if d0 >= 0.0:
        return None
    hi = 1.0
    while dispersion(n, hi, params) <= 0.0:
        hi *= 2.0
        if hi > 1e8:  # unreachable for finite eps; guards an infinite loop
            raise DomainError("growth rate bracket expansion failed")
    root = find_root(lambda g: dispersion(n, g, params), (0.0, hi), tol=1e-12)
    return ModeParameter(gamma=root.location, omega=0.0)


def threshold_scan(params: Params, eps_grid) -> list[StabilityReport]:
    """Stability reports on an ascending eps grid for branches 0..n_max."""
    eps_grid = [float(e) for e in eps_grid]
    if any(b <= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise DomainError("eps_grid must be strictly ascending")
    eps_c = critical_pump(params.zeta0)
    reports = []
    for n in range(params.n_max + 1):
        for eps in eps_grid:
            mode = growth_rate(n, params.with_eps(eps))
            reports.append(StabilityReport(
                n=n, eps=eps, eps_over_eps_c=eps / eps_c,
                gamma=None if mode is None else mode.gamma,
            ))
    return reports


def measure_threshold(zeta0: float, n: int = 0, rel_tol: float = 1e-6) -> float:
    """Pump threshold of branch n measured by bisecting growth-rate existence.

    Purely numerical: brackets the first eps with a positive dispersion root.
    """
    nominal = (1 + 2 * n) * critical_pump(zeta0)
    lo, hi = 0.5 * nominal, 2.0 * nominal
    base = Params(zeta0=zeta0, eps=nominal)

    def unstable(eps: float) -> bool:
        return growth_rate(n, base.with_eps(eps)) is not None

    if unstable(lo) or not unstable(hi):
        raise DomainError("threshold bracket does not straddle the instability onset")
    while hi - lo > rel_tol * nominal * 0.5:
        mid = 0.5 * (lo + hi)
        if unstable(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def write_threshold_csv(reports: list[StabilityReport], path) -> None:
    """CSV with columns n, eps, eps_over_eps_c, gamma (empty when stable)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# fibercryst-csv v1 threshold\n")
        fh.write("n,eps,eps_over_eps_c,gamma\n")
        for r in reports:
            gamma = "" if r.gamma is None else f"{r.gamma:.17g}"
            fh.write(f"{r.n},{r.eps:.17g},{r.eps_over_eps_c:.17g},{gamma}\n")
