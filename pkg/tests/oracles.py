"""Independent oracle implementations for the test suite.

Everything here is deliberately written as a separate code path from the
package: plain truncated series, AGM iteration, literal 2D quadrature,
closed forms, reference integrators.  Tests compare the package against
these, never the other way around.
"""

import numpy as np
from scipy.special import erf, erfc


def bessel_i0_series(x: float, terms: int = 40) -> float:
    """Truncated power series sum_k (x^2/4)^k / (k!)^2."""
    t = x * x / 4.0
    total = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= t / (k * k)
        total += term
    return total


def bessel_i1_series(x: float, terms: int = 40) -> float:
    """Truncated power series (x/2) sum_k (x^2/4)^k / (k! (k+1)!)."""
    t = x * x / 4.0
    total = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= t / (k * (k + 1))
        total += term
    return 0.5 * x * total


def bessel_i0_highprec(x: float) -> float:
    """mpmath reference value (50 digits)."""
    import mpmath
    with mpmath.workdps(50):
        return float(mpmath.besseli(0, x))


def bessel_i1_highprec(x: float) -> float:
    import mpmath
    with mpmath.workdps(50):
        return float(mpmath.besseli(1, x))


def elliptic_k_agm(m: float) -> float:
    """AGM oracle written independently: K = pi / (2 agm(1, sqrt(1-m)))."""
    a, g = 1.0, np.sqrt(1.0 - m)
    for _ in range(200):
        a_next = 0.5 * (a + g)
        g_next = np.sqrt(a * g)
        if a_next == a and g_next == g:
            break
        a, g = a_next, g_next
    return np.pi / (2.0 * a)


def velocity_integral_erfc(gamma: float) -> float:
    """Closed form of <u^2/(gamma^2+u^2)> over the standard normal.

    1 - gamma sqrt(pi/2) exp(gamma^2/2) erfc(gamma/sqrt(2)); the erfcx trick
    avoids overflow at large gamma.
    """
    from scipy.special import erfcx
    return 1.0 - gamma * np.sqrt(np.pi / 2.0) * erfcx(gamma / np.sqrt(2.0))


def _simpson_weights(n: int, h: float) -> np.ndarray:
    # composite Simpson, n odd number of points
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def dispersion_2d_quadrature(n: int, gamma: float, zeta0: float, eps: float,
                             ell: float = 100.0) -> float:
    """Literal 2D Simpson quadrature of the dispersion double integral.

    Integrates the full phase-space kernel
        G(xi) M(u) u^2/(gamma^2+u^2)
    over (xi, u) without using separability; G is the normalized Gaussian
    profile exp(-xi^2/ell^2)/(sqrt(pi) ell) and M the standard normal pdf.
    """
    n_xi = 801
    xi = np.linspace(-5.0 * ell, 5.0 * ell, n_xi)
    w_xi = _simpson_weights(n_xi, xi[1] - xi[0])
    g_profile = np.exp(-((xi / ell) ** 2)) / (np.sqrt(np.pi) * ell)

    # u grid: dense uniform panel across the Lorentzian dip, coarser wings
    inner = min(10.0 * gamma, 12.0)
    n_in = 3001
    n_out = 2001
    u_in = np.linspace(-inner, inner, n_in)
    w_in = _simpson_weights(n_in, u_in[1] - u_in[0])
    u_lo = np.linspace(-14.0, -inner, n_out)
    u_hi = np.linspace(inner, 14.0, n_out)
    w_out = _simpson_weights(n_out, u_hi[1] - u_hi[0])

    total = 0.0
    for u, w_u in ((u_in, w_in), (u_lo, w_out), (u_hi, w_out)):
        kern = (u * u / (gamma * gamma + u * u)) * np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
        # honest 2D sum over the tensor grid, chunked over xi rows
        block = np.outer(w_xi * g_profile, w_u * kern)
        total += float(block.sum())
    return (2 * n + 1) * np.pi - 2.0 * np.pi * zeta0 * eps * total


def outgoing_green_field(grid: np.ndarray, kappa: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Born-limit field by convolution with the outgoing Green function.

    e(xi) = -(1/2i) integral exp(i|xi - s|) kappa(s) ds, evaluated at the
    requested points by trapezoid on the supplied grid.
    """
    out = np.empty(points.size, dtype=complex)
    for k, x in enumerate(points):
        out[k] = np.trapezoid(np.exp(1j * np.abs(x - grid)) * kappa / (-2j), grid)
    return out


def ks_statistic_standard_normal(samples: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of the sample to the standard normal."""
    s = np.sort(samples)
    n = s.size
    cdf = 0.5 * (1.0 + erf(s / np.sqrt(2.0)))
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def bisection_root(f, lo: float, hi: float, iterations: int = 80) -> float:
    """Plain bisection, no cleverness."""
    flo = f(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if flo * fmid <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def dense_scan_roots(f, lo: float, hi: float, n_points: int) -> list[float]:
    """Sign-scan on n_points, bisection-refined; the brute-force root census."""
    grid = np.linspace(lo, hi, n_points)
    vals = np.array([f(x) for x in grid])
    roots = []
    for i in range(n_points - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(bisection_root(f, grid[i], grid[i + 1]))
    return roots


def trapezoid_velocity_kernel(gamma: float, panels: int = 1_000_000) -> float:
    """10^6-panel trapezoid evaluation of <u^2/(gamma^2+u^2)>."""
    u = np.linspace(-14.0, 14.0, panels + 1)
    f = (u * u / (gamma * gamma + u * u)) * np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
    return float(np.trapezoid(f, u))
