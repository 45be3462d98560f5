"""Order-parameter branch equations, enumeration and continuation.

Two closed equations determine the order parameter Theta of the crystalline
state for branch index n:

* weak collective coupling (zeta0 <= 1), pump<->mode scattering dominant:

      2 zeta0 I1(2 eps sqrt(Theta)) = (1+2n) sqrt(Theta) I0(2 eps sqrt(Theta))

* strong collective coupling (zeta0 >> 1):

      zeta0 eps pi = 4 (1+2n) P(Theta) K[(P(Theta) Theta)^2],
      P(Theta) = (1 + 2 eps Theta) / (4 + 6 eps Theta)

with K the complete elliptic integral of the first kind (parameter
convention), which bounds the order parameter by P*Theta < 1, i.e.
Theta < 4 in the small-eps*Theta limit.

Both equations bifurcate from Theta = 0 at eps = (1+2n) * eps_c.  Roots are
searched on Theta in (1e-9, 4): the lower cutoff separates ordered roots from
the ever-present Theta = 0 solution, the upper cutoff is the bound above.
At intermediate coupling 1 < zeta0 < 10 neither regime is authoritative;
both can be computed side by side and reported without adjudication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError
from .model import Params, critical_pump
from .numerics import bessel_i0, bessel_i1, elliptic_k, find_root, scan_roots

THETA_MIN = 1e-9
THETA_MAX = 4.0

WEAK = "weak"
STRONG = "strong"


@dataclass(frozen=True)
class BranchPoint:
    """One (eps, Theta) point on an ordered branch; theta == 0 marks the normal phase."""

    n: int
    eps: float
    theta: float
    regime: str


@dataclass
class BranchCurve:
    """Ascending-eps trace of one branch, with an optional onset/fold jump."""

    n: int
    regime: str
    zeta0: float
    points: list[BranchPoint] = field(default_factory=list)
    jump: tuple[float, float] | None = None  # (eps*, delta_theta)
    stalled: bool = False

    def eps_values(self) -> np.ndarray:
        return np.array([p.eps for p in self.points])

    def theta_values(self) -> np.ndarray:
        return np.array([p.theta for p in self.points])


def weak_residual(theta: float, eps: float, zeta0: float, n: int) -> float:
    """Residual of the weak-coupling branch equation; zero at solutions."""
    if theta < 0.0:
        raise DomainError(f"theta must be >= 0, got {theta!r}")
    root_theta = math.sqrt(theta)
    x = 2.0 * eps * root_theta
    return 2.0 * zeta0 * bessel_i1(x) - (1 + 2 * n) * root_theta * bessel_i0(x)


def strong_p(theta: float, eps: float) -> float:
    """Phase-average factor P(Theta) of the strong-coupling equation."""
    a = eps * theta
    return (1.0 + 2.0 * a) / (4.0 + 6.0 * a)


def strong_residual(theta: float, eps: float, zeta0: float, n: int) -> float:
    """Residual of the strong-coupling branch equation; zero at solutions.

    Raises :class:`DomainError` once (P*Theta)^2 >= 1, where the elliptic
    integral diverges and the order parameter exceeds its bound.
    """
    if theta <= 0.0:
        raise DomainError(f"theta must be > 0, got {theta!r}")
    p = strong_p(theta, eps)
    m = (p * theta) ** 2
    if m >= 1.0:
        raise DomainError(f"(P*Theta)^2 = {m:g} >= 1: order parameter beyond its bound")
    return zeta0 * eps * math.pi - 4.0 * (1 + 2 * n) * p * elliptic_k(m)


def strong_theta_bound(eps: float) -> float:
    """Largest Theta with P(Theta)*Theta < 1 (equals 4 at eps = 0)."""
    if eps <= 0.0:
        return THETA_MAX
    b = 1.0 - 6.0 * eps
    return (-b + math.sqrt(b * b + 32.0 * eps)) / (4.0 * eps)


def _reduced_weak(theta: float, eps: float, zeta0: float, n: int) -> float:
    # weak_residual / sqrt(theta): finite and nonzero at theta -> 0,
    # which separates the ordered root from the trivial one
    root_theta = math.sqrt(theta)
    x = 2.0 * eps * root_theta
    if x == 0.0:
        return 2.0 * zeta0 * eps - (1 + 2 * n)
    return 2.0 * zeta0 * bessel_i1(x) / root_theta - (1 + 2 * n) * bessel_i0(x)


def _scan_grid(lo: float, hi: float, points: int = 1200) -> np.ndarray:
    # log-spaced near zero to catch onset roots, linear across the rest
    log_part = np.geomspace(lo, hi, points // 2)
    lin_part = np.linspace(lo, hi, points // 2)
    return np.unique(np.concatenate([log_part, lin_part]))


def branch_roots(zeta0: float, eps: float, n: int, regime: str, points: int = 1200) -> list[float]:
    """All nonzero order-parameter roots for one branch index, sorted by Theta."""
    if eps < 0.0:
        raise DomainError("eps must be >= 0")
    if regime == WEAK:
        f = lambda t: _reduced_weak(t, eps, zeta0, n)
        hi = THETA_MAX
    elif regime == STRONG:
        def f(t):
            # rounding can push (P*Theta)^2 to 1 exactly at the scan edge;
            # the residual diverges to -inf there, so a large negative
            # sentinel keeps the sign scan consistent
            try:
                return strong_residual(t, eps, zeta0, n)
            except DomainError:
                return -1e300
        hi = min(THETA_MAX, strong_theta_bound(eps) * (1.0 - 1e-12))
    else:
        raise DomainError(f"unknown regime {regime!r}")
    if eps == 0.0:
        return []
    roots = scan_roots(f, _scan_grid(THETA_MIN, hi, points), tol=1e-14)
    polished = []
    for root in roots:
        x = root.location
        # secant polish: steep residuals (elliptic singularity) need more
        # than bracket tolerance to push |f| itself below 1e-10
        try:
            fx = f(x)
            step = 1e-9 * max(abs(x), 1e-6)
            for _ in range(8):
                if abs(fx) <= 1e-12:
                    break
                probe = x + step if x + step < hi else x - step
                slope = (f(probe) - fx) / (probe - x)
                if slope == 0.0:
                    break
                x_new = x - fx / slope
                if not (THETA_MIN * 0.5 <= x_new < hi):
                    break
                x, fx = x_new, f(x_new)
                step = max(1e-12 * abs(x), 1e-15)
        except DomainError:
            pass
        polished.append(x)
    return sorted(polished)


def solve_branches(params: Params, regime: str) -> list[BranchPoint]:
    """All ordered solutions for n = 0..n_max at the given parameters.

    Empty list means only the normal phase exists.  Multiple roots on one
    branch index are all returned, ordered by Theta; no stability label is
    attached.
    """
    points: list[BranchPoint] = []
    for n in range(params.n_max + 1):
        for theta in branch_roots(params.zeta0, params.eps, n, regime):
            points.append(BranchPoint(n=n, eps=params.eps, theta=theta, regime=regime))
    return points


def _nearest(values: list[float], target: float) -> float | None:
    if not values:
        return None
    return min(values, key=lambda v: abs(v - target))


def trace_branch(zeta0: float, n: int, eps_range: tuple[float, float], steps: int,
                 regime: str, max_refinements: int = 6) -> BranchCurve:
    """Natural-parameter continuation of Theta(eps) for one branch index.

    Above onset the nearest root to the previous point is followed; below
    onset explicit theta = 0 markers are emitted.  A gap between adjacent
    points that survives 10x step refinement without shrinking by 2x is
    recorded as a discontinuity (eps*, delta_theta).  If root finding fails
    the partial curve is returned with ``stalled`` set.
    """
    lo, hi = float(eps_range[0]), float(eps_range[1])
    if not (hi > lo and steps >= 2):
        raise DomainError("eps_range must be increasing and steps >= 2")
    curve = BranchCurve(n=n, regime=regime, zeta0=zeta0)
    eps_grid = list(np.linspace(lo, hi, steps + 1))

    def theta_at(eps: float, prev: float) -> float:
        roots = branch_roots(zeta0, eps, n, regime)
        chosen = _nearest(roots, prev)
        return 0.0 if chosen is None else chosen

    try:
        prev_theta = 0.0
        samples: list[tuple[float, float]] = []
        for eps in eps_grid:
            prev_theta = theta_at(eps, prev_theta)
            samples.append((eps, prev_theta))

        # refine the largest inter-sample gap until it closes or proves a jump
        for _ in range(max_refinements):
            gaps = [abs(b[1] - a[1]) for a, b in zip(samples, samples[1:])]
            if not gaps:
                break
            worst = int(np.argmax(gaps))
            gap = gaps[worst]
            others = sorted(gaps)
            resolution = others[len(others) // 2] if len(others) > 1 else 0.0
            if gap <= max(10.0 * resolution, 1e-8):
                break
            (e0, t0), (e1, _) = samples[worst], samples[worst + 1]
            inserted = []
            t_prev = t0
            for e in np.linspace(e0, e1, 11)[1:-1]:
                t_prev = theta_at(e, t_prev)
                inserted.append((float(e), t_prev))
            samples = samples[: worst + 1] + inserted + samples[worst + 1:]
            new_gaps = [abs(b[1] - a[1]) for a, b in
                        zip(samples[worst: worst + 12], samples[worst + 1: worst + 13])]
            new_gap = max(new_gaps)
            if new_gap > 0.5 * gap:
                j = worst + int(np.argmax(new_gaps))
                eps_star = 0.5 * (samples[j][0] + samples[j + 1][0])
                curve.jump = (eps_star, new_gap)
                break
    except (DomainError, AccuracyError):
        curve.stalled = True

    curve.points = [BranchPoint(n=n, eps=e, theta=t, regime=regime) for e, t in samples]
    return curve


def jump_magnitude(zeta0: float) -> float:
    """Order-parameter jump 16*(zeta0 - 1) of the discontinuous onset regime."""
    if zeta0 <= 1.0:
        raise DomainError(f"jump_magnitude requires zeta0 > 1 (continuous onset below), got {zeta0!r}")
    return 16.0 * (zeta0 - 1.0)


def measure_onset_discontinuity(zeta0: float, n: int = 0, regime: str = WEAK,
                                rel_window: float = 1e-6) -> float:
    """Limit of Theta as eps approaches the branch onset from above.

    Zero for a continuous bifurcation; a positive value is the measured
    discontinuity of the traced curve at onset.  Measured by step refinement
    toward eps_c.
    """
    eps_c = (1 + 2 * n) * critical_pump(zeta0)
    theta_lim = None
    for factor in (1e-2, 1e-3, 1e-4, 1e-5, rel_window):
        eps = eps_c * (1.0 + factor)
        roots = branch_roots(zeta0, eps, n, regime)
        theta_lim = min(roots) if roots else 0.0
    return float(theta_lim)


def onset_exponent(zeta0: float, n: int = 0, regime: str = WEAK, return_details: bool = False):
    """Scaling exponent of Theta vs (eps - eps_c) just above onset.

    Log-log least squares over (eps-eps_c)/eps_c in [1e-4, 1e-2].  Raises
    :class:`AccuracyError` when the fit is not credibly a power law.
    """
    if zeta0 > 1.0 and regime == WEAK:
        raise DomainError("onset_exponent applies to the continuous regime zeta0 <= 1")
    eps_c = (1 + 2 * n) * critical_pump(zeta0)
    rel = np.geomspace(1e-4, 1e-2, 25)
    thetas = []
    for x in rel:
        roots = branch_roots(zeta0, eps_c * (1.0 + x), n, regime)
        thetas.append(min(roots) if roots else np.nan)
    thetas = np.array(thetas)
    good = np.isfinite(thetas) & (thetas > 0.0)
    if good.sum() < 10:
        raise AccuracyError("too few ordered roots above onset for a scaling fit")
    lx = np.log(rel[good] * eps_c)
    ly = np.log(thetas[good])
    slope, intercept = np.polyfit(lx, ly, 1)
    fit = slope * lx + intercept
    ss_res = float(np.sum((ly - fit) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < 0.98:
        raise AccuracyError(f"onset fit is not a power law (R^2 = {r2:.4f})")
    if return_details:
        return float(slope), float(np.exp(intercept)), r2
    return float(slope)


def write_branch_csv(curve: BranchCurve, path) -> None:
    """CSV with columns n, eps, eps_over_eps_c, theta, regime, fold_flag."""
    eps_c = critical_pump(curve.zeta0)
    spacing = (curve.points[1].eps - curve.points[0].eps) if len(curve.points) > 1 else 0.0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# fibercryst-csv v1 branches\n")
        fh.write(f"# zeta0={curve.zeta0:.17g} n={curve.n} regime={curve.regime}\n")
        if curve.jump is not None:
            fh.write(f"# jump eps={curve.jump[0]:.17g} delta_theta={curve.jump[1]:.17g}\n")
        fh.write("n,eps,eps_over_eps_c,theta,regime,fold_flag\n")
        for p in curve.points:
            near_jump = curve.jump is not None and abs(p.eps - curve.jump[0]) <= spacing
            fh.write(f"{p.n},{p.eps:.17g},{p.eps / eps_c:.17g},"
                     f"{p.theta:.17g},{p.regime},{int(near_jump)}\n")
