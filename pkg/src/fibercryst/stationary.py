"""Self-consistent stationary states of the field/gas system and their figure diagnostics.

The scattered-field envelope e(xi) (pump units) obeys

    e'' + (1 + 2 pi zeta0 nu(xi)) e = -2 pi zeta0 nu(xi)

with outgoing-wave (radiation) conditions e' = +i e at the right end and
e' = -i e at the left end.  The gas density nu is the thermal closure of
:func:`fibercryst.model.thermal_density`, which makes the problem a fixed
point:  field -> thermal density -> field.  The fixed point is solved by
under-relaxed iteration; each field update is one direct banded linear solve.

Discretization: second-order central differences on a uniform grid with
one-sided second-order radiation rows at the two boundary points.  The domain
is truncated at |xi| = 3*ell, far enough into the Gaussian tail for the
radiation rows to sit in near-vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.ndimage import maximum_filter1d
from scipy.signal import find_peaks

from .errors import ConvergenceError, DomainError
from .model import DensityProfile, Params, standard_grid, thermal_density

MAX_FIXED_POINT_ITERATIONS = 10_000
FIXED_POINT_TOL = 1e-8


@dataclass(frozen=True)
class FieldSolution:
    """Complex field envelope and derivative on a grid, in pump units."""

    grid: np.ndarray
    e: np.ndarray
    de: np.ndarray
    params: Params
    iterations: int
    residual: float


@dataclass(frozen=True)
class TravelingDecomposition:
    """Left/right running-wave content of a field solution.

    Nplus + Nminus = 1 pointwise; theta_local >= 0.
    """

    grid: np.ndarray
    Eplus: np.ndarray
    Eminus: np.ndarray
    theta_local: np.ndarray
    Nplus: np.ndarray
    Nminus: np.ndarray


def _derivative(grid: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Fourth-order central first derivative (second-order one-sided at edges)."""
    h = grid[1] - grid[0]
    de = np.empty_like(e)
    de[2:-2] = (-e[4:] + 8.0 * e[3:-1] - 8.0 * e[1:-3] + e[:-4]) / (12.0 * h)
    for j in (0, 1):
        de[j] = (-3.0 * e[j] + 4.0 * e[j + 1] - e[j + 2]) / (2.0 * h)
    for j in (-1, -2):
        de[j] = (3.0 * e[j] - 4.0 * e[j - 1] + e[j - 2]) / (2.0 * h)
    return de


def _check_grid(grid: np.ndarray) -> float:
    h = float(grid[1] - grid[0])
    if not np.allclose(np.diff(grid), h, rtol=1e-9, atol=1e-9 * h):
        raise DomainError("field grid must be uniform")
    if h > 2.0 * np.pi / 20.0:
        raise DomainError(f"grid spacing {h:g} coarser than 20 points per wavelength")
    return h


def helmholtz_residual(grid: np.ndarray, e: np.ndarray, kappa: np.ndarray) -> float:
    """Sup norm of the discretized equation including the radiation rows."""
    h = grid[1] - grid[0]
    res = np.zeros_like(e)
    res[1:-1] = (e[2:] - 2.0 * e[1:-1] + e[:-2]) / h**2 + (1.0 + kappa[1:-1]) * e[1:-1] + kappa[1:-1]
    res[0] = (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h) + 1j * e[0]
    res[-1] = (3.0 * e[-1] - 4.0 * e[-2] + e[-3]) / (2.0 * h) - 1j * e[-1]
    return float(np.max(np.abs(res)))


def helmholtz_solve(density: DensityProfile, params: Params) -> FieldSolution:
    """Direct solve of the radiation-condition boundary value problem.

    Linear and deterministic: one banded LU solve per call.
    """
    grid = density.grid
    h = _check_grid(grid)
    n = grid.size
    kappa = 2.0 * np.pi * params.zeta0 * density.values

    # banded storage, two super/sub diagonals (the one-sided boundary rows
    # reach two nodes into the interior)
    ab = np.zeros((5, n), dtype=complex)
    rhs = np.empty(n, dtype=complex)

    inv_h2 = 1.0 / h**2
    # interior rows: e_{j-1}/h^2 + (kappa_j + 1 - 2/h^2) e_j + e_{j+1}/h^2 = -kappa_j
    ab[1, 2:] = inv_h2                       # superdiagonal (j, j+1)
    ab[3, :-2] = inv_h2                      # subdiagonal (j, j-1)
    ab[2, 1:-1] = kappa[1:-1] + 1.0 - 2.0 * inv_h2
    rhs[1:-1] = -kappa[1:-1]

    # left radiation row: (-3 e_0 + 4 e_1 - e_2)/(2h) + i e_0 = 0
    ab[2, 0] = -3.0 / (2.0 * h) + 1j
    ab[1, 1] = 4.0 / (2.0 * h)
    ab[0, 2] = -1.0 / (2.0 * h)
    rhs[0] = 0.0
    # right radiation row: (3 e_N - 4 e_{N-1} + e_{N-2})/(2h) - i e_N = 0
    ab[2, -1] = 3.0 / (2.0 * h) - 1j
    ab[3, -2] = -4.0 / (2.0 * h)
    ab[4, -3] = 1.0 / (2.0 * h)
    rhs[-1] = 0.0

    e = solve_banded((2, 2), ab, rhs)
    return FieldSolution(
        grid=grid, e=e, de=_derivative(grid, e), params=params,
        iterations=0, residual=helmholtz_residual(grid, e, kappa),
    )


def zero_field(params: Params, points_per_wavelength: int = 24) -> FieldSolution:
    """The trivial normal-phase field on the standard grid."""
    grid = standard_grid(params, points_per_wavelength)
    z = np.zeros(grid.size, dtype=complex)
    return FieldSolution(grid=grid, e=z, de=z.copy(), params=params, iterations=0, residual=0.0)


def seed_field(params: Params, n: int, theta: float, points_per_wavelength: int = 24) -> FieldSolution:
    """Branch-targeted seed of amplitude sqrt(2*theta), phase modulated across the cloud.

    The running-wave mixing angle winds by (1+2n)*pi along the cloud (the
    angle follows the cumulative gas density), which plants n swap points of
    the left/right traveling fractions, and the carrier phase is chirped by
    the mean susceptibility so the oscillation is locally resonant inside the
    gas.  Branch 0 is a plain chirped standing wave.
    """
    grid = standard_grid(params, points_per_wavelength)
    h = grid[1] - grid[0]
    nu = np.exp(-((grid / params.ell) ** 2))
    nu /= np.trapezoid(nu, grid)
    kappa = 2.0 * np.pi * params.zeta0 * nu
    cdf = np.cumsum(nu) * h
    cdf /= cdf[-1]
    mixing = 0.5 * np.pi * (1.0 - (1 + 2 * n) * cdf)
    chirp = grid + np.cumsum(np.sqrt(1.0 + kappa) - 1.0) * h
    amplitude = np.sqrt(2.0 * max(theta, 0.0))
    e = amplitude * (np.cos(mixing) * np.exp(1j * chirp)
                     - 1j * np.sin(mixing) * np.exp(-1j * chirp))
    return FieldSolution(grid=grid, e=e, de=_derivative(grid, e), params=params,
                         iterations=0, residual=np.nan)


class _FieldView:
    """Minimal (grid, e) pair accepted by thermal_density."""

    __slots__ = ("grid", "e")

    def __init__(self, grid, e):
        self.grid = grid
        self.e = e


def solve_selfconsistent(params: Params, seed: FieldSolution | None = None,
                         relaxation: float = 0.3,
                         points_per_wavelength: int = 24,
                         tol: float = FIXED_POINT_TOL,
                         max_iterations: int = MAX_FIXED_POINT_ITERATIONS,
                         accelerate: bool = True) -> FieldSolution:
    """Fixed point of field -> thermal density -> Helmholtz solve.

    Under-relaxed update with automatic halving of the relaxation parameter
    when the residual history oscillates, and periodic Aitken extrapolation
    along the dominant slow direction (the fixed point itself is unchanged;
    ``accelerate=False`` recovers plain under-relaxed iteration).  Converged
    when successive fields differ by less than ``tol`` in sup norm; the
    returned solution additionally satisfies the discretized equation against
    its *own* thermal density to 1e-8 (independent audit).

    Raises :class:`ConvergenceError` carrying the last iterate when the
    iteration limit is exceeded.
    """
    if not 0.0 < relaxation <= 1.0:
        raise DomainError(f"relaxation must be in (0, 1], got {relaxation!r}")
    if seed is None:
        seed = zero_field(params, points_per_wavelength)
    grid = seed.grid
    _check_grid(grid)
    e = np.asarray(seed.e, dtype=complex).copy()

    r = relaxation
    previous_change = np.inf
    growth_streak = 0
    calm_streak = 0
    step_older: np.ndarray | None = None
    step_old: np.ndarray | None = None
    for iteration in range(1, max_iterations + 1):
        density = thermal_density(_FieldView(grid, e), params)
        solved = helmholtz_solve(density, params)
        change = float(np.max(np.abs(solved.e - e)))
        if change < tol:
            # candidate: the direct solve for the current density; accept once
            # it satisfies the discretized equation against its *own* thermal
            # density (stricter than the field-change test)
            own_kappa = 2.0 * np.pi * params.zeta0 * thermal_density(solved, params).values
            audit = helmholtz_residual(grid, solved.e, own_kappa)
            if audit <= 1e-8:
                return FieldSolution(grid=grid, e=solved.e, de=solved.de, params=params,
                                     iterations=iteration, residual=audit)
        step = r * (solved.e - e)
        e = e + step
        if accelerate and iteration % 40 == 0 and step_old is not None:
            # scalar contraction estimate along the dominant mode
            denom = float(np.vdot(step_older, step_older).real)
            if denom > 0.0:
                rho = float(np.vdot(step_older, step_old).real) / denom
                if 0.2 < rho < 0.999:
                    e = e + (rho / (1.0 - rho)) * step
        step_older, step_old = step_old, step
        if change > previous_change:
            growth_streak += 1
            calm_streak = 0
            if growth_streak >= 2:
                r = max(0.5 * r, 1e-3)  # halve on residual oscillation
                growth_streak = 0
        else:
            growth_streak = 0
            calm_streak += 1
            if calm_streak >= 100 and r < relaxation:
                r = min(1.5 * r, relaxation)  # recover after a calm stretch
                calm_streak = 0
        previous_change = change
    raise ConvergenceError(
        f"no fixed point within {max_iterations} iterations (last change {previous_change:.3e})",
        last=FieldSolution(grid=grid, e=e, de=_derivative(grid, e), params=params,
                           iterations=max_iterations, residual=np.nan),
    )


class _NewtonWorkspace:
    """Residual, Jacobian factorization and line search for the Newton solver.

    In the interleaved real ordering (Re e_0, Im e_0, Re e_1, ...) the exact
    Jacobian of the self-consistent residual is a bandwidth-4 matrix plus a
    rank-one term from the density normalization, so each Newton step costs
    two banded solves (Sherman-Morrison).
    """

    def __init__(self, grid: np.ndarray, params: Params):
        self.grid = grid
        self.h = _check_grid(grid)
        self.n = grid.size
        self.params = params
        self.weights = np.full(self.n, self.h)
        self.weights[0] = self.weights[-1] = 0.5 * self.h
        self.envelope = -((grid / params.ell) ** 2)
        self.two_pi_z0 = 2.0 * np.pi * params.zeta0

    def density(self, e: np.ndarray) -> np.ndarray:
        w_exp = self.envelope + self.params.eps * (np.abs(e) ** 2 + 2.0 * e.real)
        w = np.exp(w_exp - np.max(w_exp))
        return w / np.sum(self.weights * w)

    def residual(self, e: np.ndarray) -> np.ndarray:
        h = self.h
        kappa = self.two_pi_z0 * self.density(e)
        res = np.empty(self.n, dtype=complex)
        res[1:-1] = ((e[2:] - 2.0 * e[1:-1] + e[:-2]) / h**2
                     + (1.0 + kappa[1:-1]) * e[1:-1] + kappa[1:-1])
        res[0] = (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h) + 1j * e[0]
        res[-1] = (3.0 * e[-1] - 4.0 * e[-2] + e[-3]) / (2.0 * h) - 1j * e[-1]
        return res

    def newton_step(self, e: np.ndarray, shift: float = 0.0) -> np.ndarray:
        """Solve (J + shift*I) delta = -residual with the banded-plus-rank-one Jacobian.

        A positive ``shift`` regularizes the nearly soft lattice-translation
        direction (Levenberg style); shift=0 is the pure Newton step.
        """
        n, h = self.n, self.h
        eps = self.params.eps
        nu = self.density(e)
        kappa = self.two_pi_z0 * nu
        x, z = e.real, e.imag
        u = e + 1.0
        inv_h2 = 1.0 / h**2
        inv_2h = 1.0 / (2.0 * h)

        m = 2 * n
        bw = 4
        ab = np.zeros((2 * bw + 1, m))

        def put(i, j, val):
            ab[bw + i - j, j] = val

        def add(i, j, val):
            ab[bw + i - j, j] += val

        idx = np.arange(1, n - 1)
        rx, rz = 2 * idx, 2 * idx + 1
        diag = 1.0 + kappa[1:-1] - 2.0 * inv_h2 + shift
        # second-difference stencils for both quadratures
        for r in (rx, rz):
            ab[bw + 0, r] = diag
            ab[bw - 2, r + 2] = inv_h2   # (r, r+2)
            ab[bw + 2, r - 2] = inv_h2   # (r, r-2)
        # local density coupling: residual_row += u * kappa * (wx dx + wz dz)
        wx = 2.0 * eps * (x + 1.0)
        wz = 2.0 * eps * z
        ab[bw + 0, rx] += (u.real * kappa * wx)[1:-1]
        ab[bw - 1, rz] += (u.real * kappa * wz)[1:-1]      # (rx, rx+1)
        ab[bw + 1, rx] += (u.imag * kappa * wx)[1:-1]      # (rz, rz-1)
        ab[bw + 0, rz] += (u.imag * kappa * wz)[1:-1]

        # radiation rows (j = 0 and j = n-1) for both quadratures,
        # plus the -+ i e cross coupling
        put(0, 0, -3.0 * inv_2h); put(0, 2, 4.0 * inv_2h); put(0, 4, -inv_2h)
        add(0, 1, -1.0)
        put(1, 1, -3.0 * inv_2h); put(1, 3, 4.0 * inv_2h); put(1, 5, -inv_2h)
        add(1, 0, 1.0)
        last_x, last_z = 2 * (n - 1), 2 * (n - 1) + 1
        put(last_x, last_x, 3.0 * inv_2h); put(last_x, last_x - 2, -4.0 * inv_2h)
        put(last_x, last_x - 4, inv_2h)
        add(last_x, last_z, 1.0)
        put(last_z, last_z, 3.0 * inv_2h); put(last_z, last_z - 2, -4.0 * inv_2h)
        put(last_z, last_z - 4, inv_2h)
        add(last_z, last_x, -1.0)

        # rank-one normalization term: -(u kappa) <nu eps dW>
        a_vec = np.zeros(m)
        a_vec[rx] = -(u.real * kappa)[1:-1]
        a_vec[rz] = -(u.imag * kappa)[1:-1]
        b_vec = np.empty(m)
        s = self.weights * nu
        b_vec[0::2] = s * wx
        b_vec[1::2] = s * wz

        res = self.residual(e)
        rhs = np.empty(m)
        rhs[0::2] = -res.real
        rhs[1::2] = -res.imag

        # Sherman-Morrison: J = B + a b^T with banded B
        cols = solve_banded((bw, bw), ab, np.column_stack([rhs, a_vec]))
        y_r, y_a = cols[:, 0], cols[:, 1]
        dy = y_r - y_a * (float(b_vec @ y_r) / (1.0 + float(b_vec @ y_a)))
        return dy[0::2] + 1j * dy[1::2]


def solve_stationary_newton(params: Params, seed: FieldSolution,
                            tol: float = 1e-10, max_steps: int = 60,
                            max_step_norm: float = 1.0) -> FieldSolution:
    """Damped Newton solve of the self-consistent stationary system.

    Solves exactly the same discretized equations as the fixed-point
    iteration (thermal closure + radiation boundary rows), but as a root of
    the nonlinear residual with the exact Jacobian.  Unlike relaxation,
    Newton converges to coexisting solutions that are saddle points of the
    iteration map, which is what the higher branches of the strongly coupled
    system are.  The seed selects the branch.

    Raises :class:`ConvergenceError` when the residual does not reach ``tol``.
    """
    grid = seed.grid
    ws = _NewtonWorkspace(grid, params)
    e = np.asarray(seed.e, dtype=complex).copy()

    def norms(field):
        r = ws.residual(field)
        return float(np.max(np.abs(r))), float(np.linalg.norm(r))

    sup, two = norms(e)
    steps_used = 0
    shift = 0.0
    for step in range(max_steps):
        if sup <= tol:
            break
        accepted = False
        for _ in range(10):  # escalate the Levenberg shift until a step helps
            delta = ws.newton_step(e, shift=shift)
            size = float(np.max(np.abs(delta)))
            if size > max_step_norm:
                delta *= max_step_norm / size  # cap far from the root
            lam = 1.0
            for _ in range(20):
                trial = e + lam * delta
                t_sup, t_two = norms(trial)
                if t_two < two * (1.0 - 1e-9) or t_sup <= tol:
                    accepted = True
                    break
                lam *= 0.5
            if accepted:
                shift = shift / 3.0 if shift > 1e-12 else 0.0
                break
            shift = max(10.0 * shift, 1e-5)
        if not accepted:
            raise ConvergenceError(
                f"Newton line search stalled at residual {sup:.3e}",
                last=FieldSolution(grid=grid, e=e, de=_derivative(grid, e),
                                   params=params, iterations=step, residual=sup))
        e, sup, two = trial, t_sup, t_two
        steps_used = step + 1
    if sup > tol:
        raise ConvergenceError(
            f"Newton did not reach tol (residual {sup:.3e})",
            last=FieldSolution(grid=grid, e=e, de=_derivative(grid, e),
                               params=params, iterations=max_steps, residual=sup))
    return FieldSolution(grid=grid, e=e, de=_derivative(grid, e), params=params,
                         iterations=steps_used, residual=sup)


def solve_branch_continuation(params: Params, n: int, theta_of_eps,
                              eps_start: float | None = None, steps: int = 12,
                              points_per_wavelength: int = 24) -> FieldSolution:
    """Newton continuation in eps from just above the branch-n onset.

    ``theta_of_eps`` supplies the branch-equation amplitude used to build the
    first seed.  Warm starts make each continuation step a few Newton
    iterations; the final solution is at ``params.eps``.
    """
    from .model import critical_pump

    onset = (1 + 2 * n) * critical_pump(params.zeta0)
    if params.eps <= onset:
        raise DomainError(f"target eps {params.eps:g} below branch-{n} onset {onset:g}")
    if eps_start is None:
        eps_start = min(1.1 * onset, 0.5 * (onset + params.eps))
    path = np.geomspace(eps_start / onset, params.eps / onset, steps) * onset
    path[-1] = params.eps
    state: FieldSolution | None = None
    for eps in path:
        p = params.with_eps(float(eps))
        if state is None:
            seed = seed_field(p, n, theta_of_eps(float(eps)), points_per_wavelength)
        else:
            seed = FieldSolution(grid=state.grid, e=state.e, de=state.de, params=p,
                                 iterations=0, residual=np.nan)
        state = solve_stationary_newton(p, seed)
    return state


def solve_ordered_state(params: Params, n: int, theta_seed: float,
                        points_per_wavelength: int = 24,
                        picard_iterations: int = 6000,
                        relaxation: float = 0.15,
                        seed_phase: float = 0.0) -> FieldSolution:
    """Deterministic pipeline for one ordered stationary state.

    Stage 1: under-relaxed fixed-point transient from the branch-n winding
    seed (amplitude clamped against thermal-exponent overflow).  Stage 2:
    average the late iterates, which centers the wandering trajectory on the
    nearby stationary point.  Stage 3: Newton polish to machine residual.

    ``seed_phase`` rotates the seed by exp(i*phase); pi targets the lattice
    displaced by half a period within the same branch family.
    """
    seed = seed_field(params, n, theta_seed, points_per_wavelength)
    if seed_phase != 0.0:
        seed = FieldSolution(grid=seed.grid, e=seed.e * np.exp(1j * seed_phase),
                             de=seed.de * np.exp(1j * seed_phase), params=params,
                             iterations=0, residual=np.nan)
    grid = seed.grid
    e = seed.e.copy()
    cap = 4.0 * max(1.0, float(np.max(np.abs(e))))
    r = relaxation
    previous = np.inf
    streak = 0
    accum = np.zeros_like(e)
    count = 0
    tail_start = (2 * picard_iterations) // 3
    for iteration in range(picard_iterations):
        density = thermal_density(_FieldView(grid, e), params)
        solved = helmholtz_solve(density, params)
        change = float(np.max(np.abs(solved.e - e)))
        e = (1.0 - r) * e + r * solved.e
        peak = float(np.max(np.abs(e)))
        if peak > cap:
            e *= cap / peak  # clamp explosive transients, keep the shape
        if iteration >= tail_start:
            accum += e
            count += 1
        if change > previous:
            streak += 1
            if streak >= 2:
                r = max(0.5 * r, 5e-3)
                streak = 0
        else:
            streak = 0
        previous = change
    mean = accum / max(count, 1)
    start = FieldSolution(grid=grid, e=mean, de=_derivative(grid, mean), params=params,
                          iterations=picard_iterations, residual=np.nan)
    return solve_stationary_newton(params, start, max_steps=400)


def decompose(field: FieldSolution) -> TravelingDecomposition:
    """Split the field into right/left running waves.

    E+- = exp(-+ i xi) (e -+ i de) / 2, which reconstructs e exactly:
    e = E+ e^{i xi} + E- e^{-i xi}.  Where both amplitudes vanish the
    fractions default to one half.
    """
    xi = field.grid
    e = field.e
    de = field.de
    eplus = 0.5 * np.exp(-1j * xi) * (e - 1j * de)
    eminus = 0.5 * np.exp(1j * xi) * (e + 1j * de)
    p2 = np.abs(eplus) ** 2
    m2 = np.abs(eminus) ** 2
    total = p2 + m2
    theta_local = 0.5 * total
    nplus = np.where(total > 0.0, p2 / np.where(total > 0.0, total, 1.0), 0.5)
    return TravelingDecomposition(grid=xi, Eplus=eplus, Eminus=eminus,
                                  theta_local=theta_local, Nplus=nplus, Nminus=1.0 - nplus)


def order_parameter(dec: TravelingDecomposition, params: Params) -> tuple[float, float]:
    """Mean of theta_local over the central half of the cloud and the max
    relative deviation from that mean."""
    center = np.abs(dec.grid) <= 0.5 * params.ell
    theta = dec.theta_local[center]
    mean = float(np.mean(theta))
    if mean == 0.0:
        return 0.0, 0.0
    return mean, float(np.max(np.abs(theta - mean)) / mean)


def potential_envelopes(field: FieldSolution, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """Local one-wavelength envelopes of the two optical-potential parts.

    Returns (pump_fiber, fiber_fiber): the pump interference part eps*2|Re e|
    and the redistribution part eps*|e|^2.
    """
    h = field.grid[1] - field.grid[0]
    window = max(3, int(round(2.0 * np.pi / h)) | 1)
    pump_fiber = maximum_filter1d(params.eps * 2.0 * np.abs(field.e.real), size=window, mode="nearest")
    fiber_fiber = maximum_filter1d(params.eps * np.abs(field.e) ** 2, size=window, mode="nearest")
    return pump_fiber, fiber_fiber


def density_diagnostics(field: FieldSolution, params: Params) -> tuple[DensityProfile, float | None]:
    """Thermal density of the field and its central modulation period.

    The period is the median spacing of density peaks within |xi| <= ell/2;
    absent (None) when the density shows no modulation there.
    """
    density = thermal_density(field, params)
    center = np.abs(field.grid) <= 0.5 * params.ell
    nu = density.values[center]
    xi = field.grid[center]
    span = float(np.max(nu) - np.min(nu))
    if span < 1e-6 * float(np.max(nu)):
        return density, None
    peaks, _ = find_peaks(nu, prominence=0.05 * span)
    if peaks.size < 3:
        return density, None
    return density, float(np.median(np.diff(xi[peaks])))


def count_fraction_zeros(dec: TravelingDecomposition, params: Params,
                         zero_level: float = 1e-3, low_level: float = 0.25,
                         high_level: float = 0.75):
    """Count the deep dips of N+ and N- across the gas region.

    A dip is a visit below ``low_level`` flanked by excursions above
    ``high_level`` on both sides (hysteresis makes the count immune to
    numerical wiggles on the plateaus).  Returns ((n_plus, n_minus),
    tangency_flag); a counted dip whose minimum stays above ``zero_level``
    swaps the dominant direction without a true zero and raises the
    tangency flag.
    """
    inside = np.abs(dec.grid) <= 2.5 * params.ell
    counts = []
    tangency = False
    for frac in (dec.Nplus, dec.Nminus):
        f = frac[inside]
        state = None          # 'high' or 'low' plateau tracker
        pending_min = None    # minimum of the current low visit
        dips = 0
        for value in f:
            if value > high_level:
                if state == "low" and pending_min is not None:
                    dips += 1
                    if pending_min >= zero_level:
                        tangency = True
                state = "high"
                pending_min = None
            elif value < low_level:
                if state == "high":
                    state = "low"
                    pending_min = value
                elif state == "low" and pending_min is not None:
                    pending_min = min(pending_min, value)
                elif state is None:
                    state = "leading-low"  # not flanked on the left, never counted
        counts.append(dips)
    return (counts[0], counts[1]), tangency


def write_solution_csv(field: FieldSolution, path) -> None:
    """CSV with per-point field, density and diagnostic columns.

    The header comment carries the dimensionless parameters.
    """
    dec = decompose(field)
    density = thermal_density(field, field.params)
    env_pf, env_ff = potential_envelopes(field, field.params)
    p = field.params
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# fibercryst-csv v1 stationary\n")
        fh.write(f"# zeta0={p.zeta0:.17g} eps={p.eps:.17g} ell={p.ell:.17g} "
                 f"iterations={field.iterations} residual={field.residual:.17g}\n")
        fh.write("xi,re_e,im_e,nu,theta_local,Nplus,Nminus,env_pump_fiber,env_fiber_fiber\n")
        for i in range(field.grid.size):
            fh.write(f"{field.grid[i]:.17g},{field.e[i].real:.17g},{field.e[i].imag:.17g},"
                     f"{density.values[i]:.17g},{dec.theta_local[i]:.17g},"
                     f"{dec.Nplus[i]:.17g},{dec.Nminus[i]:.17g},"
                     f"{env_pf[i]:.17g},{env_ff[i]:.17g}\n")
