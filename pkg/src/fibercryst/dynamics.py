"""N-particle kinetic simulation with quasistatic field closure.

Particles move in the dimensionless potential

    V(xi) = xi^2/ell^2 - eps * (|e|^2 + 2 Re e),

i.e. a harmonic trap plus the optical potential of the instantaneous field.
The field has no time derivative of its own, so it adiabatically follows the
particle density: every ``field_refresh_every`` steps the density deposited
by the particles is fed to the stationary Helmholtz solver and the force
table is rebuilt (quasistatic closure).

Time is measured in 1/(beta_m v_th), momenta in m*v_th.  The integrator is
kick-drift-kick leapfrog, symplectic for a frozen force field.  Particles
beyond |xi| > 3*ell leave the simulated domain; they are removed, counted,
and the density renormalized (escapes are rare in the trap, and the fixed
normalization keeps the collective coupling meaningful).

Ensembles admit any N >= 1 so single trajectories can be integrated directly;
``sample_normal_phase`` enforces the kinetic-run minimum of N >= 1000.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import DensityProfile, Params, standard_grid
from .stationary import FieldSolution, decompose, helmholtz_solve, order_parameter

MAX_TIME_STEP = 0.05
DEFAULT_KERNEL_WIDTH = np.pi / 8.0  # quarter of the lattice period


@dataclass(frozen=True)
class ParticleEnsemble:
    """Positions and momenta of the simulation particles."""

    xi: np.ndarray
    u: np.ndarray
    seed: int
    escaped: int = 0

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "u", u)
        if xi.shape != u.shape or xi.ndim != 1 or xi.size < 1:
            raise DomainError("xi and u must be equal-length 1D arrays")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(u))):
            raise DomainError("ensemble entries must be finite")

    @property
    def n(self) -> int:
        return self.xi.size


@dataclass(frozen=True)
class TimeSeries:
    """Diagnostics of one kinetic run, sampled at the field refresh times."""

    t: np.ndarray
    theta: np.ndarray
    bunching: np.ndarray
    energy: np.ndarray
    escaped: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(a) for a in (self.t, self.theta, self.bunching, self.energy, self.escaped)]
        if len({a.shape for a in arrays}) != 1:
            raise DomainError("time series arrays must share one length")
        if np.any(np.diff(arrays[0]) <= 0.0):
            raise DomainError("time array must be strictly increasing")


def sample_normal_phase(n_particles: int, params: Params, seed: int) -> ParticleEnsemble:
    """Thermal-equilibrium sample of the unpumped gas, reproducible by seed.

    Positions are Gaussian with standard deviation ell/sqrt(2) (the density
    exp(-xi^2/ell^2)); momenta are standard Gaussian.
    """
    if n_particles < 1000:
        raise DomainError("kinetic runs need at least 1000 particles")
    rng = np.random.default_rng(seed)
    xi = rng.normal(0.0, params.ell / np.sqrt(2.0), n_particles)
    u = rng.normal(0.0, 1.0, n_particles)
    return ParticleEnsemble(xi=xi, u=u, seed=seed)


def deposit_density(ens: ParticleEnsemble, grid: np.ndarray,
                    kernel_width: float = DEFAULT_KERNEL_WIDTH) -> DensityProfile:
    """Gaussian-kernel density estimate of the ensemble on ``grid``.

    Cloud-in-cell deposition followed by convolution with a Gaussian kernel
    of the given width; deterministic and normalized to unit integral.
    """
    grid = np.asarray(grid, dtype=float)
    h = grid[1] - grid[0]
    if kernel_width < h:
        raise DomainError(f"kernel_width {kernel_width:g} below grid spacing {h:g}")
    # linear (cloud-in-cell) weights onto the two nearest nodes; stray
    # particles beyond the grid deposit onto the boundary node
    pos = np.clip((ens.xi - grid[0]) / h, 0.0, grid.size - 1.0)
    idx = np.clip(np.floor(pos).astype(int), 0, grid.size - 2)
    frac = pos - idx
    counts = np.bincount(idx, weights=1.0 - frac, minlength=grid.size)
    counts += np.bincount(idx + 1, weights=frac, minlength=grid.size)
    # Gaussian smoothing kernel truncated at 5 sigma
    half = int(np.ceil(5.0 * kernel_width / h))
    x = np.arange(-half, half + 1) * h
    kernel = np.exp(-0.5 * (x / kernel_width) ** 2)
    smooth = np.convolve(counts, kernel, mode="same")
    return DensityProfile.from_unnormalized(grid, smooth)


def force_table(field: FieldSolution, params: Params) -> np.ndarray:
    """Optical force eps * d/dxi (|e|^2 + 2 Re e) sampled on the field grid."""
    grid = field.grid
    h = grid[1] - grid[0]
    w = np.abs(field.e) ** 2 + 2.0 * field.e.real
    dw = np.empty_like(w)
    dw[2:-2] = (-w[4:] + 8.0 * w[3:-1] - 8.0 * w[1:-3] + w[:-4]) / (12.0 * h)
    dw[:2] = (w[1:3] - w[0:2]) / h
    dw[-2:] = (w[-2:] - w[-3:-1]) / h
    return params.eps * dw


def step(ens: ParticleEnsemble, field: FieldSolution, dt: float, params: Params) -> ParticleEnsemble:
    """One kick-drift-kick leapfrog step in the frozen field.

    Particles that leave |xi| > 3*ell are removed and counted on the
    returned ensemble.
    """
    if dt > MAX_TIME_STEP:
        raise DomainError(f"dt {dt:g} exceeds stability bound {MAX_TIME_STEP:g}")
    table = force_table(field, params)
    grid = field.grid

    def total_force(xi):
        return np.interp(xi, grid, table) - (2.0 / params.ell**2) * xi

    u_half = ens.u + 0.5 * dt * total_force(ens.xi)
    xi_new = ens.xi + dt * u_half
    u_new = u_half + 0.5 * dt * total_force(xi_new)

    inside = np.abs(xi_new) <= 3.0 * params.ell
    lost = int(np.count_nonzero(~inside))
    if lost:
        xi_new, u_new = xi_new[inside], u_new[inside]
    return ParticleEnsemble(xi=xi_new, u=u_new, seed=ens.seed, escaped=ens.escaped + lost)


def ensemble_energy(ens: ParticleEnsemble, field: FieldSolution, params: Params) -> float:
    """Mean particle energy: kinetic + trap + optical potential."""
    w = np.abs(field.e) ** 2 + 2.0 * field.e.real
    pot = -params.eps * np.interp(ens.xi, field.grid, w)
    return float(np.mean(0.5 * ens.u**2 + ens.xi**2 / params.ell**2 + pot))


def bunching(ens: ParticleEnsemble) -> float:
    """Lattice-period density modulation |<exp(2 i xi)>|."""
    return float(np.abs(np.mean(np.exp(2j * ens.xi))))


def run(params: Params, n_particles: int, t_final: float, field_refresh_every: int = 1,
        seed: int = 0, dt: float = 0.02, points_per_wavelength: int = 24,
        kernel_width: float = DEFAULT_KERNEL_WIDTH) -> TimeSeries:
    """Self-consistent kinetic run recording Theta(t), bunching and energy.

    The field is re-solved from the deposited density every
    ``field_refresh_every`` steps (always before the first step), and the
    diagnostics are sampled at those refresh times.  Identical seeds and
    parameters give bit-identical output.
    """
    if t_final <= 0.0:
        raise DomainError("t_final must be positive")
    if field_refresh_every < 1:
        raise DomainError("field_refresh_every must be >= 1")
    ens = sample_normal_phase(n_particles, params, seed)
    grid = standard_grid(params, points_per_wavelength)
    steps = int(np.ceil(t_final / dt))

    times, thetas, bunchings, energies, escapes = [], [], [], [], []
    field = None
    for k in range(steps):
        if k % field_refresh_every == 0:
            density = deposit_density(ens, grid, kernel_width)
            field = helmholtz_solve(density, params)
            theta, _ = order_parameter(decompose(field), params)
            times.append(k * dt)
            thetas.append(theta)
            bunchings.append(bunching(ens))
            energies.append(ensemble_energy(ens, field, params))
            escapes.append(ens.escaped)
        ens = step(ens, field, dt, params)
    return TimeSeries(t=np.array(times), theta=np.array(thetas),
                      bunching=np.array(bunchings), energy=np.array(energies),
                      escaped=np.array(escapes, dtype=int))


def fit_growth_rate(series: TimeSeries, params: Params) -> float:
    """Exponential growth rate of Theta(t) from a noise-floor model fit.

    Fits log(theta) = log(floor + A exp(rate*t)) on the samples below the
    trapping-saturation scale theta < 1/(16 eps^2) (where the lattice depth
    reaches half the thermal energy), which separates the shot-noise floor
    from the coherent growth.  Raises :class:`DomainError` when the series
    has no growth to fit.
    """
    from scipy.optimize import curve_fit

    theta = series.theta
    cap = 1.0 / (16.0 * params.eps**2) if params.eps > 0 else np.inf
    mask = theta < cap
    if np.count_nonzero(mask) < 10:
        raise DomainError("too few pre-saturation samples to fit a growth rate")
    floor = float(np.mean(theta[: max(3, theta.size // 40)]))
    if not np.max(theta[mask]) > 3.0 * floor:
        raise DomainError("no growth above the noise floor")

    def model(t, ln_a, rate, ln_floor):
        return np.log(np.exp(ln_floor) + np.exp(ln_a + rate * t))

    p0 = (np.log(floor), 1.0, np.log(floor))
    popt, _ = curve_fit(model, series.t[mask], np.log(theta[mask]), p0=p0, maxfev=20000)
    return float(popt[1])


def nearest_branch_root(theta_late: float, params: Params, regime: str = "weak"):
    """Report the branch root closest to a late-time kinetic order parameter.

    Returns (n, root, relative_deviation) or None when no ordered roots
    exist.  The kinetic run selects its own branch; this only reports which.
    """
    from .branches import branch_roots

    best = None
    for n in range(params.n_max + 1):
        for root in branch_roots(params.zeta0, params.eps, n, regime):
            dev = abs(theta_late - root) / root
            if best is None or dev < best[2]:
                best = (n, root, dev)
    return best


def save_checkpoint(ens: ParticleEnsemble, path) -> None:
    """Fixed-layout little-endian checkpoint.

    Layout: int64 N, int64 seed, then N float64 positions, then N float64
    momenta, all little-endian.
    """
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qq", ens.n, ens.seed))
        fh.write(ens.xi.astype("<f8").tobytes())
        fh.write(ens.u.astype("<f8").tobytes())


def load_checkpoint(path) -> ParticleEnsemble:
    """Inverse of :func:`save_checkpoint`."""
    with open(path, "rb") as fh:
        n, seed = struct.unpack("<qq", fh.read(16))
        xi = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
        u = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
    return ParticleEnsemble(xi=xi, u=u, seed=seed)


def write_timeseries_csv(series: TimeSeries, path) -> None:
    """CSV with columns t, theta, bunching, energy, escaped."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# fibercryst-csv v1 dynamics\n")
        fh.write("t,theta,bunching,energy,escaped\n")
        for i in range(series.t.size):
            fh.write(f"{series.t[i]:.17g},{series.theta[i]:.17g},{series.bunching[i]:.17g},"
                     f"{series.energy[i]:.17g},{int(series.escaped[i])}\n")
