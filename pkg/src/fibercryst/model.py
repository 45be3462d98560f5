"""Physical and dimensionless parameters plus the thermal density closure.

Nondimensionalization used everywhere in the package:

* lengths in units of 1/beta_m (xi = beta_m * z),
* momenta in units of m * v_th with v_th = sqrt(k_B T / m),
* fields in units of the pump amplitude E_L,
* energies in units of k_B T,
* time in units of 1/(beta_m * v_th).

With the normalized line density nu(xi) (unit integral) the stationary field
equation becomes

    e'' + (1 + 2 pi zeta0 nu) e = -2 pi zeta0 nu,

i.e. the susceptibility source carries the single coefficient 2*pi*zeta0.
The trap enters through the dimensionless half-width ell = beta_m * l_z,
where l_z**2 = 2 k_B T / (m w_z**2), so the unpumped density is the Gaussian
exp(-xi^2/ell^2).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, RangeError

K_BOLTZMANN = 1.380649e-23  # J/K, exact SI

#: spatial resolution contract: at least this many grid points per 2*pi
MIN_POINTS_PER_WAVELENGTH = 20


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame inputs. All strictly positive (SI units).

    ``laser_wavenumber`` may be smaller or larger than ``propagation_constant``;
    no ordering is imposed.
    """

    laser_wavenumber: float      # k_L, 1/m
    propagation_constant: float  # beta_m, 1/m
    polarizability: float        # alpha, C m^2 / V (real, positive)
    vacuum_permittivity: float   # epsilon_0, F/m
    mode_cross_section: float    # A, m^2
    particle_number: float       # N
    temperature: float           # T, K
    trap_frequency: float        # w_z, 1/s
    particle_mass: float         # m, kg
    pump_amplitude: float        # E_L, V/m

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0.0 or not np.isfinite(value):
                raise DomainError(f"PhysicalParams.{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class Params:
    """Dimensionless system parameters.

    zeta0 : collective coupling (total susceptibility coupled to the mode)
    eps   : pump strength, dipole potential depth over k_B T
    ell   : trap half-width in units of 1/beta_m (warned below 20)
    n_max : largest branch index scanned by multi-branch operations
    """

    zeta0: float
    eps: float
    ell: float = 100.0
    n_max: int = 3

    def __post_init__(self):
        if not self.zeta0 > 0.0:
            raise DomainError(f"zeta0 must be > 0, got {self.zeta0!r}")
        if self.eps < 0.0:
            raise DomainError(f"eps must be >= 0, got {self.eps!r}")
        if not self.ell > 0.0:
            raise DomainError(f"ell must be > 0, got {self.ell!r}")
        if self.n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {self.n_max!r}")
        if self.ell < 20.0:
            warnings.warn(f"ell={self.ell:g} < 20: the trap is not wide compared to the mode wavelength",
                          stacklevel=2)

    def with_eps(self, eps: float) -> "Params":
        return replace(self, eps=eps)


@dataclass(frozen=True)
class DensityProfile:
    """Normalized line density on a spatial grid: nu >= 0, integral nu dxi = 1."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.shape != values.shape:
            raise DomainError("grid and values must have identical shapes")
        if np.any(values < 0.0):
            raise DomainError("density values must be nonnegative")
        norm = np.trapezoid(values, grid)
        if abs(norm - 1.0) > 1e-10:
            raise DomainError(f"density normalization off by {norm - 1.0:.3e}")

    @classmethod
    def from_unnormalized(cls, grid, values) -> "DensityProfile":
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        norm = np.trapezoid(values, grid)
        if not norm > 0.0 or not np.isfinite(norm):
            raise DomainError("cannot normalize a density with nonpositive integral")
        return cls(grid, values / norm)


def derive_dimensionless(p: PhysicalParams) -> Params:
    """Map laboratory parameters onto the dimensionless set.

    zeta0 = (k_L/beta_m) * N*alpha / (A * lambda_L * eps0)   with lambda_L = 2 pi / k_L
    eps   = alpha * E_L^2 / (k_B T)
    ell   = beta_m * sqrt(2 k_B T / (m w_z^2))
    """
    lambda_l = 2.0 * np.pi / p.laser_wavenumber
    zeta0 = (p.laser_wavenumber / p.propagation_constant) * p.particle_number * p.polarizability / (
        p.mode_cross_section * lambda_l * p.vacuum_permittivity)
    eps = p.polarizability * p.pump_amplitude**2 / (K_BOLTZMANN * p.temperature)
    l_z = np.sqrt(2.0 * K_BOLTZMANN * p.temperature / (p.particle_mass * p.trap_frequency**2))
    return Params(zeta0=zeta0, eps=eps, ell=p.propagation_constant * l_z)


def critical_pump(zeta0: float) -> float:
    """Instability threshold eps_c = 1/(2 zeta0) of the normal phase."""
    if not zeta0 > 0.0:
        raise DomainError(f"zeta0 must be > 0, got {zeta0!r}")
    return 1.0 / (2.0 * zeta0)


def thermal_density(field, params: Params) -> DensityProfile:
    """Thermal-equilibrium density for a given field envelope.

    nu(xi) proportional to exp(-xi^2/ell^2) * exp[eps * (|e|^2 + 2 Re e)],
    normalized to unit integral.  ``field`` is any object with ``grid`` and
    complex ``e`` attributes (in pump units).
    """
    grid = np.asarray(field.grid, dtype=float)
    e = np.asarray(field.e, dtype=complex)
    mod2 = np.abs(e) ** 2
    if params.eps * float(np.max(mod2, initial=0.0)) > 700.0:
        raise RangeError("thermal exponent eps*|e|^2 exceeds 700; field too strong for double precision")
    exponent = -((grid / params.ell) ** 2) + params.eps * (mod2 + 2.0 * e.real)
    exponent -= np.max(exponent)
    return DensityProfile.from_unnormalized(grid, np.exp(exponent))


def normal_phase_density(grid, params: Params) -> DensityProfile:
    """Unpumped Gaussian density exp(-xi^2/ell^2), normalized on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    return DensityProfile.from_unnormalized(grid, np.exp(-((grid / params.ell) ** 2)))


def standard_grid(params: Params, points_per_wavelength: int = 24, extent_factor: float = 3.0) -> np.ndarray:
    """Uniform grid on [-extent_factor*ell, +extent_factor*ell].

    The default resolution is 24 points per field wavelength (2*pi in xi);
    anything below 20 violates the sampling contract.
    """
    if points_per_wavelength < MIN_POINTS_PER_WAVELENGTH:
        raise DomainError(f"points_per_wavelength must be >= {MIN_POINTS_PER_WAVELENGTH}")
    half = extent_factor * params.ell
    spacing = 2.0 * np.pi / points_per_wavelength
    n = int(np.ceil(2.0 * half / spacing)) + 1
    return np.linspace(-half, half, n)
