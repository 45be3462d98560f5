"""Numerical laboratory for light-induced crystallization of a thermal 1D gas
coupled to a single guided optical mode.

The package is organized around one dimensionless model:

* ``numerics``   -- special functions, quadrature and root finding
* ``model``      -- parameters, nondimensionalization, thermal density closure
* ``stability``  -- dispersion function and growth rates of the normal phase
* ``branches``   -- order-parameter equations and branch diagrams
* ``stationary`` -- self-consistent Helmholtz solver and field diagnostics
* ``dynamics``   -- N-particle kinetic simulation with quasistatic field
* ``reduced``    -- canonical field Hamiltonian and its angle-averaged reduction
* ``cli``        -- scenario runner emitting CSV files
"""

__version__ = "0.1.0"

from . import branches, dynamics, model, numerics, reduced, stability, stationary

__all__ = [
    "branches",
    "dynamics",
    "model",
    "numerics",
    "reduced",
    "stability",
    "stationary",
    "__version__",
]
