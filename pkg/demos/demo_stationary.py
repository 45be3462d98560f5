"""Self-consistent stationary states of the coupled field/gas system.

Below threshold the gas keeps only a weak adiabatic scattered field; above
threshold ordered states appear whose density is modulated by the optical
lattice the gas itself sustains.  This script solves both regimes at
moderate coupling and prints the order parameter, the lattice period and
the running-wave swap structure, then writes the full profiles as CSV.
"""

import numpy as np

from fibercryst.branches import WEAK, branch_roots
from fibercryst.model import Params, critical_pump
from fibercryst.stationary import (count_fraction_zeros, decompose, density_diagnostics,
                                   order_parameter, solve_ordered_state, solve_selfconsistent,
                                   write_solution_csv)


def main():
    zeta0 = 0.25
    eps_c = critical_pump(zeta0)

    print("below threshold (eps = 0.9 eps_c): the normal phase persists")
    below = Params(zeta0=zeta0, eps=0.9 * eps_c, ell=100.0)
    sol = solve_selfconsistent(below)
    theta, _ = order_parameter(decompose(sol), below)
    print(f"  converged in {sol.iterations} iterations, Theta = {theta:.2e} (residual field only)\n")

    print("above threshold (eps = 2 eps_c): the ordered state")
    params = Params(zeta0=zeta0, eps=2.0 * eps_c, ell=100.0)
    root = branch_roots(zeta0, params.eps, 0, WEAK)[0]
    sol = solve_ordered_state(params, 0, root, picard_iterations=4000)
    dec = decompose(sol)
    theta, dev = order_parameter(dec, params)
    counts, tangency = count_fraction_zeros(dec, params)
    _, period = density_diagnostics(sol, params)
    print(f"  Theta = {theta:.4f} (weak-equation root {root:.4f})")
    print(f"  central theta_local deviation: {dev:.1%}")
    print(f"  density modulation period: {period:.3f} "
          f"(pump-interference lattice: one wavelength = {2 * np.pi:.3f})")
    print(f"  running-wave swap counts (N+, N-): {counts}, tangency={tangency}")
    print(f"  independent residual audit: {sol.residual:.2e}")

    write_solution_csv(sol, "stationary_demo.csv")
    print("\nwrote stationary_demo.csv")


if __name__ == "__main__":
    main()
