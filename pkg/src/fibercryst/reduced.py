"""Canonical field Hamiltonian and its angle-averaged two-degree reduction.

The stationary field equations with a gas density rho = g[Phi] (any function
of the single-particle energy surface, thermal by default) are canonical in
the propagation coordinate z, with Hamiltonian

    H = 1/2 [Pr^2 + Pi^2 + Er^2 + Ei^2 - c G(Phi_d + U)],

where G' = g, Phi_d = -eps (Er^2 + Ei^2 + 2 Er) is the optical potential of
the field quadratures (pump units), U the external trap and c collects the
coupling normalization.  H splits into two unit-frequency oscillators, H0,
plus the coupling H1 = -(c/2) G(Phi_d + U).

Action-angle variables E = sqrt(2J) sin(psi), Pi = sqrt(2J) cos(psi) make
H0 = Jr + Ji.  Averaging H1 over the fast common angle at fixed phase
difference Delta = psi_r - psi_i gives the first-order effective Hamiltonian

    K1(Jr, Ji, Delta, z) = (1/2pi) integral H1(J, zeta+Delta, zeta, z) dzeta,

which depends on the angles only through Delta, so the total action
Theta = Jr + Ji is conserved by the averaged flow.  The two remaining
degrees of freedom (D = Jr - Ji, Delta) evolve under
Hbar(D, Delta, z) = 2 K1((Theta+D)/2, (Theta-D)/2, Delta, z).

Derivatives of Hbar are taken by centered finite differences (relative step
1e-6, one-sided at the |D| = Theta boundary); the angle average itself is
smooth and 2pi-periodic, so the spectral trapezoid rule evaluates it to
machine accuracy with fixed nodes, which keeps those differences noise-free
(the adaptive-quadrature route is available and agrees, but its error is not
smooth in the parameters).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, RangeError, StiffnessError
from .model import Params
from .numerics import quad_adaptive

_EXP_GUARD = 700.0


@dataclass(frozen=True)
class CanonicalFieldState:
    """Field quadratures and conjugate momenta (Pi_r = dEr/dz, Pi_i = dEi/dz)."""

    Er: float
    Ei: float
    Pr: float
    Pi: float


@dataclass(frozen=True)
class ActionAngleState:
    """Actions and angles of the two uncoupled quadrature oscillators."""

    Jr: float
    Ji: float
    psir: float
    psii: float

    def __post_init__(self):
        if self.Jr < 0.0 or self.Ji < 0.0:
            raise DomainError("actions must be nonnegative")


@dataclass(frozen=True)
class ReducedState:
    """Point of the averaged system: total action, action difference, phase difference."""

    Theta: float
    D: float
    Delta: float

    def __post_init__(self):
        if abs(self.D) > self.Theta * (1.0 + 1e-12):
            raise DomainError(f"|D| = {abs(self.D):g} exceeds Theta = {self.Theta:g}")


@dataclass(frozen=True)
class GModel:
    """Pluggable density functional: rho = g(Phi), with antiderivative G.

    ``coupling`` is the constant c multiplying G in the Hamiltonian;
    ``potential`` overrides the trap U(z) (defaults to the harmonic
    (z/ell)^2 of the Params in use).
    """

    g: Callable[[float], float]
    G: Callable[[float], float]
    coupling: float
    potential: Callable[[float], float] | None = None

    def trap(self, z: float, params: Params) -> float:
        if self.potential is not None:
            return self.potential(z)
        return (z / params.ell) ** 2


def thermal_g_model(coupling: float, potential: Callable[[float], float] | None = None) -> GModel:
    """Thermal closure: g(Phi) = exp(-Phi), G(Phi) = -exp(-Phi)."""

    def g(phi):
        if -phi > _EXP_GUARD:
            raise RangeError("thermal density functional overflow")
        return np.exp(-phi)

    def big_g(phi):
        if np.any(np.asarray(-phi) > _EXP_GUARD):
            raise RangeError("thermal density functional overflow")
        return -np.exp(-phi)

    return GModel(g=g, G=big_g, coupling=coupling, potential=potential)


def dipole_potential(er, ei, params: Params):
    """Optical potential Phi_d = -eps (|E|^2 + 2 Er) of the quadratures."""
    return -params.eps * (er * er + ei * ei + 2.0 * er)


def full_hamiltonian(s: CanonicalFieldState, z: float, params: Params, g_model: GModel) -> float:
    """H = 1/2 [Pr^2 + Pi^2 + Er^2 + Ei^2 - c G(Phi_d + U)]."""
    phi = dipole_potential(s.Er, s.Ei, params) + g_model.trap(z, params)
    return 0.5 * (s.Pr**2 + s.Pi**2 + s.Er**2 + s.Ei**2 - g_model.coupling * float(g_model.G(phi)))


def to_action_angle(s: CanonicalFieldState) -> ActionAngleState:
    """Map (E, Pi) to (J, psi): E = sqrt(2J) sin psi, Pi = sqrt(2J) cos psi.

    Zero-action oscillators get angle 0 by convention.
    """
    jr = 0.5 * (s.Er**2 + s.Pr**2)
    ji = 0.5 * (s.Ei**2 + s.Pi**2)
    psir = float(np.arctan2(s.Er, s.Pr)) % (2.0 * np.pi) if jr > 0.0 else 0.0
    psii = float(np.arctan2(s.Ei, s.Pi)) % (2.0 * np.pi) if ji > 0.0 else 0.0
    return ActionAngleState(Jr=jr, Ji=ji, psir=psir, psii=psii)


def from_action_angle(a: ActionAngleState) -> CanonicalFieldState:
    """Inverse of :func:`to_action_angle`."""
    return CanonicalFieldState(
        Er=np.sqrt(2.0 * a.Jr) * np.sin(a.psir),
        Ei=np.sqrt(2.0 * a.Ji) * np.sin(a.psii),
        Pr=np.sqrt(2.0 * a.Jr) * np.cos(a.psir),
        Pi=np.sqrt(2.0 * a.Ji) * np.cos(a.psii),
    )


def coupling_hamiltonian(jr: float, ji: float, psir, psii, z: float,
                         params: Params, g_model: GModel):
    """H1 = -(c/2) G(Phi_d + U) evaluated in action-angle variables."""
    er = np.sqrt(2.0 * jr) * np.sin(psir)
    ei = np.sqrt(2.0 * ji) * np.sin(psii)
    phi = dipole_potential(er, ei, params) + g_model.trap(z, params)
    return -0.5 * g_model.coupling * g_model.G(phi)


def averaged_h(j: tuple[float, float], delta: float, z: float, params: Params,
               g_model: GModel, method: str = "adaptive", nodes: int = 128) -> float:
    """Angle-averaged first-order Hamiltonian K1(Jr, Ji, Delta, z).

    ``method='adaptive'`` integrates with adaptive quadrature; ``'spectral'``
    uses the fixed-node periodic trapezoid rule (machine accurate for this
    smooth periodic integrand, and smooth in its parameters, which matters
    for the finite differences of the reduced equations).  Both agree.
    """
    jr, ji = float(j[0]), float(j[1])
    if jr < 0.0 or ji < 0.0:
        raise DomainError("actions must be nonnegative")
    if method == "adaptive":
        return quad_adaptive(
            lambda zeta: float(coupling_hamiltonian(jr, ji, zeta + delta, zeta, z, params, g_model)),
            0.0, 2.0 * np.pi, tol=1e-12) / (2.0 * np.pi)
    if method == "spectral":
        zeta = np.linspace(0.0, 2.0 * np.pi, nodes, endpoint=False)
        vals = coupling_hamiltonian(jr, ji, zeta + delta, zeta, z, params, g_model)
        return float(np.mean(vals))
    raise DomainError(f"unknown averaging method {method!r}")


def effective_hamiltonian(state: ReducedState, z: float, params: Params, g_model: GModel,
                          method: str = "spectral") -> float:
    """Hbar(D, Delta, z) = 2 K1((Theta+D)/2, (Theta-D)/2, Delta, z)."""
    jr = 0.5 * (state.Theta + state.D)
    ji = 0.5 * (state.Theta - state.D)
    return 2.0 * averaged_h((jr, ji), state.Delta, z, params, g_model, method=method)


def reduced_equations(state: ReducedState, z: float, params: Params, g_model: GModel,
                      rel_step: float = 1e-6) -> tuple[float, float]:
    """Canonical rates (dD/dz, dDelta/dz) of the averaged system.

    dDelta/dz = dHbar/dD and dD/dz = -dHbar/dDelta by centered finite
    differences; one-sided at the |D| = Theta boundary.
    """
    theta = state.Theta
    scale = max(abs(theta), 1.0)
    h_d = rel_step * scale

    def hbar(d, delta):
        d = min(max(d, -theta), theta)
        return effective_hamiltonian(ReducedState(theta, d, delta), z, params, g_model)

    d0 = state.D
    if d0 + h_d > theta:       # one-sided at the upper action boundary
        dh_dd = (hbar(d0, state.Delta) - hbar(d0 - h_d, state.Delta)) / h_d
    elif d0 - h_d < -theta:    # one-sided at the lower boundary
        dh_dd = (hbar(d0 + h_d, state.Delta) - hbar(d0, state.Delta)) / h_d
    else:
        dh_dd = (hbar(d0 + h_d, state.Delta) - hbar(d0 - h_d, state.Delta)) / (2.0 * h_d)

    h_delta = rel_step * 2.0 * np.pi
    dh_ddelta = (hbar(d0, state.Delta + h_delta) - hbar(d0, state.Delta - h_delta)) / (2.0 * h_delta)
    return -dh_ddelta, dh_dd


@dataclass(frozen=True)
class ReducedTrajectory:
    """Averaged-flow trajectory; Theta is conserved exactly by construction."""

    z: np.ndarray
    Theta: np.ndarray
    D: np.ndarray
    Delta: np.ndarray
    Hbar: np.ndarray


def integrate_reduced(state0: ReducedState, z_span: tuple[float, float], params: Params,
                      g_model: GModel, rtol: float = 1e-10, atol: float = 1e-12,
                      samples: int = 201) -> ReducedTrajectory:
    """Adaptive integration of the averaged system.

    For z-independent trap the effective Hamiltonian is conserved along the
    trajectory (to integrator tolerance); Theta is a parameter of the flow
    and therefore exact.  Raises :class:`StiffnessError` on integrator
    failure.
    """
    theta = state0.Theta

    def rhs(z, y):
        d = min(max(y[0], -theta), theta)
        dd, ddelta = reduced_equations(ReducedState(theta, d, y[1]), z, params, g_model)
        return [dd, ddelta]

    z_eval = np.linspace(z_span[0], z_span[1], samples)
    sol = solve_ivp(rhs, z_span, [state0.D, state0.Delta], method="DOP853",
                    rtol=rtol, atol=atol, t_eval=z_eval, dense_output=False)
    if not sol.success:
        raise StiffnessError(f"reduced integration failed: {sol.message}")
    d_arr = np.clip(sol.y[0], -theta, theta)
    delta_arr = sol.y[1]
    hbar = np.array([
        effective_hamiltonian(ReducedState(theta, d, dl), z, params, g_model)
        for z, d, dl in zip(sol.t, d_arr, delta_arr)
    ])
    return ReducedTrajectory(z=sol.t, Theta=np.full_like(sol.t, theta),
                             D=d_arr, Delta=delta_arr, Hbar=hbar)


@dataclass(frozen=True)
class FullTrajectory:
    """Trajectory of the unaveraged canonical flow with action-angle views."""

    z: np.ndarray
    states: np.ndarray        # shape (n, 4): Er, Ei, Pr, Pi
    Theta: np.ndarray         # Jr + Ji along the flow
    D: np.ndarray             # Jr - Ji along the flow


def integrate_full(state0: CanonicalFieldState, z_span: tuple[float, float], params: Params,
                   g_model: GModel, rtol: float = 1e-11, atol: float = 1e-13,
                   samples: int = 2001) -> FullTrajectory:
    """Exact canonical flow of the full Hamiltonian (no averaging)."""
    c = g_model.coupling
    eps = params.eps

    def rhs(z, y):
        er, ei, pr, pi = y
        phi = dipole_potential(er, ei, params) + g_model.trap(z, params)
        g_val = float(g_model.g(phi))
        return [pr, pi,
                -er - c * eps * g_val * (er + 1.0),
                -ei - c * eps * g_val * ei]

    z_eval = np.linspace(z_span[0], z_span[1], samples)
    sol = solve_ivp(rhs, z_span, [state0.Er, state0.Ei, state0.Pr, state0.Pi],
                    method="DOP853", rtol=rtol, atol=atol, t_eval=z_eval)
    if not sol.success:
        raise StiffnessError(f"full canonical integration failed: {sol.message}")
    er, ei, pr, pi = sol.y
    jr = 0.5 * (er**2 + pr**2)
    ji = 0.5 * (ei**2 + pi**2)
    return FullTrajectory(z=sol.t, states=sol.y.T, Theta=jr + ji, D=jr - ji)


def write_trajectory_csv(traj: ReducedTrajectory, path) -> None:
    """CSV with columns z, Theta, D, Delta, Hbar."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# fibercryst-csv v1 reduced\n")
        fh.write("z,Theta,D,Delta,Hbar\n")
        for i in range(traj.z.size):
            fh.write(f"{traj.z[i]:.17g},{traj.Theta[i]:.17g},{traj.D[i]:.17g},"
                     f"{traj.Delta[i]:.17g},{traj.Hbar[i]:.17g}\n")
