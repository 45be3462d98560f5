"""Acceptance suite: one test per primary criterion, each printing a
[PASS]/[FAIL] line with the measured numbers.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
complete.  Three criteria are expected to fail on physical grounds that are
recorded in the project notes: the onset exponent at the marginal coupling,
the onset jump law, and the quantitative desk-scale reproduction of the
three-branch coexistence figure (including the local order-parameter
constancy).  The tests implement those criteria exactly as stated and report
the honest numbers.
"""

import time

import numpy as np
import pytest

from fibercryst import branches as br
from fibercryst import dynamics as dyn
from fibercryst import reduced as rd
from fibercryst import stability, stationary
from fibercryst.model import Params, critical_pump
from fibercryst.numerics import bessel_i0, bessel_i1, elliptic_k

import oracles


def report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


class TestThresholdIdentity:
    def test_criterion(self):
        t0 = time.time()
        worst = 0.0
        details = []
        for zeta0 in (0.05, 1.0, 75.0 / np.pi, 150.0 / np.pi):
            start = time.time()
            measured = stability.measure_threshold(zeta0, rel_tol=1e-6)
            expected = 1.0 / (2.0 * zeta0)
            rel = abs(measured - expected) / expected
            worst = max(worst, rel)
            details.append(f"z0={zeta0:.4g}: rel={rel:.2e} ({time.time() - start:.1f}s)")
        ok = worst <= 1e-4 and (time.time() - t0) < 4 * 60.0
        assert report("threshold identity", ok, "; ".join(details))


class TestOnsetScaling:
    def test_small_coupling(self):
        t0 = time.time()
        exponent = br.onset_exponent(0.3)
        ok = abs(exponent - 1.00) <= 0.05 and (time.time() - t0) < 60.0
        assert report("onset scaling (zeta0=0.3)", ok,
                      f"fitted exponent {exponent:.4f}, expected 1.00 +- 0.05")

    def test_marginal_coupling(self):
        # stated expectation: exponent 0.50 +- 0.05 at zeta0 = 1.0; the
        # branch equation's ordered root rises linearly at every coupling
        # (see notes), so the measured exponent stays near 1
        t0 = time.time()
        exponent = br.onset_exponent(1.0)
        ok = abs(exponent - 0.50) <= 0.05 and (time.time() - t0) < 60.0
        assert report("onset scaling (zeta0=1.0)", ok,
                      f"fitted exponent {exponent:.4f}, expected 0.50 +- 0.05")


class TestJumpLaw:
    def test_criterion(self):
        t0 = time.time()
        details = []
        ok = True
        for zeta0 in (1.05, 1.25, 1.5):
            expected = br.jump_magnitude(zeta0)
            measured = br.measure_onset_discontinuity(zeta0, regime=br.WEAK)
            rel = abs(measured - expected) / expected
            details.append(f"z0={zeta0}: measured {measured:.4f} vs 16(z0-1)={expected:.2f}")
            ok = ok and rel <= 0.02
        ok = ok and (time.time() - t0) < 60.0
        assert report("jump law", ok, "; ".join(details))


class TestBranchCounting:
    def test_weak_window_counts(self):
        eps_c = critical_pump(0.05)
        counts = []
        ok = True
        for k in (1, 2, 3, 4):
            eps = 2.0 * k * eps_c  # midpoint of ((2k-1) eps_c, (2k+1) eps_c)
            points = br.solve_branches(Params(zeta0=0.05, eps=eps, n_max=6), br.WEAK)
            counts.append(len(points))
            ok = ok and len(points) == k
        assert report("branch counting (weak windows)", ok,
                      f"counts for k=1..4 windows: {counts}")

    def test_strong_topology(self):
        zeta0 = 75.0 / np.pi
        eps_c = critical_pump(zeta0)
        ok = True
        details = []
        for n_window in (1, 2, 3):
            eps = 2.0 * n_window * eps_c
            points = br.solve_branches(Params(zeta0=zeta0, eps=eps, n_max=8), br.STRONG)
            families = len({p.n for p in points})
            bounded = all(p.theta < 4.0 for p in points)
            ok = ok and families >= n_window and bounded
            details.append(f"eps={2 * n_window}eps_c: {families} families, all theta<4: {bounded}")
        assert report("branch counting (strong topology)", ok, "; ".join(details))


COEX_ZETA0 = 150.0 / np.pi
COEX_PARAMS = Params(zeta0=COEX_ZETA0, eps=9.5 * critical_pump(COEX_ZETA0), ell=100.0)


@pytest.fixture(scope="module")
def coexistence_solutions():
    solutions = {}
    for n in (0, 1, 2):
        roots = br.branch_roots(COEX_ZETA0, COEX_PARAMS.eps, n, br.STRONG)
        solutions[n] = stationary.solve_ordered_state(COEX_PARAMS, n, roots[0])
    return solutions


class TestCoexistence:
    def test_criterion(self, coexistence_solutions):
        t0 = time.time()
        thetas, periods, counts, devs = {}, {}, {}, {}
        for n, sol in coexistence_solutions.items():
            dec = stationary.decompose(sol)
            thetas[n], devs[n] = stationary.order_parameter(dec, COEX_PARAMS)
            counts[n], _ = stationary.count_fraction_zeros(dec, COEX_PARAMS)
            _, periods[n] = stationary.density_diagnostics(sol, COEX_PARAMS)
        roots = {n: br.branch_roots(COEX_ZETA0, COEX_PARAMS.eps, n, br.STRONG)[0] for n in (0, 1, 2)}

        distinct = len({round(t, 6) for t in thetas.values()}) == 3
        theta_ok = all(abs(thetas[n] - roots[n]) / roots[n] <= 0.05 for n in (0, 1, 2))
        period_ok = all(periods[n] is not None and abs(periods[n] - np.pi) / np.pi <= 0.02
                        for n in (0, 1, 2))
        count_ok = all(counts[n] == (n, n) for n in (0, 1, 2))
        runtime_ok = (time.time() - t0) < 600.0
        ok = distinct and theta_ok and period_ok and count_ok and runtime_ok
        detail = (f"theta {['%.3f' % thetas[n] for n in (0, 1, 2)]} vs roots "
                  f"{['%.3f' % roots[n] for n in (0, 1, 2)]}; periods "
                  f"{[None if periods[n] is None else '%.3f' % periods[n] for n in (0, 1, 2)]} "
                  f"(want pi); swap counts {[counts[n] for n in (0, 1, 2)]} (want (n,n)); "
                  f"distinct={distinct}")
        assert report("three-branch coexistence at desk scale", ok, detail)


class TestThetaConstancy:
    def test_criterion(self, coexistence_solutions):
        devs = {}
        for n, sol in coexistence_solutions.items():
            dec = stationary.decompose(sol)
            _, devs[n] = stationary.order_parameter(dec, COEX_PARAMS)
        ok = all(d < 0.01 for d in devs.values())
        assert report("theta_local constancy (central half)", ok,
                      f"max relative deviations {['%.3f' % devs[n] for n in (0, 1, 2)]} (want < 0.01)")


class TestKineticCrossValidation:
    def test_growth_rate_matches_dispersion(self):
        # single deterministic run at the default seed; the fitted rate
        # fluctuates seed to seed by about +-8% around 0.98 * (2 gamma)
        # (seeds 0..6 measured 0.94, 1.07, 0.98, 1.07, 0.96, 0.80, 1.01)
        t0 = time.time()
        z0 = 0.05
        params = Params(zeta0=z0, eps=2.0 * critical_pump(z0), ell=100.0)
        gamma = stability.growth_rate(0, params).gamma
        series = dyn.run(params, 10_000, t_final=14.0, field_refresh_every=1, seed=0)
        rate = dyn.fit_growth_rate(series, params)
        rel = abs(rate - 2.0 * gamma) / (2.0 * gamma)
        ok = rel <= 0.10 and (time.time() - t0) < 15 * 60.0
        nearest = dyn.nearest_branch_root(float(series.theta[-1]), params)
        assert report("kinetic growth rate", ok,
                      f"fitted {rate:.3f} vs 2*gamma={2 * gamma:.3f} (rel {rel:.3f}); "
                      f"late-time branch report: {nearest}")

    def test_below_threshold_baseline(self):
        t0 = time.time()
        z0 = 0.05
        window = 100.0
        theta_means, bunch_means = [], []
        for seed in range(1, 11):
            unpumped = Params(zeta0=z0, eps=0.0, ell=100.0)
            s = dyn.run(unpumped, 10_000, t_final=200.0, field_refresh_every=10, seed=seed)
            late = s.t >= window
            theta_means.append(float(s.theta[late].mean()))
            bunch_means.append(float(s.bunching[late].mean()))
        theta_means = np.array(theta_means)
        bunch_means = np.array(bunch_means)
        below = Params(zeta0=z0, eps=0.5 * critical_pump(z0), ell=100.0)
        s = dyn.run(below, 10_000, t_final=200.0, field_refresh_every=10, seed=0)
        late = s.t >= window
        theta_below = float(s.theta[late].mean())
        bunch_below = float(s.bunching[late].mean())
        z_theta = (theta_below - theta_means.mean()) / theta_means.std(ddof=1)
        z_bunch = (bunch_below - bunch_means.mean()) / bunch_means.std(ddof=1)
        # no growth either way; the criterion is the two-sigma theta test,
        # which also exposes the genuine sub-threshold collective
        # enhancement of the scattered-light noise floor
        ok = abs(z_theta) <= 2.0 and (time.time() - t0) < 15 * 60.0
        assert report("kinetic below-threshold baseline", ok,
                      f"theta {theta_below:.3e} vs baseline {theta_means.mean():.3e} "
                      f"+- {theta_means.std(ddof=1):.1e} (z = {z_theta:.2f}); "
                      f"bunching z = {z_bunch:.2f} stays at the shot-noise floor")


class TestAppendixSuite:
    def test_action_angle_round_trip(self):
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(1000):
            s = rd.CanonicalFieldState(*rng.normal(size=4))
            back = rd.from_action_angle(rd.to_action_angle(s))
            worst = max(worst, abs(back.Er - s.Er), abs(back.Ei - s.Ei),
                        abs(back.Pr - s.Pr), abs(back.Pi - s.Pi))
        ok = worst <= 1e-12
        assert report("appendix round trip", ok, f"worst round-trip error {worst:.2e}")

    def test_averaged_flow_conservation(self):
        params = Params(zeta0=1.0, eps=0.1, ell=100.0)
        gm = rd.thermal_g_model(0.02, potential=lambda z: 0.0)
        traj = rd.integrate_reduced(rd.ReducedState(1.0, 0.2, 1.0), (0.0, 100.0), params, gm,
                                    samples=101)
        theta_exact = bool(np.all(traj.Theta == traj.Theta[0]))
        hbar_drift = float(np.max(np.abs(traj.Hbar - traj.Hbar[0])))
        ok = theta_exact and hbar_drift <= 1e-8
        assert report("appendix averaged-flow conservation", ok,
                      f"Theta exact: {theta_exact}; Hbar drift {hbar_drift:.2e} (want <= 1e-8)")

    def test_full_flow_drift_linear_in_coupling(self):
        params = Params(zeta0=1.0, eps=0.1, ell=100.0)
        s0 = rd.from_action_angle(rd.ActionAngleState(Jr=0.6, Ji=0.4, psir=0.3, psii=1.1))
        drifts = []
        for c in (1e-3, 1e-2):
            gm = rd.thermal_g_model(c, potential=lambda z: 0.0)
            traj = rd.integrate_full(s0, (0.0, 2.0 * np.pi), params, gm, samples=501)
            drifts.append(float(np.max(np.abs(traj.Theta - traj.Theta[0])) / traj.Theta[0]))
        ratio = drifts[1] / drifts[0]
        coefficient = drifts[1] / 1e-2
        ok = 5.0 < ratio < 20.0
        assert report("appendix first-order invariant", ok,
                      f"peak Theta-bar deviation per coupling: {coefficient:.3f}; "
                      f"decade ratio {ratio:.1f} (want ~10)")


class TestOracleEquivalence:
    def test_special_functions(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for x in rng.uniform(-700.0, 700.0, 400):
            worst = max(worst, abs(bessel_i0(x) - oracles.bessel_i0_highprec(x))
                        / oracles.bessel_i0_highprec(x))
        for x in rng.uniform(-700.0, 700.0, 300):
            ref = oracles.bessel_i1_highprec(x)
            scale = max(abs(ref), 1.0)
            worst = max(worst, abs(bessel_i1(x) - ref) / scale)
        for m in rng.uniform(0.0, 0.999999, 300):
            ref = oracles.elliptic_k_agm(m)
            worst = max(worst, abs(elliptic_k(m) - ref) / ref)
        ok = worst <= 1e-12
        assert report("oracle equivalence (special functions)", ok,
                      f"worst relative error over 1000 points: {worst:.2e} (want <= 1e-12)")

    def test_dispersion_2d_quadrature(self):
        rng = np.random.default_rng(2)
        worst = 0.0
        count = 0
        for zeta0 in (0.05, 0.5, 75.0 / np.pi, 150.0 / np.pi):
            for _ in range(25):
                gamma = float(np.exp(rng.uniform(np.log(0.1), np.log(3.0))))
                eps = float(rng.uniform(0.5, 3.0)) * critical_pump(zeta0)
                n = int(rng.integers(0, 3))
                params = Params(zeta0=zeta0, eps=eps, ell=100.0)
                mine = stability.dispersion(n, gamma, params)
                oracle = oracles.dispersion_2d_quadrature(n, gamma, zeta0, eps)
                worst = max(worst, abs(mine - oracle))
                count += 1
        ok = worst <= 1e-6 and count == 100
        assert report("oracle equivalence (dispersion 2D quadrature)", ok,
                      f"worst |difference| over {count} parameter points: {worst:.2e} (want <= 1e-6)")
