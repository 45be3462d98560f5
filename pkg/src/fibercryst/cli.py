"""Command-line front end: scenario configuration, execution, CSV emission.

Configs are flat ``key = value`` files with ``#`` comments.  Every scenario
writes its CSV outputs plus a ``manifest.txt`` recording parameters, seeds
and versions into the output directory.  Exit codes: 0 success, 2 config
error, 3 numerical/convergence error.

The environment variable FIBERCRYST_THREADS caps the thread pool used for
embarrassingly parallel scans (default 1: fully sequential, deterministic
output ordering either way).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, branches, dynamics, reduced, stability, stationary
from .errors import ConfigError, FiberCrystError
from .model import Params, critical_pump

COMMANDS = ("threshold", "branches", "stationary", "dynamics", "reduced")

# key -> (type, default); required keys have default None
_COMMON_KEYS = {
    "command": (str, None),
    "zeta0": (float, None),
    "ell": (float, 100.0),
    "n_max": (int, 3),
    "seed": (int, 0),
}
_SCENARIO_KEYS = {
    "threshold": {
        "eps_min": (float, None),
        "eps_max": (float, None),
        "eps_steps": (int, 21),
    },
    "branches": {
        "eps_min": (float, None),
        "eps_max": (float, None),
        "eps_steps": (int, 200),
        "regime": (str, "weak"),
    },
    "stationary": {
        "eps": (float, None),
        "eps_over_eps_c": (float, None),
        "branch_list": (str, "0,1,2"),
        "points_per_wavelength": (int, 24),
        "picard_iterations": (int, 6000),
        "relaxation": (float, 0.15),
    },
    "dynamics": {
        "eps": (float, None),
        "eps_over_eps_c": (float, None),
        "n_particles": (int, 10000),
        "t_final": (float, 200.0),
        "dt": (float, 0.02),
        "field_refresh_every": (int, 1),
        "checkpoint": (int, 0),
    },
    "reduced": {
        "eps": (float, 0.1),
        "coupling": (float, 0.01),
        "theta_bar": (float, 1.0),
        "d0": (float, 0.0),
        "delta0": (float, 1.0),
        "z_max": (float, 100.0),
        "samples": (int, 201),
        "trap": (str, "none"),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated flat scenario configuration."""

    command: str
    params: Params
    options: dict
    seed: int


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a key=value config, collecting *all* errors.

    Raises :class:`ConfigError` carrying one message per problem, each with
    its line number.
    """
    raw: dict[str, tuple[str, int]] = {}
    errors: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected key = value, got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = (value, lineno)

    command, cmd_line = raw.get("command", (None, 0))
    if command is None:
        errors.append("missing key: command")
    elif command not in COMMANDS:
        errors.append(f"line {cmd_line}: unknown command {command!r} (one of {', '.join(COMMANDS)})")
        command = None

    schema = dict(_COMMON_KEYS)
    if command is not None:
        schema.update(_SCENARIO_KEYS[command])

    values: dict = {}
    for key, (value, lineno) in raw.items():
        if key == "command":
            continue
        if key not in schema:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        typ, _ = schema[key]
        try:
            values[key] = typ(value)
        except ValueError:
            errors.append(f"line {lineno}: key {key!r} expects {typ.__name__}, got {value!r}")

    for key, (typ, default) in schema.items():
        if key in ("command",) or key in values:
            continue
        if default is None:
            if command == "stationary" and key in ("eps", "eps_over_eps_c"):
                continue  # handled below: exactly one required
            if command == "dynamics" and key in ("eps", "eps_over_eps_c"):
                continue
            errors.append(f"missing key: {key}")
        else:
            values[key] = default

    # domain validation with line numbers where available
    def line_of(key):
        return raw[key][1] if key in raw else 0

    if "zeta0" in values and not values["zeta0"] > 0.0:
        errors.append(f"line {line_of('zeta0')}: zeta0 must be > 0, got {values['zeta0']!r}")
    if "ell" in values and not values["ell"] > 0.0:
        errors.append(f"line {line_of('ell')}: ell must be > 0, got {values['ell']!r}")
    if command in ("stationary", "dynamics"):
        has_eps = "eps" in values
        has_rel = "eps_over_eps_c" in values
        if has_eps == has_rel:
            errors.append(f"{command} needs exactly one of eps, eps_over_eps_c")
    if command in ("threshold", "branches"):
        if "eps_min" in values and "eps_max" in values and not values["eps_min"] < values["eps_max"]:
            errors.append(f"line {line_of('eps_max')}: eps_max must exceed eps_min")
    if command == "branches" and values.get("regime") not in ("weak", "strong", "both", None):
        errors.append(f"line {line_of('regime')}: regime must be weak, strong or both")

    if errors:
        raise ConfigError(errors)

    zeta0 = values.pop("zeta0")
    ell = values.pop("ell")
    n_max = values.pop("n_max")
    seed = values.pop("seed")
    eps = values.pop("eps", None)
    if eps is None:
        rel = values.pop("eps_over_eps_c", None)
        eps = rel * critical_pump(zeta0) if rel is not None else 0.0
    else:
        values.pop("eps_over_eps_c", None)
    params = Params(zeta0=zeta0, eps=eps, ell=ell, n_max=n_max)
    return ScenarioConfig(command=command, params=params, options=values, seed=seed)


def thread_count() -> int:
    raw = os.environ.get("FIBERCRYST_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving order; threaded only when FIBERCRYST_THREADS > 1."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_manifest(out: Path, config: ScenarioConfig, outputs: list[str]) -> None:
    lines = [
        f"command={config.command}",
        f"fibercryst_version={__version__}",
        f"numpy_version={np.__version__}",
        f"seed={config.seed}",
        f"zeta0={config.params.zeta0:.17g}",
        f"eps={config.params.eps:.17g}",
        f"ell={config.params.ell:.17g}",
        f"n_max={config.params.n_max}",
    ]
    lines += [f"option_{k}={v}" for k, v in sorted(config.options.items())]
    lines += [f"output={name}" for name in outputs]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _run_threshold(config: ScenarioConfig, out: Path) -> list[str]:
    o = config.options
    grid = list(np.linspace(o["eps_min"], o["eps_max"], o["eps_steps"]))
    reports = stability.threshold_scan(config.params, grid)
    path = out / "threshold.csv"
    stability.write_threshold_csv(reports, path)
    return [path.name]

def _run_branches(config: ScenarioConfig, out: Path) -> list[str]:
    o = config.options
    regimes = [o["regime"]] if o["regime"] != "both" else [branches.WEAK, branches.STRONG]
    names = []

    def trace(job):
        n, regime = job
        return branches.trace_branch(config.params.zeta0, n, (o["eps_min"], o["eps_max"]),
                                     o["eps_steps"], regime)

    jobs = [(n, regime) for regime in regimes for n in range(config.params.n_max + 1)]
    curves = parallel_map(trace, jobs)
    for (n, regime), curve in zip(jobs, curves):
        path = out / f"branch_{regime}_n{n}.csv"
        branches.write_branch_csv(curve, path)
        names.append(path.name)
    return names


def _run_stationary(config: ScenarioConfig, out: Path) -> list[str]:
    o = config.options
    branch_list = [int(tok) for tok in str(o["branch_list"]).split(",") if tok.strip() != ""]
    names = []
    for n in branch_list:
        roots = branches.branch_roots(config.params.zeta0, config.params.eps, n, branches.STRONG)
        theta_seed = roots[0] if roots else 0.1
        solution = stationary.solve_ordered_state(
            config.params, n, theta_seed,
            points_per_wavelength=o["points_per_wavelength"],
            picard_iterations=o["picard_iterations"],
            relaxation=o["relaxation"])
        path = out / f"stationary_n{n}.csv"
        stationary.write_solution_csv(solution, path)
        names.append(path.name)
    return names


def _run_dynamics(config: ScenarioConfig, out: Path) -> list[str]:
    o = config.options
    series = dynamics.run(config.params, o["n_particles"], o["t_final"],
                          field_refresh_every=o["field_refresh_every"],
                          seed=config.seed, dt=o["dt"])
    path = out / "dynamics.csv"
    dynamics.write_timeseries_csv(series, path)
    names = [path.name]
    if o["checkpoint"]:
        ens = dynamics.sample_normal_phase(o["n_particles"], config.params, config.seed)
        ck = out / "ensemble_initial.bin"
        dynamics.save_checkpoint(ens, ck)
        names.append(ck.name)
    return names


def _run_reduced(config: ScenarioConfig, out: Path) -> list[str]:
    o = config.options
    potential = (lambda z: 0.0) if o["trap"] == "none" else None
    g_model = reduced.thermal_g_model(o["coupling"], potential=potential)
    state0 = reduced.ReducedState(Theta=o["theta_bar"], D=o["d0"], Delta=o["delta0"])
    traj = reduced.integrate_reduced(state0, (0.0, o["z_max"]), config.params, g_model,
                                     samples=o["samples"])
    path = out / "reduced.csv"
    reduced.write_trajectory_csv(traj, path)
    return [path.name]


_RUNNERS = {
    "threshold": _run_threshold,
    "branches": _run_branches,
    "stationary": _run_stationary,
    "dynamics": _run_dynamics,
    "reduced": _run_reduced,
}


def run_scenario(config: ScenarioConfig, out_dir) -> list[str]:
    """Execute a validated scenario; returns the list of files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = _RUNNERS[config.command](config, out)
    _write_manifest(out, config, outputs)
    return outputs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fibercryst",
        description="Scenario runner for the 1D light-crystallization laboratory")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a key=value config file")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
        if config.command != args.command:
            raise ConfigError([f"config command {config.command!r} does not match "
                               f"CLI command {args.command!r}"])
    except ConfigError as exc:
        for message in exc.errors:
            print(f"config error: {message}", file=sys.stderr)
        return 2

    if args.seed is not None:
        config = ScenarioConfig(command=config.command, params=config.params,
                                options=config.options, seed=args.seed)
    try:
        outputs = run_scenario(config, args.out)
    except FiberCrystError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    for name in outputs:
        print(name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
