"""Command-line interface.

Subcommands: sweep, evolve, steady, correlations, darkstate,
populations, experiment.  Exit codes: 0 success, 1 runtime or
convergence failure in a non-sweep command, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    initial_state_vector,
    load_config_file,
    resolve_config,
)
from .darkstates import (
    collective_dark_state,
    dimer_chain,
    melted_dark,
    stability_residual,
    stable_dark_geometry,
    predicted_populations,
)
from .dynamics import EvolveConfig, IntegrationInstabilityError, steady_state
from .experiments import (
    EXPERIMENT_NAMES,
    run_experiment,
    run_sweep,
    series_columns,
    write_correlations_csv,
    write_populations_csv,
    write_series_csv,
    write_sweep_csv,
)
from .model import build_model, make_bath, make_geometry
from .observables import (
    dark_condition,
    excitation_populations,
    pair_correlations,
    polarization_moments,
    purity,
)

_CONFIG_FLAGS = (
    ("--n-at", "n_at", "number of atoms"),
    ("--n-ph", "n_ph", "photons per mode N_ph"),
    ("--phi", "phi", "squeezing reference phase (accepts pi expressions)"),
    ("--k0a", "k0a", "dimensionless lattice constant k0*a"),
    ("--k0zc", "k0zc", "dimensionless array center k0*z_c"),
    ("--gamma", "gamma", "waveguide decay rate"),
    ("--dt", "dt", "integrator step (units 1/gamma)"),
    ("--t-max", "t_max", "integration horizon"),
    ("--tol", "tol", "steady-state residual tolerance on ||drho/dt||_F"),
    ("--record-stride", "record_stride", "steps between recorded points"),
    ("--initial", "initial", "ground | plus-pi-4 | state file"),
    ("--grid-zc", "grid_zc", "sweep grid for k0zc: 'lo:hi:n' or comma list"),
    ("--grid-a", "grid_a", "sweep grid for k0a: 'lo:hi:n' or comma list"),
    ("--workers", "workers", "parallel worker processes"),
    ("--out", "out", "output file (or directory for experiments)"),
)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="FILE", help="key/value config file")
    for flag, dest, help_text in _CONFIG_FLAGS:
        parser.add_argument(flag, dest=dest, metavar="V", help=help_text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkdimers",
        description="Steady states of an atomic array in a squeezed vacuum: "
        "master-equation dynamics, dark-state constructors, sweeps.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="steady-state grid over (k0zc, k0a)")
    _add_common(sweep)

    evolve = sub.add_parser("evolve", help="time series of one evolution")
    _add_common(evolve)

    steady = sub.add_parser("steady", help="steady state of one setup")
    _add_common(steady)

    corr = sub.add_parser("correlations", help="steady-state sigma_x correlations")
    _add_common(corr)

    dark = sub.add_parser(
        "darkstate", help="construct the analytic dark state and print residuals"
    )
    _add_common(dark)
    dark.add_argument("--l", dest="sector", type=int, default=None,
                      help="melted sector (number of squeezed pairs); "
                      "default n_at/2")

    pops = sub.add_parser("populations", help="excitation-number distribution")
    _add_common(pops)
    pops.add_argument("--law", choices=("thermal", "squeezed", "dimer", "none"),
                      default="none", help="closed-form law to print alongside")

    exp = sub.add_parser("experiment", help="run a named experiment preset")
    exp.add_argument("name", choices=EXPERIMENT_NAMES)
    _add_common(exp)

    return parser


def _resolve(args) -> "ExperimentConfig":
    file_values = load_config_file(args.config) if args.config else None
    flag_values = {
        dest: getattr(args, dest) for _, dest, _ in _CONFIG_FLAGS
        if getattr(args, dest, None) is not None
    }
    return resolve_config(file_values, flag_values)


def _setup(cfg):
    geo = make_geometry(cfg.n_at, cfg.k0a, cfg.k0zc)
    bath = make_bath(cfg.n_ph, cfg.phi)
    model = build_model(geo, bath, cfg.gamma)
    ecfg = EvolveConfig(dt=cfg.dt, t_max=cfg.t_max,
                        record_stride=cfg.record_stride, convergence_tol=cfg.tol)
    return geo, bath, model, ecfg


def _print_summary(result, cfg):
    moments = polarization_moments(result.state, cfg.n_at)
    pops = excitation_populations(result.state)
    print(f"converged: {result.converged}")
    print(f"t_converge: {result.t_converge:.6g}")
    print(f"residual: {result.residual:.6g}")
    print(f"purity: {purity(result.state):.12g}")
    print(f"mean_x/y/z: {moments.mean_x:.6g} {moments.mean_y:.6g} {moments.mean_z:.6g}")
    print(f"var_x/y: {moments.var_x:.6g} {moments.var_y:.6g}")
    print("populations: " + " ".join(f"{p:.6g}" for p in pops))


def _cmd_sweep(args) -> int:
    cfg = _resolve(args)
    cells = run_sweep(cfg)
    out = cfg.out or "sweep.csv"
    files = write_sweep_csv(out, cells, cfg)
    print("\n".join(files))
    return 0


def _cmd_evolve(args) -> int:
    cfg = _resolve(args)
    _, _, model, ecfg = _setup(cfg)
    result = steady_state(initial_state_vector(cfg), model, ecfg, record=True)
    out = cfg.out or "series.csv"
    files = write_series_csv(out, result.series, cfg.n_at, cfg,
                             {"converged": bool(result.converged)})
    print("\n".join(files))
    return 0


def _cmd_steady(args) -> int:
    cfg = _resolve(args)
    _, _, model, ecfg = _setup(cfg)
    result = steady_state(initial_state_vector(cfg), model, ecfg)
    _print_summary(result, cfg)
    if cfg.out:
        moments = polarization_moments(result.state, cfg.n_at)
        pops = excitation_populations(result.state)
        header = series_columns(cfg.n_at)[1:] + ["t_converge", "converged"]
        row = ([purity(result.state), moments.mean_x, moments.mean_y,
                moments.mean_z, moments.var_x, moments.var_y]
               + list(pops) + [result.t_converge, result.converged])
        from .experiments import _write_csv, _write_manifest
        _write_csv(cfg.out, header, [row])
        _write_manifest(cfg.out, cfg, header)
    return 0 if result.converged else 1


def _cmd_correlations(args) -> int:
    cfg = _resolve(args)
    _, _, model, ecfg = _setup(cfg)
    result = steady_state(initial_state_vector(cfg), model, ecfg)
    corr = pair_correlations(result.state, cfg.n_at)
    out = cfg.out or "correlations.csv"
    files = write_correlations_csv(out, corr, cfg,
                                   {"converged": bool(result.converged)})
    print("\n".join(files))
    return 0 if result.converged else 1


def _cmd_darkstate(args) -> int:
    cfg = _resolve(args)
    geo, bath, model, _ = _setup(cfg)
    if model.squeezed_jumps is None:
        raise ConfigError(
            "darkstate needs a minimal-uncertainty squeezed bath with n_ph > 0"
        )
    melted = abs(math.sin(cfg.k0a)) <= 1e-9
    if not stable_dark_geometry(cfg.n_at, cfg.k0a, cfg.k0zc):
        raise ConfigError(
            f"no stable dark state at n_at={cfg.n_at}, k0a={cfg.k0a:.6g}, "
            f"k0zc={cfg.k0zc:.6g}: nearest-neighbor pairs must sit at "
            "quadrature extrema (cos k0(z_n+z_m) = +/-1) and n_at must be even"
        )
    if melted:
        sector = args.sector if args.sector is not None else cfg.n_at // 2
        psi = melted_dark(geo, bath, sector)
        label = f"melted_dark(l={sector})"
    else:
        psi = dimer_chain(geo, bath)
        label = "dimer_chain"
    jx, jy = model.squeezed_jumps
    print(f"state: {label}")
    print(f"jump annihilation |Jx psi|: {np.linalg.norm(jx @ psi):.3e}")
    print(f"jump annihilation |Jy psi|: {np.linalg.norm(jy @ psi):.3e}")
    print(f"hamiltonian stability residual: {stability_residual(psi, model):.3e}")
    print(f"dark condition min eig: {dark_condition(geo, bath):.3e}")
    print("populations: " + " ".join(f"{p:.6g}" for p in excitation_populations(psi)))
    if melted and abs(math.sin(cfg.k0a / 2.0)) <= 1e-9 \
            and abs(math.sin(2.0 * cfg.k0zc)) <= 1e-9:
        other = collective_dark_state(geo, bath, cfg.n_at // 2)
        overlap = abs(np.vdot(other, psi)) ** 2
        print(f"collective-form cross-check fidelity: {overlap:.12g}")
    return 0


def _cmd_populations(args) -> int:
    cfg = _resolve(args)
    _, bath, model, ecfg = _setup(cfg)
    result = steady_state(initial_state_vector(cfg), model, ecfg)
    pops = excitation_populations(result.state)
    if args.law != "none":
        predicted = predicted_populations(args.law, cfg.n_at, bath)
    else:
        predicted = np.full(cfg.n_at + 1, float("nan"))
    for ne in range(cfg.n_at + 1):
        line = f"P({ne}) = {pops[ne]:.6g}"
        if args.law != "none":
            line += f"   {args.law}: {predicted[ne]:.6g}"
        print(line)
    if cfg.out:
        write_populations_csv(cfg.out, pops, predicted, cfg, {"law": args.law})
    return 0 if result.converged else 1


def _cmd_experiment(args) -> int:
    cfg = _resolve(args)
    outdir = cfg.out or "experiment_data"
    files = run_experiment(args.name, cfg, outdir)
    print("\n".join(files))
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "evolve": _cmd_evolve,
    "steady": _cmd_steady,
    "correlations": _cmd_correlations,
    "darkstate": _cmd_darkstate,
    "populations": _cmd_populations,
    "experiment": _cmd_experiment,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationInstabilityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
