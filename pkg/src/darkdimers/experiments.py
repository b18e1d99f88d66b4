"""Experiment orchestration: parameter sweeps, named experiment presets,
and deterministic CSV/JSON output.

Every CSV gets a JSON sidecar (same stem, .json) recording the fully
resolved configuration and the library version.  Floats are written
with 12 significant digits so identical configs give byte-identical
files.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .config import ExperimentConfig, initial_state_vector, parse_grid
from .darkstates import predicted_populations
from .dynamics import EvolveConfig, TimeSeries, steady_state
from .model import build_model, make_bath, make_geometry
from .observables import pair_correlations, polarization_moments, purity

__all__ = [
    "SweepCell",
    "run_sweep",
    "run_experiment",
    "write_sweep_csv",
    "write_series_csv",
    "write_correlations_csv",
    "EXPERIMENT_NAMES",
]

EXPERIMENT_NAMES = ("fig2", "fig3", "fig4", "fig5")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.12g}"


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(csv_path: str, cfg: ExperimentConfig, columns: Sequence[str],
                    extra: Optional[Dict] = None) -> str:
    manifest = {
        "file": os.path.basename(csv_path),
        "columns": list(columns),
        "config": cfg.to_dict(),
        "version": __version__,
    }
    if extra:
        manifest.update(extra)
    path = os.path.splitext(csv_path)[0] + ".json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# Parameter sweep


@dataclass
class SweepCell:
    k0zc: float
    k0a: float
    var_x: float
    var_y: float
    purity: float
    mean_z: float
    t_converge: float
    converged: bool


SWEEP_COLUMNS = ("k0zc", "k0a", "var_x", "var_y", "purity", "mean_z",
                 "t_converge", "converged")


def _evolve_config(cfg: ExperimentConfig) -> EvolveConfig:
    return EvolveConfig(dt=cfg.dt, t_max=cfg.t_max,
                        record_stride=cfg.record_stride, convergence_tol=cfg.tol)


def _sweep_cell(args) -> Tuple[int, SweepCell]:
    index, cfg, k0zc, k0a = args
    try:
        geo = make_geometry(cfg.n_at, k0a, k0zc)
        bath = make_bath(cfg.n_ph, cfg.phi)
        model = build_model(geo, bath, cfg.gamma)
        psi0 = initial_state_vector(cfg)
        result = steady_state(psi0, model, _evolve_config(cfg))
        moments = polarization_moments(result.state, cfg.n_at)
        cell = SweepCell(
            k0zc=k0zc,
            k0a=k0a,
            var_x=moments.var_x,
            var_y=moments.var_y,
            purity=purity(result.state),
            mean_z=moments.mean_z,
            t_converge=result.t_converge,
            converged=result.converged,
        )
    except Exception:
        # A failed cell must not abort the sweep; it is reported as
        # non-converged with empty observables.
        nan = float("nan")
        cell = SweepCell(k0zc, k0a, nan, nan, nan, nan, nan, False)
    return index, cell


def run_sweep(
    cfg: ExperimentConfig,
    zc_values: Optional[np.ndarray] = None,
    a_values: Optional[np.ndarray] = None,
    workers: Optional[int] = None,
) -> List[SweepCell]:
    """Steady-state observables on the (k0zc, k0a) grid, rows in
    deterministic zc-major order.  Cells are independent and are
    distributed over a process pool when workers > 1; the merge order
    (and therefore the output) does not depend on the worker count."""
    zc_values = parse_grid(cfg.grid_zc) if zc_values is None else np.asarray(zc_values)
    a_values = parse_grid(cfg.grid_a) if a_values is None else np.asarray(a_values)
    workers = cfg.workers if workers is None else workers
    tasks = [
        (i * a_values.size + j, cfg, float(zc), float(a))
        for i, zc in enumerate(zc_values)
        for j, a in enumerate(a_values)
    ]
    cells: List[Optional[SweepCell]] = [None] * len(tasks)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, cell in pool.map(_sweep_cell, tasks, chunksize=4):
                cells[index] = cell
    else:
        for task in tasks:
            index, cell = _sweep_cell(task)
            cells[index] = cell
    return cells  # type: ignore[return-value]


def write_sweep_csv(path: str, cells: Sequence[SweepCell], cfg: ExperimentConfig,
                    extra: Optional[Dict] = None) -> List[str]:
    rows = [
        (c.k0zc, c.k0a, c.var_x, c.var_y, c.purity, c.mean_z, c.t_converge,
         c.converged)
        for c in cells
    ]
    _write_csv(path, SWEEP_COLUMNS, rows)
    manifest = _write_manifest(path, cfg, SWEEP_COLUMNS, extra)
    return [path, manifest]


# ---------------------------------------------------------------------------
# Series and matrix output


def series_columns(n_at: int) -> List[str]:
    return (["t", "purity", "mean_x", "mean_y", "mean_z", "var_x", "var_y"]
            + [f"p{k}" for k in range(n_at + 1)])


def write_series_csv(path: str, series: TimeSeries, n_at: int,
                     cfg: ExperimentConfig, extra: Optional[Dict] = None) -> List[str]:
    cols = series_columns(n_at)
    rows = zip(series.times, *(series.data[c] for c in cols[1:]))
    _write_csv(path, cols, rows)
    manifest = _write_manifest(path, cfg, cols, extra)
    return [path, manifest]


def write_correlations_csv(path: str, corr: np.ndarray, cfg: ExperimentConfig,
                           extra: Optional[Dict] = None) -> List[str]:
    n_at = corr.shape[0]
    rows = [(n + 1, m + 1, corr[n, m]) for n in range(n_at) for m in range(n_at)]
    _write_csv(path, ("n", "m", "C"), rows)
    manifest = _write_manifest(path, cfg, ("n", "m", "C"), extra)
    return [path, manifest]


def write_populations_csv(path: str, steady: np.ndarray, predicted: np.ndarray,
                          cfg: ExperimentConfig, extra: Optional[Dict] = None) -> List[str]:
    rows = [(ne, steady[ne], predicted[ne]) for ne in range(steady.size)]
    _write_csv(path, ("n_e", "p_steady", "p_predicted"), rows)
    manifest = _write_manifest(path, cfg, ("n_e", "p_steady", "p_predicted"), extra)
    return [path, manifest]


# ---------------------------------------------------------------------------
# Named experiments


def _replace(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    data = cfg.to_dict()
    data.update(kwargs)
    return ExperimentConfig(**data)


def _steady_with_series(cfg: ExperimentConfig):
    geo = make_geometry(cfg.n_at, cfg.k0a, cfg.k0zc)
    bath = make_bath(cfg.n_ph, cfg.phi)
    model = build_model(geo, bath, cfg.gamma)
    psi0 = initial_state_vector(cfg)
    return steady_state(psi0, model, _evolve_config(cfg), record=True), geo, bath


def dimer_center(n_at: int, k0a: float) -> float:
    """Array center putting every nearest-neighbor pair at a quadrature
    extremum.  Pair sums are 2 zc + (4n - n_at - 2) k0a, so for
    separations with 4 k0a = 0 (mod pi) the choice
    zc = (n_at - 2) k0a / 2 (mod pi/2) zeroes them all (mod pi)."""
    return ((n_at - 2) * k0a / 2.0) % (math.pi / 2.0)


def run_experiment(name: str, cfg: ExperimentConfig, outdir: str) -> List[str]:
    """Produce the data files of one named experiment preset under
    `outdir`; returns the written paths."""
    if name not in EXPERIMENT_NAMES:
        raise ValueError(
            f"unknown experiment {name!r}; expected one of {EXPERIMENT_NAMES}"
        )
    os.makedirs(outdir, exist_ok=True)
    files: List[str] = []

    if name == "fig2":
        # Steady-state map over array center and separation.
        sweep_cfg = _replace(cfg, initial="ground")
        cells = run_sweep(sweep_cfg)
        files += write_sweep_csv(
            os.path.join(outdir, "fig2_sweep.csv"), cells, sweep_cfg,
            {"experiment": "fig2"},
        )

    elif name == "fig3":
        # Pair correlations of the dimerized and melted six-atom chains.
        for tag, k0a in (("dimer", math.pi / 4), ("melted", math.pi)):
            case = _replace(cfg, n_at=6, k0a=k0a, k0zc=0.0, initial="ground")
            result, _, _ = _steady_with_series(case)
            corr = pair_correlations(result.state, case.n_at)
            files += write_correlations_csv(
                os.path.join(outdir, f"fig3_{tag}_correlations.csv"), corr, case,
                {"experiment": "fig3", "case": tag,
                 "converged": bool(result.converged)},
            )

    elif name == "fig4":
        # Relaxation timescales for growing arrays, dimerized vs melted.
        for tag, k0a in (("dimer", math.pi / 4), ("melted", math.pi)):
            for n_at in (2, 4, 6):
                zc = dimer_center(n_at, k0a) if tag == "dimer" else 0.0
                case = _replace(cfg, n_at=n_at, k0a=k0a, k0zc=zc, initial="ground")
                result, _, _ = _steady_with_series(case)
                files += write_series_csv(
                    os.path.join(outdir, f"fig4_{tag}_n{n_at}_series.csv"),
                    result.series, n_at, case,
                    {"experiment": "fig4", "case": tag, "n_at": n_at,
                     "converged": bool(result.converged),
                     "t_converge": result.t_converge},
                )

    elif name == "fig5":
        # Polarization decay and final excitation statistics for the
        # three six-atom geometries, each atom starting in
        # (|g> + e^{i pi/4} |e>)/sqrt(2).
        cases = (
            ("thermal", math.pi / 4, 2.0 * math.pi),
            ("squeezed", 0.0, 2.0 * math.pi),
            ("dimer", 0.0, math.pi / 4),
        )
        for tag, k0zc, k0a in cases:
            case = _replace(cfg, n_at=6, k0a=k0a, k0zc=k0zc, initial="plus-pi-4")
            result, geo, bath = _steady_with_series(case)
            files += write_series_csv(
                os.path.join(outdir, f"fig5_{tag}_series.csv"),
                result.series, case.n_at, case,
                {"experiment": "fig5", "case": tag,
                 "converged": bool(result.converged)},
            )
            steady_pop = np.array(
                [result.series.data[f"p{k}"][-1] for k in range(case.n_at + 1)]
            )
            predicted = predicted_populations(tag, case.n_at, bath)
            files += write_populations_csv(
                os.path.join(outdir, f"fig5_{tag}_populations.csv"),
                steady_pop, predicted, case,
                {"experiment": "fig5", "case": tag, "law": tag},
            )

    return files
