"""Lindblad generators, time integration, and steady-state determination.

Two equivalent generators are available for every model: the
travelling-wave form with eight signed channels ("general") and, for
minimal-uncertainty baths with n_ph > 0, the two-jump standing-wave form
("squeezed").  Integration is fixed-step classical Runge-Kutta (RK4)
with per-step re-Hermitization and trace renormalization.

For long horizons `steady_state` evaluates the same RK4 iteration
through its one-step matrix: the generator is vectorized in an
orthonormal basis of Hermitian matrices (real coordinates, so
Hermiticity is structural), the degree-4 RK4 polynomial of dt*L is
formed once, and repeated squaring of that matrix walks the trajectory
in geometrically growing strides.  The visited states are bit-for-bit
states of the plain RK4 iteration, just evaluated at coarse times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .model import ModelOperators
from .operators import (
    embed_single_site,
    excitation_counts,
    pure_to_density,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
)

__all__ = [
    "EvolveConfig",
    "TimeSeries",
    "SteadyStateResult",
    "IntegrationInstabilityError",
    "lindblad_rhs_general",
    "lindblad_rhs_squeezed",
    "evolve",
    "steady_state",
    "liouvillian_matrix",
]

_SQRT2 = math.sqrt(2.0)
# Dense superoperators get large quickly (16**n_at entries); 6 atoms is
# 134 MB in the real representation, 7 would be 34 GB.
_FAST_PATH_MAX_ATOMS = 6
_LIOUVILLIAN_MAX_ATOMS = 5


class IntegrationInstabilityError(RuntimeError):
    """Raised when the integrator loses positivity beyond tolerance."""


@dataclass(frozen=True)
class EvolveConfig:
    """Fixed-step integration parameters (units of 1/gamma)."""

    dt: float = 0.005
    t_max: float = 2.0e4
    record_stride: int = 200
    convergence_tol: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.dt < 0.1:
            raise ValueError(
                f"dt must be in (0, 0.1) for RK4 stability at gamma-scale "
                f"rates, got {self.dt}"
            )
        if self.t_max <= 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")
        if self.convergence_tol <= 0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol}")


@dataclass
class TimeSeries:
    """Recorded observables along a trajectory.

    data maps column names (purity, mean_x/y/z, var_x/y, p0..pN) to
    arrays aligned with `times`.  max_trace_dev and min_eigenvalue track
    the worst numerical-hygiene excursions seen at recorded steps
    (trace deviation is measured before renormalization).
    """

    times: np.ndarray
    data: Dict[str, np.ndarray]
    max_trace_dev: float = 0.0
    min_eigenvalue: float = 0.0


@dataclass
class SteadyStateResult:
    state: np.ndarray
    t_converge: float
    residual: float
    converged: bool
    series: Optional[TimeSeries] = None


# ---------------------------------------------------------------------------
# Generators


def _dissipator_terms(model: ModelOperators, form: str):
    """(coefficient, op, op^dag, op^dag op) for the selected unraveling."""
    if form == "squeezed":
        if model.squeezed_jumps is None:
            raise ValueError(
                "the squeezed two-jump generator requires a minimal-uncertainty "
                "bath with n_ph > 0"
            )
        jx, jy = model.squeezed_jumps
        rate = model.squeezed_rate
        ops = [(rate, jx), (rate, jy)]
    elif form == "general":
        ops = [(ch.coefficient, ch.operator) for ch in model.travelling_jumps]
    else:
        raise ValueError(f"unknown generator form {form!r}")
    return [(c, op, op.conj().T, op.conj().T @ op) for c, op in ops if c != 0.0]


def _resolve_form(model: ModelOperators, form: str) -> str:
    if form == "auto":
        return "squeezed" if model.squeezed_jumps is not None else "general"
    return form


def _rhs_from_terms(hamiltonian, terms, rho):
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for c, op, opd, k in terms:
        out += c * (op @ rho @ opd - 0.5 * (k @ rho + rho @ k))
    return out


def lindblad_rhs_general(rho: np.ndarray, model: ModelOperators) -> np.ndarray:
    """d(rho)/dt of the travelling-wave master equation:
    -i[H, rho] plus the eight signed channels
    (gamma/2)[(N+1) L[J_s] + N L[J_s^dag] + |M|/2 L[J_{phi,s}]
              - |M|/2 L[J_{phi+pi,s}]] for s = +/-."""
    if rho.shape != model.hamiltonian.shape:
        raise ValueError(
            f"dimension mismatch: rho {rho.shape}, model dim {model.hamiltonian.shape}"
        )
    return _rhs_from_terms(model.hamiltonian, _dissipator_terms(model, "general"), rho)


def lindblad_rhs_squeezed(rho: np.ndarray, model: ModelOperators) -> np.ndarray:
    """d(rho)/dt of the manifestly completely-positive two-jump form:
    -i[H, rho] + 4 gamma |mu nu| (L[Jx] + L[Jy]) rho."""
    if rho.shape != model.hamiltonian.shape:
        raise ValueError(
            f"dimension mismatch: rho {rho.shape}, model dim {model.hamiltonian.shape}"
        )
    return _rhs_from_terms(model.hamiltonian, _dissipator_terms(model, "squeezed"), rho)


def liouvillian_matrix(model: ModelOperators, form: str = "general") -> np.ndarray:
    """Dense superoperator L with L vec(rho) = vec(d rho/dt), vec
    column-stacked.  Guarded to n_at <= 5 (the matrix has 16**n_at
    entries)."""
    if model.n_at > _LIOUVILLIAN_MAX_ATOMS:
        raise ValueError(
            f"dense Liouvillian is guarded to n_at <= {_LIOUVILLIAN_MAX_ATOMS}; "
            f"got n_at = {model.n_at}"
        )
    return _superoperator(model, _resolve_form(model, form))


def _superoperator(model: ModelOperators, form: str) -> np.ndarray:
    d = model.hamiltonian.shape[0]
    eye = np.eye(d, dtype=complex)
    h = model.hamiltonian
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c, op, opd, k in _dissipator_terms(model, form):
        lv += c * np.kron(op.conj(), op)
        lv -= 0.5 * c * np.kron(eye, k)
        lv -= 0.5 * c * np.kron(k.T, eye)
    return lv


# ---------------------------------------------------------------------------
# Observable recording


class _ObservableSet:
    """Collective-polarization observables for an n_at register."""

    def __init__(self, n_at: int):
        d = 2**n_at
        self.n_at = n_at
        self.dim = d
        sx = np.zeros((d, d), dtype=complex)
        sy = np.zeros((d, d), dtype=complex)
        sz = np.zeros((d, d), dtype=complex)
        for n in range(1, n_at + 1):
            sx += 0.5 * embed_single_site(SIGMA_X, n, n_at)
            sy += 0.5 * embed_single_site(SIGMA_Y, n, n_at)
            sz += 0.5 * embed_single_site(SIGMA_Z, n, n_at)
        self.s_ops = {"x": sx, "y": sy, "z": sz}
        self.s2_ops = {j: op @ op for j, op in self.s_ops.items()}
        counts = excitation_counts(n_at)
        self.pop_masks = [counts == k for k in range(n_at + 1)]

    def record(self, rho: np.ndarray) -> Dict[str, float]:
        rec = {"purity": float(np.trace(rho @ rho).real)}
        for j in "xyz":
            rec[f"mean_{j}"] = float(np.trace(rho @ self.s_ops[j]).real)
        for j in "xy":
            mean = rec[f"mean_{j}"]
            rec[f"var_{j}"] = float(np.trace(rho @ self.s2_ops[j]).real) - mean**2
        diag = rho.diagonal().real
        for k, mask in enumerate(self.pop_masks):
            rec[f"p{k}"] = float(diag[mask].sum())
        return rec

    def column_names(self):
        return (
            ["purity", "mean_x", "mean_y", "mean_z", "var_x", "var_y"]
            + [f"p{k}" for k in range(self.n_at + 1)]
        )


def _filter_record(rec: Dict[str, float], observables) -> Dict[str, float]:
    if observables is None:
        return rec
    return {k: v for k, v in rec.items() if k in observables}


# ---------------------------------------------------------------------------
# Plain RK4 loop


def _as_density(rho0: np.ndarray) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        return pure_to_density(rho0)
    return rho0.copy()


def evolve(
    rho0: np.ndarray,
    model: ModelOperators,
    cfg: EvolveConfig,
    observables: Optional[Iterable[str]] = None,
    form: str = "auto",
) -> Tuple[TimeSeries, np.ndarray]:
    """Integrate the master equation with fixed-step RK4.

    rho0 may be a state vector or a density matrix.  After every step
    the state is re-Hermitized ((rho + rho^dag)/2) and trace-
    renormalized.  Observables are recorded every `record_stride` steps
    (and at t = 0); positivity is checked at recorded steps and a
    violation below -1e-6 raises IntegrationInstabilityError.

    Returns (TimeSeries, final density matrix).
    """
    form = _resolve_form(model, form)
    terms = _dissipator_terms(model, form)
    h = model.hamiltonian
    rho = _as_density(rho0)
    if rho.shape != h.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape}, model {h.shape}")
    obs = _ObservableSet(model.n_at)
    if observables is not None:
        observables = set(observables)

    times = [0.0]
    records = [_filter_record(obs.record(rho), observables)]
    max_trace_dev = 0.0
    min_eig = float(np.linalg.eigvalsh(rho)[0])

    n_steps = int(round(cfg.t_max / cfg.dt))
    dt = cfg.dt
    for step in range(1, n_steps + 1):
        k1 = _rhs_from_terms(h, terms, rho)
        k2 = _rhs_from_terms(h, terms, rho + 0.5 * dt * k1)
        k3 = _rhs_from_terms(h, terms, rho + 0.5 * dt * k2)
        k4 = _rhs_from_terms(h, terms, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = np.trace(rho).real
        max_trace_dev = max(max_trace_dev, abs(tr - 1.0))
        rho = (rho + rho.conj().T) / 2.0
        rho /= tr
        if step % cfg.record_stride == 0 or step == n_steps:
            lam = float(np.linalg.eigvalsh(rho)[0])
            min_eig = min(min_eig, lam)
            if lam < -1e-6:
                raise IntegrationInstabilityError(
                    f"smallest eigenvalue {lam:.3e} at t = {step * dt:.4g}; "
                    "the integration is unstable, use a smaller dt"
                )
            times.append(step * dt)
            records.append(_filter_record(obs.record(rho), observables))

    series = TimeSeries(
        times=np.array(times),
        data={k: np.array([r[k] for r in records]) for k in records[0]},
        max_trace_dev=max_trace_dev,
        min_eigenvalue=min_eig,
    )
    return series, rho


# ---------------------------------------------------------------------------
# Vectorized fast path


class _VectorizedGenerator:
    """Generator in an orthonormal Hermitian-matrix basis (real coords).

    Basis: E_ii; (|i><j| + |j><i|)/sqrt2; i(|i><j| - |j><i|)/sqrt2 for
    i < j.  A Hermitian matrix maps to the real coordinate vector
    [diag, sqrt2*Re upper, sqrt2*Im upper]; Tr[A B] is the plain dot
    product there and Tr[rho^2] = |r|^2.
    """

    def __init__(self, model: ModelOperators, form: str):
        d = model.hamiltonian.shape[0]
        self.dim = d
        self.iu = np.triu_indices(d, 1)
        self.n_pairs = self.iu[0].size
        self._diag_vec = np.arange(d) * (d + 1)
        self._vij = self.iu[0] + self.iu[1] * d
        self._vji = self.iu[1] + self.iu[0] * d
        self.m = self._real_superop(_superoperator(model, form))
        # Excitation-number parity is flipped on bra and ket together by
        # every generator term, so coordinates mixing the two parity
        # sectors decouple; restricting to the invariant block when the
        # initial state allows it shrinks the matrices 2x-4x.
        par = excitation_counts(model.n_at) % 2
        pair_keep = par[self.iu[0]] == par[self.iu[1]]
        self.parity_mask = np.concatenate([np.ones(d, dtype=bool), pair_keep, pair_keep])

    def _real_superop(self, lv: np.ndarray) -> np.ndarray:
        n = lv.shape[0]
        d, npair = self.dim, self.n_pairs
        vd, vij, vji = self._diag_vec, self._vij, self._vji
        lt = np.empty((n, n), dtype=complex)
        lt[:, :d] = lv[:, vd]
        lt[:, d : d + npair] = (lv[:, vij] + lv[:, vji]) * (1.0 / _SQRT2)
        lt[:, d + npair :] = (lv[:, vij] - lv[:, vji]) * (1j / _SQRT2)
        del lv
        m = np.empty((n, n))
        m[:d, :] = lt[vd, :].real
        m[d : d + npair, :] = ((lt[vij, :] + lt[vji, :]) * (1.0 / _SQRT2)).real
        m[d + npair :, :] = ((lt[vji, :] - lt[vij, :]) * (1j / _SQRT2)).real
        return m

    def to_coords(self, a: np.ndarray) -> np.ndarray:
        d, npair = self.dim, self.n_pairs
        r = np.empty(d * d)
        r[:d] = a.diagonal().real
        r[d : d + npair] = _SQRT2 * a[self.iu].real
        r[d + npair :] = _SQRT2 * a[self.iu].imag
        return r

    def from_coords(self, r: np.ndarray) -> np.ndarray:
        d, npair = self.dim, self.n_pairs
        a = np.zeros((d, d), dtype=complex)
        a[np.arange(d), np.arange(d)] = r[:d]
        upper = (r[d : d + npair] + 1j * r[d + npair :]) / _SQRT2
        a[self.iu] = upper
        a[self.iu[1], self.iu[0]] = upper.conj()
        return a


def _rk4_step_matrix(m: np.ndarray, dt: float) -> np.ndarray:
    a = dt * m
    a2 = a @ a
    a3 = a2 @ a
    a4 = a2 @ a2
    return np.eye(m.shape[0]) + a + a2 / 2.0 + a3 / 6.0 + a4 / 24.0


def steady_state(
    rho0: np.ndarray,
    model: ModelOperators,
    cfg: EvolveConfig,
    form: str = "auto",
    record: bool = False,
    observables: Optional[Iterable[str]] = None,
) -> SteadyStateResult:
    """Integrate from rho0 until ||d rho/dt||_F <= convergence_tol or
    t_max is reached.

    Uses the vectorized RK4 propagator with repeated squaring, so the
    walk accelerates geometrically while staying on the exact fixed-step
    RK4 trajectory; the convergence time is resolved to ~t/4.  Returns a
    SteadyStateResult whose `converged` flag is False (with the final
    residual attached) when t_max is hit first; callers decide what a
    non-converged state means.  With record=True the visited points are
    returned as a TimeSeries.
    """
    form = _resolve_form(model, form)
    if model.n_at > _FAST_PATH_MAX_ATOMS:
        return _steady_state_loop(rho0, model, cfg, form, record, observables)
    gen = _VectorizedGenerator(model, form)
    obs = _ObservableSet(model.n_at)
    if observables is not None:
        observables = set(observables)

    r_full = gen.to_coords(_as_density(rho0))
    mask = gen.parity_mask
    restrict = bool(np.all(r_full[~mask] == 0.0))
    if restrict:
        m = gen.m[np.ix_(mask, mask)]
        r = r_full[mask]
    else:
        m = gen.m
        r = r_full

    def full_coords(rv):
        if not restrict:
            return rv
        out = np.zeros(gen.dim**2)
        out[mask] = rv
        return out

    # Diagonal coordinates always survive the parity restriction and
    # stay the leading block, so the trace is their plain sum either way.
    diag_slice = slice(0, gen.dim)

    times = [0.0]
    records = []
    max_trace_dev = 0.0
    min_eig = 0.0

    def record_point(rv):
        nonlocal min_eig
        rho = gen.from_coords(full_coords(rv))
        lam = float(np.linalg.eigvalsh(rho)[0])
        min_eig = min(min_eig, lam)
        if lam < -1e-6:
            raise IntegrationInstabilityError(
                f"smallest eigenvalue {lam:.3e}; integration unstable, "
                "use a smaller dt"
            )
        if record:
            records.append(_filter_record(obs.record(rho), observables))

    record_point(r)
    residual = float(np.linalg.norm(m @ r))
    if residual <= cfg.convergence_tol:
        return _steady_result(gen, full_coords(r), 0.0, residual, True,
                              times, records, max_trace_dev, min_eig, obs)

    p = _rk4_step_matrix(m, cfg.dt)
    tau = cfg.dt
    t = 0.0
    apps_per_stage = 8
    converged = False
    while t < cfg.t_max * (1.0 - 1e-12):
        for _ in range(apps_per_stage):
            r = p @ r
            t += tau
            tr = r[diag_slice].sum()
            max_trace_dev = max(max_trace_dev, abs(tr - 1.0))
            r /= tr
            times.append(t)
            record_point(r)
            residual = float(np.linalg.norm(m @ r))
            if residual <= cfg.convergence_tol:
                converged = True
                break
            if t >= cfg.t_max * (1.0 - 1e-12):
                break
        if converged or t >= cfg.t_max * (1.0 - 1e-12):
            break
        if 2.0 * tau <= max(cfg.dt, t / 4.0):
            p = p @ p
            tau *= 2.0

    return _steady_result(gen, full_coords(r), t, residual, converged,
                          times, records, max_trace_dev, min_eig, obs)


def _steady_result(gen, r_full, t, residual, converged, times, records,
                   max_trace_dev, min_eig, obs) -> SteadyStateResult:
    rho = gen.from_coords(r_full)
    rho /= np.trace(rho).real
    series = None
    if records:
        series = TimeSeries(
            times=np.array(times[: len(records)]),
            data={k: np.array([rec[k] for rec in records]) for k in records[0]},
            max_trace_dev=max_trace_dev,
            min_eigenvalue=min_eig,
        )
    return SteadyStateResult(
        state=rho,
        t_converge=t if converged else float("nan"),
        residual=residual,
        converged=converged,
        series=series,
    )


def _steady_state_loop(rho0, model, cfg, form, record, observables):
    """Fallback for registers too large for the dense superoperator."""
    terms = _dissipator_terms(model, form)
    h = model.hamiltonian
    rho = _as_density(rho0)
    obs = _ObservableSet(model.n_at)
    if observables is not None:
        observables = set(observables)
    times = [0.0]
    records = [_filter_record(obs.record(rho), observables)] if record else []
    max_trace_dev = 0.0
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    dt = cfg.dt
    n_steps = int(round(cfg.t_max / dt))
    t = 0.0
    residual = float(np.linalg.norm(_rhs_from_terms(h, terms, rho)))
    converged = residual <= cfg.convergence_tol
    step = 0
    while not converged and step < n_steps:
        step += 1
        k1 = _rhs_from_terms(h, terms, rho)
        k2 = _rhs_from_terms(h, terms, rho + 0.5 * dt * k1)
        k3 = _rhs_from_terms(h, terms, rho + 0.5 * dt * k2)
        k4 = _rhs_from_terms(h, terms, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = np.trace(rho).real
        max_trace_dev = max(max_trace_dev, abs(tr - 1.0))
        rho = (rho + rho.conj().T) / 2.0
        rho /= tr
        t = step * dt
        if step % cfg.record_stride == 0 or step == n_steps:
            lam = float(np.linalg.eigvalsh(rho)[0])
            min_eig = min(min_eig, lam)
            if lam < -1e-6:
                raise IntegrationInstabilityError(
                    f"smallest eigenvalue {lam:.3e} at t = {t:.4g}; "
                    "integration unstable, use a smaller dt"
                )
            if record:
                times.append(t)
                records.append(_filter_record(obs.record(rho), observables))
            residual = float(np.linalg.norm(_rhs_from_terms(h, terms, rho)))
            converged = residual <= cfg.convergence_tol
    series = None
    if record and records:
        series = TimeSeries(
            times=np.array(times),
            data={k: np.array([rec[k] for rec in records]) for k in records[0]},
            max_trace_dev=max_trace_dev,
            min_eigenvalue=min_eig,
        )
    return SteadyStateResult(
        state=rho,
        t_converge=t if converged else float("nan"),
        residual=residual,
        converged=converged,
        series=series,
    )
