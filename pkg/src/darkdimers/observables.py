"""Measured quantities: polarizations, purity, correlations, populations,
the dark-state condition, and fidelities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ArrayGeometry, BathParams, squeezed_jumps
from .operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    embed_single_site,
    excitation_counts,
    expectation,
)

__all__ = [
    "PolarizationMoments",
    "polarization_moments",
    "purity",
    "pair_correlations",
    "excitation_populations",
    "dark_condition",
    "fidelity",
]


@dataclass(frozen=True)
class PolarizationMoments:
    """Means and variances of the collective polarizations
    S_j = (1/2) sum_n sigma_j^(n).  var_j = <S_j^2> - <S_j>^2 (the
    variance, not the standard deviation)."""

    mean_x: float
    mean_y: float
    mean_z: float
    var_x: float
    var_y: float
    var_z: float


def _collective(n_at: int, sigma: np.ndarray) -> np.ndarray:
    d = 2**n_at
    s = np.zeros((d, d), dtype=complex)
    for n in range(1, n_at + 1):
        s += 0.5 * embed_single_site(sigma, n, n_at)
    return s


def polarization_moments(state: np.ndarray, n_at: int) -> PolarizationMoments:
    """Collective polarization means and variances of a state (vector or
    density matrix) of n_at atoms."""
    means = {}
    variances = {}
    for label, sigma in (("x", SIGMA_X), ("y", SIGMA_Y), ("z", SIGMA_Z)):
        s = _collective(n_at, sigma)
        mean = expectation(state, s).real
        second = expectation(state, s @ s).real
        means[label] = mean
        variances[label] = second - mean**2
    return PolarizationMoments(
        mean_x=means["x"],
        mean_y=means["y"],
        mean_z=means["z"],
        var_x=variances["x"],
        var_y=variances["y"],
        var_z=variances["z"],
    )


def purity(rho: np.ndarray) -> float:
    """Tr[rho^2]; accepts a state vector (purity 1 by construction)."""
    rho = np.asarray(rho)
    if rho.ndim == 1:
        n = float(np.vdot(rho, rho).real)
        return n * n
    return float(np.trace(rho @ rho).real)


def pair_correlations(state: np.ndarray, n_at: int) -> np.ndarray:
    """Correlation matrix C[n, m] = <sigma_x^(n) sigma_x^(m)> / 4
    (0-indexed atoms).  Diagonal entries are exactly 1/4."""
    sx = [embed_single_site(SIGMA_X, n, n_at) for n in range(1, n_at + 1)]
    c = np.empty((n_at, n_at))
    for n in range(n_at):
        c[n, n] = 0.25
        for m in range(n + 1, n_at):
            val = 0.25 * expectation(state, sx[n] @ sx[m]).real
            c[n, m] = val
            c[m, n] = val
    return c


def excitation_populations(state: np.ndarray) -> np.ndarray:
    """Probability of finding exactly n_e excited atoms, n_e = 0..n_at."""
    state = np.asarray(state)
    if state.ndim == 1:
        diag = np.abs(state) ** 2
    else:
        diag = state.diagonal().real
    n_at = int(round(np.log2(diag.size)))
    counts = excitation_counts(n_at)
    return np.array([diag[counts == k].sum() for k in range(n_at + 1)])


def dark_condition(geo: ArrayGeometry, bath: BathParams) -> float:
    """Smallest eigenvalue of Jx^dag Jx + Jy^dag Jy.

    Zero (<= 1e-10 numerically) if and only if a state annihilated by
    both squeezed jump operators exists.  Preferred over the determinant
    of the same matrix for conditioning."""
    jx, jy = squeezed_jumps(geo, bath)
    k = jx.conj().T @ jx + jy.conj().T @ jy
    return float(np.linalg.eigvalsh(k)[0])


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """State overlap: |<a|b>|^2 for two pure states, <psi|rho|psi> when
    one argument is pure.  Two mixed states are rejected (no Uhlmann
    form here); extract a pure reference first."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim == 1 and b.ndim == 1:
        if a.size != b.size:
            raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
        return float(abs(np.vdot(a, b)) ** 2)
    if a.ndim == 1:
        psi, rho = a, b
    elif b.ndim == 1:
        psi, rho = b, a
    else:
        raise ValueError("fidelity of two mixed states is not supported; "
                         "one argument must be a pure state")
    if rho.shape != (psi.size, psi.size):
        raise ValueError(f"dimension mismatch: state {psi.size}, rho {rho.shape}")
    return float(np.vdot(psi, rho @ psi).real)
