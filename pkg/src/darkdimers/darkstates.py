"""Analytic dark states and closed-form population predictions.

These constructors are the oracles for the dynamics: every state built
here at its validity geometry is annihilated by both squeezed jump
operators, which is also the operational check that pins down all phase
conventions.

Two-atom building blocks (atoms n < m, phases from the positions):

    sym       (|g_n e_m> - e^{i k0 (z_m - z_n)} |e_n g_m>) / sqrt(2)
    squeezed  (mu |g_n g_m> + e^{i k0 (z_n + z_m)} nu |e_n e_m>)
              / sqrt(|mu|^2 + |nu|^2)

A sym pair exists where sin k0(z_n - z_m) = 0, a squeezed pair where
cos k0(z_n + z_m) = +/-1.  Chains of nearest-neighbor squeezed pairs are
the only products the hopping Hamiltonian leaves invariant; when
sin k0 a = 0 the pairing ambiguity instead produces symmetrized sums
over all perfect matchings ("melted" states).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import ArrayGeometry, BathParams, ModelOperators
from .operators import dicke_state

__all__ = [
    "PairSpec",
    "pair_state",
    "dimer_chain",
    "stability_residual",
    "melted_dark",
    "collective_amplitudes",
    "collective_dark_state",
    "predicted_populations",
    "stable_dark_geometry",
    "sph_harm_equator",
]

_GEOM_TOL = 1e-9
_MAX_MATCHING_ATOMS = 8  # 105 perfect matchings; larger arrays use dimer_chain


@dataclass(frozen=True)
class PairSpec:
    """One two-atom dark pair: atoms n < m (1-based), kind 'sym' or
    'squeezed'."""

    n: int
    m: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("sym", "squeezed"):
            raise ValueError(f"kind must be 'sym' or 'squeezed', got {self.kind!r}")
        if not self.n < self.m:
            raise ValueError(f"require n < m, got ({self.n}, {self.m})")


def _pair_components(geo: ArrayGeometry, bath: BathParams, spec: PairSpec):
    """[(excite_n, excite_m, amplitude), ...] for one pair."""
    zn = geo.k0z[spec.n - 1]
    zm = geo.k0z[spec.m - 1]
    if spec.kind == "squeezed":
        if abs(abs(math.cos(zn + zm)) - 1.0) > _GEOM_TOL:
            raise ValueError(
                f"squeezed pair ({spec.n},{spec.m}) needs |cos k0(z_n+z_m)| = 1; "
                f"got cos = {math.cos(zn + zm):.6g}"
            )
        mu, nu = bath.mu, bath.nu
        norm = math.sqrt(abs(mu) ** 2 + abs(nu) ** 2)
        phase = cmath.exp(1j * (zn + zm))
        return [(0, 0, mu / norm), (1, 1, phase * nu / norm)]
    if abs(math.sin(zn - zm)) > _GEOM_TOL:
        raise ValueError(
            f"sym pair ({spec.n},{spec.m}) needs sin k0(z_n-z_m) = 0; "
            f"got sin = {math.sin(zn - zm):.6g}"
        )
    phase = cmath.exp(1j * (zm - zn))
    return [(0, 1, 1.0 / math.sqrt(2.0)), (1, 0, -phase / math.sqrt(2.0))]


def _scatter_pairs(n_at: int, pair_components) -> np.ndarray:
    """Add the product of per-pair components into a full-register
    vector (all unpaired atoms in |g>)."""
    psi = np.zeros(2**n_at, dtype=complex)
    for combo in itertools.product(*pair_components):
        idx = 0
        amp = 1.0 + 0.0j
        for (n, m, _), (en, em, a) in combo:
            if en:
                idx |= 1 << (n_at - n)
            if em:
                idx |= 1 << (n_at - m)
            amp *= a
        psi[idx] += amp
    return psi


def _tagged_components(geo, bath, spec):
    return [((spec.n, spec.m, spec.kind), comp) for comp in _pair_components(geo, bath, spec)]


def pair_state(geo: ArrayGeometry, bath: BathParams, spec: PairSpec) -> np.ndarray:
    """Two-atom dark state embedded in the full register (other atoms in
    |g>)."""
    psi = _scatter_pairs(geo.n_at, [_tagged_components(geo, bath, spec)])
    return psi / np.linalg.norm(psi)


def dimer_chain(geo: ArrayGeometry, bath: BathParams) -> np.ndarray:
    """Product of squeezed nearest-neighbor pairs (1,2)(3,4)..., the
    unique Hamiltonian-stable dark state when sin k0 a != 0.

    Requires an even atom number and cos k0(z_{2n-1} + z_{2n}) = +/-1
    for every pair.
    """
    if geo.n_at % 2:
        raise ValueError(f"dimer chain needs an even atom number, got {geo.n_at}")
    pairs = [
        _tagged_components(geo, bath, PairSpec(2 * k + 1, 2 * k + 2, "squeezed"))
        for k in range(geo.n_at // 2)
    ]
    psi = _scatter_pairs(geo.n_at, pairs)
    return psi / np.linalg.norm(psi)


def stability_residual(state: np.ndarray, model: ModelOperators) -> float:
    """|| H psi - <psi|H|psi> psi ||: zero iff the Hamiltonian cannot
    drive the state out of its ray."""
    psi = np.asarray(state, dtype=complex)
    hpsi = model.hamiltonian @ psi
    mean = np.vdot(psi, hpsi)
    return float(np.linalg.norm(hpsi - mean * psi))


def _perfect_matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items)):
        pair = (first, items[k])
        rest = items[1:k] + items[k + 1 :]
        for sub in _perfect_matchings(rest):
            yield [pair] + sub


def melted_dark(geo: ArrayGeometry, bath: BathParams, l: int) -> np.ndarray:
    """Symmetrized dark state of the sin k0 a = 0 ("melted") regime.

    Sums the tensor product over every perfect matching of the atoms and
    every assignment of l squeezed pairs (the rest sym), then
    normalizes.  l = n_at/2 is the all-squeezed sector reached from the
    ground state.
    """
    if abs(math.sin(geo.k0a)) > _GEOM_TOL:
        raise ValueError(
            f"melted states need sin k0 a = 0; got sin = {math.sin(geo.k0a):.6g}"
        )
    if geo.n_at % 2:
        raise ValueError(f"melted states need an even atom number, got {geo.n_at}")
    if geo.n_at > _MAX_MATCHING_ATOMS:
        raise ValueError(
            f"matching enumeration capped at {_MAX_MATCHING_ATOMS} atoms"
        )
    n_pairs = geo.n_at // 2
    if not 0 <= l <= n_pairs:
        raise ValueError(f"l must be in 0..{n_pairs}, got {l}")
    psi = np.zeros(2**geo.n_at, dtype=complex)
    for matching in _perfect_matchings(list(range(1, geo.n_at + 1))):
        for squeezed_idx in itertools.combinations(range(n_pairs), l):
            comps = [
                _tagged_components(
                    geo,
                    bath,
                    PairSpec(n, m, "squeezed" if k in squeezed_idx else "sym"),
                )
                for k, (n, m) in enumerate(matching)
            ]
            psi += _scatter_pairs(geo.n_at, comps)
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise ValueError(f"matching sum vanished for l = {l}")
    return psi / norm


def collective_amplitudes(n_at: int, n_e: int) -> float:
    """Statistical weight of the n_e-excitation sector in the
    all-squeezed (l = n_at/2) melted state:

        c = sqrt(n_g! n_e!) / (2^(n_at/2) (n_g/2)! (n_e/2)!)

    with n_g = n_at - n_e; zero for odd n_e.
    """
    if n_at % 2:
        raise ValueError(f"even atom number required, got {n_at}")
    if not 0 <= n_e <= n_at:
        raise ValueError(f"n_e must be in 0..{n_at}, got {n_e}")
    if n_e % 2:
        return 0.0
    n_g = n_at - n_e
    return math.sqrt(math.factorial(n_g) * math.factorial(n_e)) / (
        2 ** (n_at // 2) * math.factorial(n_g // 2) * math.factorial(n_e // 2)
    )


def sph_harm_equator(l: int, m: int) -> float:
    """Y_{l,m}(pi/2, 0), real, via the associated Legendre recurrence at
    argument 0 (Condon-Shortley phase).  Zero for odd l+m."""
    mm = abs(m)
    if mm > l:
        raise ValueError(f"|m| = {mm} exceeds l = {l}")
    if (l + mm) % 2:
        return 0.0
    # P_mm(0) = (-1)^mm (2mm-1)!!, then (l-mm) P_l = -(l+mm-1) P_{l-2}.
    p = 1.0
    for k in range(1, mm + 1):
        p *= -(2 * k - 1)
    for ll in range(mm + 2, l + 1, 2):
        p *= -(ll + mm - 1) / (ll - mm)
    y = math.sqrt(
        (2 * l + 1) / (4 * math.pi) * math.factorial(l - mm) / math.factorial(l + mm)
    ) * p
    if m < 0 and mm % 2:
        y = -y
    return y


def collective_dark_state(geo: ArrayGeometry, bath: BathParams, l: int) -> np.ndarray:
    """Closed-form dark state in the symmetric (Dicke) sector,

        sum_m e^{-eta m} s_m Y_{l,m}(pi/2, 0) |l, m>,

    valid for k0 a = 0 (mod 2pi) and k0 z_c in {0, pi/2} (mod pi), with
    l = n_at/2 and |l, m> the Dicke state with l + m excitations.  The
    sign gauge s_m is (-1)^((l+m)/2) when e^{2 i k0 zc} = -1 (centers at
    pi/2) and 1 otherwise; both choices are verified against the
    matching-sum constructor and the jump-annihilation oracle.
    """
    two_pi = 2.0 * math.pi
    if abs(math.sin(geo.k0a / 2.0)) > _GEOM_TOL:
        raise ValueError(
            f"collective form needs k0 a = 0 (mod 2pi); got k0 a = {geo.k0a:.6g}"
        )
    if abs(math.sin(2.0 * geo.k0zc)) > _GEOM_TOL:
        raise ValueError(
            "collective form needs k0 zc in {0, pi/2} (mod pi); "
            f"got k0 zc = {geo.k0zc:.6g}"
        )
    if geo.n_at % 2 or l != geo.n_at // 2:
        raise ValueError(
            f"collective form is the l = n_at/2 sector; got l = {l}, "
            f"n_at = {geo.n_at} (lower sectors come from melted_dark)"
        )
    eta = bath.eta
    signed = math.cos(2.0 * geo.k0zc) < 0.0
    psi = np.zeros(2**geo.n_at, dtype=complex)
    for m in range(-l, l + 1):
        y = sph_harm_equator(l, m)
        if y == 0.0:
            continue
        amp = math.exp(-eta * m) * y
        if signed:
            amp *= (-1.0) ** ((l + m) // 2)
        psi += amp * dicke_state(geo.n_at, l + m)
    return psi / np.linalg.norm(psi)


def predicted_populations(kind: str, n_at: int, bath: BathParams) -> np.ndarray:
    """Closed-form steady-state excitation distributions P(n_e),
    n_e = 0..n_at, with x = N_ph/(N_ph+1).

    thermal   x^{n_e}, normalized over n_e = 0..n_at
    squeezed  |Y_{l,m}(pi/2,0)|^2 x^{m/2}, l = n_at/2, m = n_e - l
    dimer     C(n_at/2, k) ((N+1)/(2N+1))^{n_at/2} x^k for n_e = 2k,
              zero for odd n_e (the binomial counts excited pairs)
    """
    if kind not in ("thermal", "squeezed", "dimer"):
        raise ValueError(f"unknown population law {kind!r}")
    x = bath.n_ph / (bath.n_ph + 1.0)
    if kind == "thermal":
        p = x ** np.arange(n_at + 1, dtype=float)
        return p / p.sum()
    if n_at % 2:
        raise ValueError(f"{kind} law needs an even atom number, got {n_at}")
    if kind == "squeezed":
        if bath.n_ph == 0.0:
            raise ValueError("squeezed law undefined at n_ph = 0")
        l = n_at // 2
        p = np.array(
            [
                sph_harm_equator(l, ne - l) ** 2 * x ** ((ne - l) / 2.0)
                for ne in range(n_at + 1)
            ]
        )
        return p / p.sum()
    pairs = n_at // 2
    prefactor = ((bath.n_ph + 1.0) / (2.0 * bath.n_ph + 1.0)) ** pairs
    p = np.zeros(n_at + 1)
    for k in range(pairs + 1):
        p[2 * k] = math.comb(pairs, k) * prefactor * x**k
    return p


def stable_dark_geometry(n_at: int, k0a: float, k0zc: float, tol: float = 1e-9) -> bool:
    """Whether a stable dark state exists: even atom number and every
    nearest-neighbor pair (1,2)(3,4)... centered where the field
    quadrature correlations are extremal, cos k0(z_{2n-1}+z_{2n}) = +/-1.

    Covers both regimes: for sin k0 a = 0 any pairing is equivalent to
    the nearest-neighbor one; otherwise the nearest-neighbor chain is
    the only Hamiltonian-stable product.
    """
    if n_at % 2:
        return False
    n = np.arange(1, n_at + 1, dtype=float)
    k0z = k0zc + (n - (n_at + 1) / 2.0) * k0a
    sums = k0z[0::2] + k0z[1::2]
    return bool(np.all(np.abs(np.sin(sums)) <= tol))
