"""Array geometry, squeezed-bath parameters, and the system operators.

The model is a chain of two-level atoms coupled to a 1D waveguide driven
from both ends by broadband squeezed light.  Positions are dimensionless
(k0 z); rates are in units of the single-atom waveguide decay rate gamma
and times in 1/gamma (hbar = 1 throughout).

The dissipative part of the master equation comes in two equivalent
forms: the eight signed travelling-wave channels

    (gamma/2) [ (N+1) L[J_s] + N L[J_s^dag]
                + |M|/2 L[J_{phi,s}] - |M|/2 L[J_{phi+pi,s}] ],  s = +/-

and, for a minimal-uncertainty bath, two squeezed standing-wave jumps
Jx, Jy with a common rate 4 gamma |mu nu|.  Both sets are built here;
`darkdimers.dynamics` turns them into generators.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .operators import SIGMA_MINUS, SIGMA_PLUS, embed_single_site

__all__ = [
    "BathParams",
    "ArrayGeometry",
    "ModelOperators",
    "TravellingChannel",
    "StandingOps",
    "make_bath",
    "make_geometry",
    "hamiltonian_scatt",
    "jump_travelling",
    "jump_quadrature",
    "standing_ops",
    "squeezed_jumps",
    "field_two_point",
    "build_model",
]

_MINIMAL_RTOL = 1e-9


@dataclass(frozen=True)
class BathParams:
    """Broadband squeezed reservoir: N_ph photons per mode, pair
    correlation |M_ph| e^{i phi}.

    The derived squeezing amplitudes mu, nu (with mu chosen real
    positive and nu = -M_ph / mu*) and the Lorentz parameter
    eta = ln(|mu|/|nu|)/2 exist only for minimal-uncertainty baths,
    |M|^2 = N(N+1); accessing them otherwise raises ValueError.
    """

    n_ph: float
    m_abs: float
    phi: float = 0.0

    @property
    def m_ph(self) -> complex:
        return self.m_abs * cmath.exp(1j * self.phi)

    @property
    def is_minimal(self) -> bool:
        bound = self.n_ph * (self.n_ph + 1.0)
        return abs(self.m_abs**2 - bound) <= _MINIMAL_RTOL * max(1.0, bound)

    @property
    def mu(self) -> complex:
        self._require_minimal()
        return complex(math.sqrt(self.n_ph + 1.0))

    @property
    def nu(self) -> complex:
        self._require_minimal()
        return -self.m_ph / self.mu.conjugate()

    @property
    def eta(self) -> float:
        self._require_minimal()
        if self.n_ph == 0.0:
            raise ValueError("eta is undefined for n_ph = 0 (nu = 0)")
        return 0.5 * math.log(abs(self.mu) / abs(self.nu))

    def _require_minimal(self):
        if not self.is_minimal:
            raise ValueError(
                "mu/nu/eta are defined only for minimal-uncertainty baths "
                f"(|M|^2 = N(N+1)); got |M|^2 = {self.m_abs**2:.6g}, "
                f"N(N+1) = {self.n_ph * (self.n_ph + 1):.6g}"
            )


def make_bath(
    n_ph: float,
    phi: float = 0.0,
    minimal: bool = True,
    m_abs: Optional[float] = None,
) -> BathParams:
    """Build bath parameters.

    minimal=True sets |M| to the uncertainty bound sqrt(N(N+1)); an
    explicit m_abs overrides (and must then satisfy
    0 <= m_abs <= sqrt(N(N+1))).  minimal=False without an override
    gives a plain thermal bath (|M| = 0).
    """
    if n_ph < 0:
        raise ValueError(f"n_ph must be >= 0, got {n_ph}")
    bound = math.sqrt(n_ph * (n_ph + 1.0))
    if m_abs is not None:
        if minimal:
            raise ValueError("pass either minimal=True or an explicit m_abs, not both")
        if not 0.0 <= m_abs <= bound * (1.0 + 1e-12) + 1e-15:
            raise ValueError(
                f"m_abs = {m_abs} violates the uncertainty bound "
                f"sqrt(N(N+1)) = {bound:.12g}"
            )
        return BathParams(n_ph=float(n_ph), m_abs=float(m_abs), phi=float(phi))
    return BathParams(
        n_ph=float(n_ph), m_abs=bound if minimal else 0.0, phi=float(phi)
    )


@dataclass(frozen=True)
class ArrayGeometry:
    """Equidistant chain, dimensionless positions k0 z_n symmetric about
    the center: k0z[n] = k0zc + (n - (n_at+1)/2) k0a for n = 1..n_at."""

    n_at: int
    k0a: float
    k0zc: float
    k0z: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.k0z.setflags(write=False)


def make_geometry(n_at: int, k0a: float, k0zc: float = 0.0) -> ArrayGeometry:
    if n_at < 1:
        raise ValueError(f"n_at must be >= 1, got {n_at}")
    n = np.arange(1, n_at + 1, dtype=float)
    k0z = k0zc + (n - (n_at + 1) / 2.0) * k0a
    return ArrayGeometry(n_at=int(n_at), k0a=float(k0a), k0zc=float(k0zc), k0z=k0z)


def _sigma_sites(geo: ArrayGeometry, op2: np.ndarray):
    return [embed_single_site(op2, n, geo.n_at) for n in range(1, geo.n_at + 1)]


def hamiltonian_scatt(geo: ArrayGeometry, gamma: float = 1.0) -> np.ndarray:
    """Waveguide-mediated hopping Hamiltonian.

    H = (gamma/2) sum_{n,m} sin(k0 |z_n - z_m|) sigma_+^(n) sigma_-^(m)
    with hbar = 1.  Diagonal terms vanish (sin 0 = 0) and the double sum
    makes H Hermitian by construction.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    d = 2**geo.n_at
    raise_ops = _sigma_sites(geo, SIGMA_PLUS)
    lower_ops = _sigma_sites(geo, SIGMA_MINUS)
    h = np.zeros((d, d), dtype=complex)
    for n in range(geo.n_at):
        for m in range(geo.n_at):
            if n == m:
                continue
            coupling = 0.5 * gamma * math.sin(abs(geo.k0z[n] - geo.k0z[m]))
            if coupling != 0.0:
                h += coupling * (raise_ops[n] @ lower_ops[m])
    return h


def jump_travelling(geo: ArrayGeometry, s: int) -> np.ndarray:
    """Collective jump operator of the s = +/-1 propagating channel:
    J_s = sum_n e^{-i s k0 z_n} sigma_-^(n)."""
    if s not in (+1, -1):
        raise ValueError(f"direction s must be +1 or -1, got {s}")
    d = 2**geo.n_at
    j = np.zeros((d, d), dtype=complex)
    for n, op in enumerate(_sigma_sites(geo, SIGMA_MINUS)):
        j += cmath.exp(-1j * s * geo.k0z[n]) * op
    return j


def jump_quadrature(geo: ArrayGeometry, s: int, theta: float) -> np.ndarray:
    """Two-photon (phase) jump operator
    J_{theta,s} = e^{i theta/2} J_s + e^{-i theta/2} J_s^dag.
    Hermitian for real theta."""
    j = jump_travelling(geo, s)
    return cmath.exp(1j * theta / 2) * j + cmath.exp(-1j * theta / 2) * j.conj().T


class StandingOps(NamedTuple):
    s_plus_r: np.ndarray
    s_minus_r: np.ndarray
    s_plus_i: np.ndarray
    s_minus_i: np.ndarray


def standing_ops(geo: ArrayGeometry) -> StandingOps:
    """Standing-wave collective operators
    S_pm^(R) = sum_n cos(k0 z_n) sigma_pm^(n),
    S_pm^(I) = sum_n sin(k0 z_n) sigma_pm^(n)."""
    d = 2**geo.n_at
    sp_r = np.zeros((d, d), dtype=complex)
    sp_i = np.zeros((d, d), dtype=complex)
    for n, op in enumerate(_sigma_sites(geo, SIGMA_PLUS)):
        sp_r += math.cos(geo.k0z[n]) * op
        sp_i += math.sin(geo.k0z[n]) * op
    return StandingOps(sp_r, sp_r.conj().T, sp_i, sp_i.conj().T)


def squeezed_jumps(geo: ArrayGeometry, bath: BathParams) -> Tuple[np.ndarray, np.ndarray]:
    """Squeezed standing-wave jump operators for a minimal bath:

    Jx = (mu S_-^(I) + nu S_+^(I)) / |4 mu nu|^(1/2)
    Jy = (mu S_-^(R) - nu S_+^(R)) / |4 mu nu|^(1/2)

    Raises for a non-minimal bath (mu, nu undefined) and for n_ph = 0,
    where the normalization |4 mu nu| vanishes and the travelling-wave
    form of the master equation must be used instead.
    """
    mu, nu = bath.mu, bath.nu
    if bath.n_ph == 0.0:
        raise ValueError(
            "squeezed jump operators are undefined at n_ph = 0 "
            "(|4 mu nu| = 0); use the travelling-wave channels"
        )
    ops = standing_ops(geo)
    norm = math.sqrt(abs(4 * mu * nu))
    jx = (mu * ops.s_minus_i + nu * ops.s_plus_i) / norm
    jy = (mu * ops.s_minus_r - nu * ops.s_plus_r) / norm
    return jx, jy


def field_two_point(k0z_n: float, k0z_m: float, theta: float, bath: BathParams) -> float:
    """Equal-time two-point correlation of the field quadrature A_theta
    between positions k0 z_n and k0 z_m:

    <A A> = |M| cos(theta - phi) cos(k0 (z_n + z_m)) / 2 + (N_ph + 1/2) / 2
    """
    return 0.5 * bath.m_abs * math.cos(theta - bath.phi) * math.cos(
        k0z_n + k0z_m
    ) + 0.5 * (bath.n_ph + 0.5)


class TravellingChannel(NamedTuple):
    """One signed Lindblad channel of the travelling-wave unraveling."""

    label: str
    operator: np.ndarray
    coefficient: float


@dataclass(frozen=True)
class ModelOperators:
    """Hamiltonian plus both dissipator sets for one (geometry, bath).

    travelling_jumps carries the eight signed channels of the
    travelling-wave form (coefficient may be negative, so this set is a
    valid generator but not a jump unraveling).  squeezed_jumps is the
    two-operator minimal-uncertainty form with common rate
    4 gamma |mu nu|, or None when that form does not exist.
    """

    hamiltonian: np.ndarray
    travelling_jumps: Tuple[TravellingChannel, ...]
    squeezed_jumps: Optional[Tuple[np.ndarray, np.ndarray]]
    squeezed_rate: Optional[float]
    gamma: float
    n_at: int


def build_model(geo: ArrayGeometry, bath: BathParams, gamma: float = 1.0) -> ModelOperators:
    """Assemble all operators of the master equation for one setup."""
    h = hamiltonian_scatt(geo, gamma)
    channels = []
    for s in (+1, -1):
        tag = "+" if s > 0 else "-"
        j = jump_travelling(geo, s)
        channels.append(
            TravellingChannel(f"J{tag}", j, 0.5 * gamma * (bath.n_ph + 1.0))
        )
        channels.append(
            TravellingChannel(f"J{tag}_dag", j.conj().T, 0.5 * gamma * bath.n_ph)
        )
        channels.append(
            TravellingChannel(
                f"Jphi{tag}",
                jump_quadrature(geo, s, bath.phi),
                0.25 * gamma * bath.m_abs,
            )
        )
        channels.append(
            TravellingChannel(
                f"Jphi+pi{tag}",
                jump_quadrature(geo, s, bath.phi + math.pi),
                -0.25 * gamma * bath.m_abs,
            )
        )
    sq = None
    sq_rate = None
    if bath.is_minimal and bath.n_ph > 0.0:
        sq = squeezed_jumps(geo, bath)
        sq_rate = 4.0 * gamma * abs(bath.mu * bath.nu)
    return ModelOperators(
        hamiltonian=h,
        travelling_jumps=tuple(channels),
        squeezed_jumps=sq,
        squeezed_rate=sq_rate,
        gamma=float(gamma),
        n_at=geo.n_at,
    )
