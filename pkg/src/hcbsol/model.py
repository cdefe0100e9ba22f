"""Lattice model: parameters, canonical state, equations of motion, observables.

The degrees of freedom are one canonical pair per site: the phase phi_j and
delta_j = cos(theta_j) = 1 - 2 rho_j, where rho_j is the particle density.
The superfluid (condensate) density is rho_s = rho (1 - rho), so the order
parameter sqrt(rho_s) e^{i phi} vanishes both at empty (rho = 0) and at
fully occupied (rho = 1) sites.

Equations of motion (time in units of 1/t):

    d(delta_j)/dt = (t/2) sum_a sqrt((1-delta_j^2)(1-delta_{j+a}^2))
                    * sin(phi_{j+a} - phi_j)
    d(phi_j)/dt   = (t/2) delta_j/sqrt(1-delta_j^2)
                    * sum_a sqrt(1-delta_{j+a}^2) cos(phi_{j+a} - phi_j)
                    - (V/2) sum_a delta_{j+a}  -  mu_eff/2

with a = +-1 the nearest neighbors (wrapped when periodic, one-sided at open
ends).  The singular prefactor delta/sqrt(1-delta^2) is set to zero where
1 - delta^2 < EPS_REG: at such sites the condensate density vanishes and the
local phase carries no physical content, so freezing it keeps the flow finite
without moving any density.  A site at |delta| = 1 exactly is dynamically
dead (all its couplings carry the factor sqrt(1-delta^2) = 0), which realizes
the hard-core constraint saturating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, ParamDomain

# Regularization floor for 1 - delta^2 in the singular phase prefactor.
EPS_REG = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Lattice size and couplings defining the dynamical system.

    t is the hopping amplitude, V the nearest-neighbor coupling (same units),
    g = t - V is derived where needed and never stored.  mu_eff is a uniform
    chemical-potential offset entering phi-dot as -mu_eff/2; it is a global
    gauge rotation and cannot affect densities or phase differences.
    """

    L: int
    t: float = 1.0
    V: float = 0.9
    boundary: str = "periodic"
    mu_eff: float = 0.0

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or self.L < 8:
            raise ParamDomain(f"L must be an integer >= 8, got {self.L!r}")
        if not self.t > 0:
            raise ParamDomain(f"t must be positive, got {self.t}")
        if not (0 < self.V < self.t):
            raise ParamDomain(f"V must lie in (0, t={self.t}), got {self.V}")
        if self.boundary not in ("periodic", "open"):
            raise ParamDomain(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"


@dataclass
class LatticeState:
    """Per-site canonical pair (delta_j, phi_j) plus the simulation time.

    delta = 1 - 2 rho in [-1, 1]; phi is stored unwrapped (the dynamics only
    ever uses phase differences, so an integer number of 2 pi across the
    periodic seam is invisible).
    """

    delta: np.ndarray
    phi: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.delta.ndim != 1 or self.delta.shape != self.phi.shape:
            raise InvalidState("delta and phi must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.delta)) or not np.all(np.isfinite(self.phi)):
            raise InvalidState("state contains non-finite entries")
        if np.any(np.abs(self.delta) > 1.0):
            raise InvalidState("|delta| exceeds 1 (hard-core bound)")

    @property
    def L(self) -> int:
        return self.delta.shape[0]

    def copy(self) -> "LatticeState":
        return LatticeState(self.delta.copy(), self.phi.copy(), self.time)


@dataclass(frozen=True)
class Observables:
    """Diagnostic bundle evaluated on one state."""

    particle_number: float
    energy: float
    max_density_rate: float
    phase_dispersion: float
    node_sites: int = 0  # sites where the regularization floor engaged


def density_from_state(state: LatticeState):
    """Per-site particle density rho and superfluid density rho_s."""
    rho = 0.5 * (1.0 - state.delta)
    rho_s = rho * (1.0 - rho)
    return rho, rho_s


def _neighbor_arrays(arr: np.ndarray, periodic: bool):
    """(left, right) neighbor values; zero beyond open ends."""
    if periodic:
        return np.roll(arr, 1), np.roll(arr, -1)
    left = np.empty_like(arr)
    right = np.empty_like(arr)
    left[1:] = arr[:-1]
    left[0] = 0.0
    right[:-1] = arr[1:]
    right[-1] = 0.0
    return left, right


def eom_rhs(state: LatticeState, params: ModelParams):
    """Right-hand side (d delta/dt, d phi/dt) of the canonical equations."""
    delta, phi = state.delta, state.phi
    th, V = params.t, params.V
    s2 = 1.0 - delta * delta
    S = np.sqrt(np.maximum(s2, 0.0))
    factor = np.where(s2 >= EPS_REG, delta / np.sqrt(np.maximum(s2, EPS_REG)), 0.0)

    Sm, Sp = _neighbor_arrays(S, params.periodic)
    dm, dp = _neighbor_arrays(delta, params.periodic)
    if params.periodic:
        pp = np.roll(phi, -1) - phi
        pm = np.roll(phi, 1) - phi
    else:
        pp = np.empty_like(phi)
        pm = np.empty_like(phi)
        pp[:-1] = phi[1:] - phi[:-1]
        pp[-1] = 0.0
        pm[1:] = phi[:-1] - phi[1:]
        pm[0] = 0.0

    ddelta = 0.5 * th * S * (Sp * np.sin(pp) + Sm * np.sin(pm))
    dphi = (0.5 * th * factor * (Sp * np.cos(pp) + Sm * np.cos(pm))
            - 0.5 * V * (dp + dm) - 0.5 * params.mu_eff)
    return ddelta, dphi


def node_engaged_count(state: LatticeState) -> int:
    """Number of sites where the node-regularization floor is active."""
    return int(np.count_nonzero(1.0 - state.delta**2 < EPS_REG))


def energy(state: LatticeState, params: ModelParams) -> float:
    """Classical energy functional; each bond counted once.

    E = -sum_bonds (1/4) [ t sqrt((1-d_j^2)(1-d_{j+1}^2)) cos(phi_{j+1}-phi_j)
                           + V d_j d_{j+1} ]  -  (g/2) sum_j d_j,   g = t - V.

    The canonical flow of this functional reproduces eom_rhs with the pairing
    d(delta)/dt = -2 dE/dphi and d(phi)/dt = +2 dE/ddelta + g (the uniform g
    offset is the gauge freedom absorbed by mu_eff).
    """
    delta, phi = state.delta, state.phi
    S = np.sqrt(np.maximum(1.0 - delta * delta, 0.0))
    g = params.t - params.V
    if params.periodic:
        Sn = np.roll(S, -1)
        dn = np.roll(delta, -1)
        dphase = np.roll(phi, -1) - phi
        bond = params.t * S * Sn * np.cos(dphase) + params.V * delta * dn
        return float(-0.25 * np.sum(bond) - 0.5 * g * np.sum(delta))
    bond = (params.t * S[:-1] * S[1:] * np.cos(phi[1:] - phi[:-1])
            + params.V * delta[:-1] * delta[1:])
    return float(-0.25 * np.sum(bond) - 0.5 * g * np.sum(delta))


def particle_number(state: LatticeState) -> float:
    return float(np.sum(0.5 * (1.0 - state.delta)))


def phase_dispersion(state: LatticeState) -> float:
    """Circular standard deviation of the site phases."""
    z = np.exp(1j * state.phi)
    rbar = abs(np.mean(z))
    if rbar <= 0.0:
        return float("inf")
    rbar = min(rbar, 1.0)
    return float(np.sqrt(max(-2.0 * np.log(rbar), 0.0)))


def observables(state: LatticeState, params: ModelParams) -> Observables:
    ddelta, _ = eom_rhs(state, params)
    return Observables(
        particle_number=particle_number(state),
        energy=energy(state, params),
        max_density_rate=float(np.max(np.abs(ddelta)) / 2.0),
        phase_dispersion=phase_dispersion(state),
        node_sites=node_engaged_count(state),
    )


def uniform_state(L: int, rho0: float, phi0: float = 0.0) -> LatticeState:
    """Uniform-density state at filling rho0 with constant phase."""
    if not (0.0 <= rho0 <= 1.0):
        raise ParamDomain(f"rho0 must lie in [0, 1], got {rho0}")
    return LatticeState(np.full(L, 1.0 - 2.0 * rho0), np.full(L, float(phi0)))
