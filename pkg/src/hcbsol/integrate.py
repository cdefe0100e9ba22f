"""Fixed-step 4th-order integration of the lattice equations of motion.

A fused RK4 kernel (numba, when available) advances the state between
recorded frames; the pure-numpy path performs the identical arithmetic in
the identical order, so both backends produce bit-equal trajectories.
Conservation of particle number and energy is monitored at every recorded
frame and a breach aborts the run: all collision/breather phenomenology
presumes conservative dynamics, so silent drift would invalidate any
classification downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConservationBreach, NonFinite, ParamDomain
from .model import (EPS_REG, LatticeState, ModelParams, Observables, energy,
                    observables, particle_number)

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


@dataclass(frozen=True)
class ConservationTolerances:
    number: float = 1e-10     # absolute particle-number drift
    energy: float = 1e-7      # relative energy drift


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float
    dt: float = 0.005
    frame_stride: int = 50
    tolerances: ConservationTolerances = field(default_factory=ConservationTolerances)
    check_conservation: bool = True

    def __post_init__(self):
        if not (0.0 < self.dt <= 0.05):
            raise ParamDomain(f"dt must lie in (0, 0.05], got {self.dt}")
        if self.frame_stride < 1:
            raise ParamDomain("frame_stride must be >= 1")
        if not np.isfinite(self.t_end):
            raise ParamDomain("t_end must be finite")


@dataclass
class Trajectory:
    """Uniformly spaced snapshots of one evolution run."""

    params: ModelParams
    times: np.ndarray          # (F,)
    deltas: np.ndarray         # (F, L)
    phis: np.ndarray           # (F, L)
    diagnostics: list          # per-frame Observables
    dt: float

    @property
    def n_frames(self) -> int:
        return len(self.times)

    def frame_state(self, i: int) -> LatticeState:
        return LatticeState(self.deltas[i].copy(), self.phis[i].copy(),
                            float(self.times[i]))

    def densities(self) -> np.ndarray:
        return 0.5 * (1.0 - self.deltas)

    def max_density_rates(self) -> np.ndarray:
        return np.array([o.max_density_rate for o in self.diagnostics])


@njit(cache=True)
def _rk4_kernel(delta, phi, dt, nsteps, th, V, mu, eps_reg, periodic):
    L = delta.shape[0]
    kd = np.empty((4, L))
    kp = np.empty((4, L))
    dd = np.empty(L)
    pp = np.empty(L)
    half_th = 0.5 * th
    half_V = 0.5 * V
    half_mu = 0.5 * mu
    sixth = dt / 6.0
    for _ in range(nsteps):
        for stage in range(4):
            if stage == 0:
                for j in range(L):
                    dd[j] = delta[j]
                    pp[j] = phi[j]
            else:
                w = 0.5 * dt if stage < 3 else dt
                for j in range(L):
                    dd[j] = delta[j] + w * kd[stage - 1, j]
                    pp[j] = phi[j] + w * kp[stage - 1, j]
            for j in range(L):
                s2 = 1.0 - dd[j] * dd[j]
                S = np.sqrt(s2 if s2 > 0.0 else 0.0)
                if s2 >= eps_reg:
                    factor = dd[j] / np.sqrt(s2)
                else:
                    factor = 0.0
                if j + 1 < L:
                    jp = j + 1
                    s2p = 1.0 - dd[jp] * dd[jp]
                    Sp = np.sqrt(s2p if s2p > 0.0 else 0.0)
                    dpp = pp[jp] - pp[j]
                    dnp = dd[jp]
                elif periodic:
                    s2p = 1.0 - dd[0] * dd[0]
                    Sp = np.sqrt(s2p if s2p > 0.0 else 0.0)
                    dpp = pp[0] - pp[j]
                    dnp = dd[0]
                else:
                    Sp = 0.0
                    dpp = 0.0
                    dnp = 0.0
                if j - 1 >= 0:
                    jm = j - 1
                    s2m = 1.0 - dd[jm] * dd[jm]
                    Sm = np.sqrt(s2m if s2m > 0.0 else 0.0)
                    dpm = pp[jm] - pp[j]
                    dnm = dd[jm]
                elif periodic:
                    s2m = 1.0 - dd[L - 1] * dd[L - 1]
                    Sm = np.sqrt(s2m if s2m > 0.0 else 0.0)
                    dpm = pp[L - 1] - pp[j]
                    dnm = dd[L - 1]
                else:
                    Sm = 0.0
                    dpm = 0.0
                    dnm = 0.0
                kd[stage, j] = half_th * S * (Sp * np.sin(dpp) + Sm * np.sin(dpm))
                kp[stage, j] = (half_th * factor * (Sp * np.cos(dpp) + Sm * np.cos(dpm))
                                - half_V * (dnp + dnm) - half_mu)
        for j in range(L):
            delta[j] = delta[j] + sixth * (((kd[0, j] + 2.0 * kd[1, j])
                                            + 2.0 * kd[2, j]) + kd[3, j])
            phi[j] = phi[j] + sixth * (((kp[0, j] + 2.0 * kp[1, j])
                                        + 2.0 * kp[2, j]) + kp[3, j])
            if delta[j] > 1.0:
                delta[j] = 1.0
            elif delta[j] < -1.0:
                delta[j] = -1.0


def _rhs_arrays(delta, phi, th, V, mu, periodic):
    """Vectorized RHS mirroring the kernel arithmetic exactly."""
    s2 = 1.0 - delta * delta
    S = np.sqrt(np.maximum(s2, 0.0))
    factor = np.where(s2 >= EPS_REG, delta / np.sqrt(np.maximum(s2, EPS_REG)), 0.0)
    if periodic:
        Sp, Sm = np.roll(S, -1), np.roll(S, 1)
        dnp, dnm = np.roll(delta, -1), np.roll(delta, 1)
        dpp, dpm = np.roll(phi, -1) - phi, np.roll(phi, 1) - phi
    else:
        Sp = np.concatenate([S[1:], [0.0]])
        Sm = np.concatenate([[0.0], S[:-1]])
        dnp = np.concatenate([delta[1:], [0.0]])
        dnm = np.concatenate([[0.0], delta[:-1]])
        dpp = np.concatenate([phi[1:] - phi[:-1], [0.0]])
        dpm = np.concatenate([[0.0], phi[:-1] - phi[1:]])
    ddelta = 0.5 * th * S * (Sp * np.sin(dpp) + Sm * np.sin(dpm))
    dphi = (0.5 * th * factor * (Sp * np.cos(dpp) + Sm * np.cos(dpm))
            - 0.5 * V * (dnp + dnm) - 0.5 * mu)
    return ddelta, dphi


def _rk4_numpy(delta, phi, dt, nsteps, th, V, mu, periodic):
    for _ in range(nsteps):
        k1d, k1p = _rhs_arrays(delta, phi, th, V, mu, periodic)
        k2d, k2p = _rhs_arrays(delta + 0.5 * dt * k1d, phi + 0.5 * dt * k1p,
                               th, V, mu, periodic)
        k3d, k3p = _rhs_arrays(delta + 0.5 * dt * k2d, phi + 0.5 * dt * k2p,
                               th, V, mu, periodic)
        k4d, k4p = _rhs_arrays(delta + dt * k3d, phi + dt * k3p,
                               th, V, mu, periodic)
        delta += dt / 6.0 * (((k1d + 2.0 * k2d) + 2.0 * k3d) + k4d)
        phi += dt / 6.0 * (((k1p + 2.0 * k2p) + 2.0 * k3p) + k4p)
        np.clip(delta, -1.0, 1.0, out=delta)


def advance(delta, phi, dt, nsteps, params: ModelParams, backend: str = "auto"):
    """Advance (delta, phi) in place by nsteps RK4 steps."""
    if backend == "auto":
        backend = "numba" if _HAVE_NUMBA else "numpy"
    if backend == "numba":
        _rk4_kernel(delta, phi, dt, nsteps, params.t, params.V, params.mu_eff,
                    EPS_REG, params.periodic)
    elif backend == "numpy":
        _rk4_numpy(delta, phi, dt, nsteps, params.t, params.V, params.mu_eff,
                   params.periodic)
    else:
        raise ParamDomain(f"unknown backend {backend!r}")


def step(state: LatticeState, params: ModelParams, dt: float) -> LatticeState:
    """One classical RK4 step; |delta| is clipped to the hard-core band."""
    if not (0.0 < dt <= 0.05):
        raise ParamDomain(f"dt must lie in (0, 0.05], got {dt}")
    delta = state.delta.copy()
    phi = state.phi.copy()
    advance(delta, phi, dt, 1, params)
    if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(phi))):
        raise NonFinite(f"non-finite state component after step at t={state.time}")
    return LatticeState(delta, phi, state.time + dt)


def evolve(state: LatticeState, params: ModelParams, config: IntegratorConfig,
           observer=None, backend: str = "auto") -> Trajectory:
    """Evolve to config.t_end, recording a frame every frame_stride steps.

    Raises ConservationBreach when particle number (absolute) or energy
    (relative) drifts past the configured tolerances, and NonFinite if the
    state leaves the finite domain.  observer, when given, is called as
    observer(time, state_snapshot, obs) at every recorded frame.
    """
    if state.L != params.L:
        raise ParamDomain(f"state has L={state.L} but params.L={params.L}")
    span = config.t_end - state.time
    if span < 0:
        raise ParamDomain("t_end precedes the state time")
    nsteps = int(round(span / config.dt))

    delta = state.delta.copy()
    phi = state.phi.copy()
    t0 = state.time

    times = [t0]
    deltas = [delta.copy()]
    phis = [phi.copy()]
    diags = [observables(state, params)]
    n0 = diags[0].particle_number
    e0 = diags[0].energy
    if observer is not None:
        observer(t0, state.copy(), diags[0])

    done = 0
    while done < nsteps:
        chunk = min(config.frame_stride, nsteps - done)
        advance(delta, phi, config.dt, chunk, params, backend=backend)
        done += chunk
        tnow = t0 + done * config.dt
        if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(phi))):
            raise NonFinite(f"non-finite state component at t={tnow}")
        snap = LatticeState(delta.copy(), phi.copy(), tnow)
        obs = observables(snap, params)
        if config.check_conservation:
            drift_n = abs(obs.particle_number - n0)
            if drift_n > config.tolerances.number:
                raise ConservationBreach("particle_number", drift_n,
                                         config.tolerances.number)
            drift_e = abs(obs.energy - e0) / max(1.0, abs(e0))
            if drift_e > config.tolerances.energy:
                raise ConservationBreach("energy", drift_e,
                                         config.tolerances.energy)
        times.append(tnow)
        deltas.append(snap.delta)
        phis.append(snap.phi)
        diags.append(obs)
        if observer is not None:
            observer(tnow, snap, obs)

    return Trajectory(params=params, times=np.array(times),
                      deltas=np.array(deltas), phis=np.array(phis),
                      diagnostics=diags, dt=config.dt)
