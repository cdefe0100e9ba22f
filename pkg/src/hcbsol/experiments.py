"""Collision runs and classification, phase-diagram sweeps, breathers.

Classification follows the phase signatures of the two collision classes: at
the stationary-density instant a transmissive (T) encounter has a spatially
uniform phase, a reflective (R) one is uniform except for a jump of pi
bridged across two singular near-node sites.  The stationary instant is
located coarsely from recorded frames and then refined by re-integrating a
short window at fine time resolution, since the dip in max_j |drho_j/dt| is
far sharper than any practical frame cadence.

Supersonic train encounters carry several radians of internal phase winding
per period, so the uniform-phase signature cannot apply; transmission is
certified instead by carrier survival: each train's fundamental spatial
harmonic must retain its amplitude (relative to an identically prepared
solo run) and its direction of travel through the mutual transit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import (NoCollisionDetected, NoOscillationDetected,
                     ParamDomain, TrackerLost)
from .integrate import IntegratorConfig, Trajectory, evolve
from .model import LatticeState, ModelParams, eom_rhs, uniform_state
from .solitons import (PhaseImprint, SolitonSpec, build_state, density_profile,
                       phase_imprint, sound_speed, soliton_width,
                       train_profile)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassifyThresholds:
    """Dimensionless, scale-relative classification thresholds."""

    tau_stat_factor: float = 0.15   # stationarity dip relative to run peak
    theta_uniform: float = 0.05     # circular phase dispersion for T (rad)
    theta_wall: float = 0.3         # wall band around pi (rad)
    eps_node: float = 0.01          # hard-core approach for R anti-nodes
    rho_s_floor: float = 5e-3       # superfluid density below which a site's
                                    # phase is treated as undefined
    refine_back: float = 2.0        # refinement window start before coarse min
    refine_span: float = 4.0        # refinement window length
    refine_dt: float = 0.0025


@dataclass
class CollisionReport:
    collision_time: float
    cls: str                        # "T" | "R" | "indeterminate"
    min_density_rate: float
    peak_density_rate: float
    phase_dispersion_at_collision: float
    wall_sites: list
    node_extrema: tuple             # (min rho, max rho) near the encounter
    integrity_residual: float = float("nan")


@dataclass
class InterspeciesReport:
    stationary_phase_time: float
    min_phase_rate: float
    peak_phase_rate: float
    density_deviation_at_instant: float
    jump_before: float
    jump_at: float
    jump_after: float
    pre_speeds: tuple
    post_speeds: tuple
    amplitude_changes: tuple        # relative, (bright, dark)
    integrity_residual: float


@dataclass
class BreatherReport:
    count: int
    centers: list
    period_mean: float
    period_std: float
    n_cycles: int
    verdict: str                    # "bound" | "dissociated"
    measure_site: int = -1


@dataclass
class TrainCollisionReport:
    cls: str
    survivals: tuple
    directions_ok: tuple
    phase_velocities: tuple
    expected_velocities: tuple


@dataclass
class PhaseDiagramGrid:
    rho0_axis: list
    vbar_axis: list
    labels: list                    # labels[i][j] for (rho0_i, vbar_j)
    sound_speed_curve: list
    failures: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# generic helpers
# ---------------------------------------------------------------------------

def _circular_diffs(phi):
    return np.angle(np.exp(1j * np.diff(phi)))


def _dispersion(phi):
    z = np.exp(1j * phi)
    rbar = min(abs(np.mean(z)), 1.0)
    if rbar <= 0.0:
        return float("inf")
    return float(np.sqrt(max(-2.0 * np.log(rbar), 0.0)))


def _phase_rate(state, params):
    _, dphi = eom_rhs(state, params)
    return float(np.max(np.abs(dphi)))


def _density_rate_series(traj):
    return traj.max_density_rates()


def _refine(traj, params, i_coarse, thresholds, metric):
    """Re-integrate a fine window around frame i_coarse; return (state, value)
    at the instant minimizing metric('density'|'phase')."""
    t_lo = max(traj.times[0], traj.times[i_coarse] - thresholds.refine_back)
    i_lo = int(np.searchsorted(traj.times, t_lo))
    start = traj.frame_state(i_lo)
    fine = evolve(start, params,
                  IntegratorConfig(t_end=start.time + thresholds.refine_span,
                                   dt=thresholds.refine_dt, frame_stride=1,
                                   check_conservation=False))
    if metric == "density":
        vals = fine.max_density_rates()
    else:
        vals = np.array([_phase_rate(fine.frame_state(i), params)
                         for i in range(fine.n_frames)])
    k = int(np.argmin(vals))
    return fine.frame_state(k), float(vals[k]), fine


def _wall_bonds(state, params, thresholds):
    """Near-pi phase jumps between consecutive phase-carrying sites.

    Sites with rho_s below the floor have no defined phase (the condensate
    vanishes there); differences are bridged across them and each wall is
    reported by the singular site it brackets (or the bond's left site when
    no site is masked).
    """
    rho = 0.5 * (1.0 - state.delta)
    rho_s = rho * (1.0 - rho)
    valid = np.where(rho_s > thresholds.rho_s_floor)[0]
    if len(valid) < 3:
        return []
    phiv = state.phi[valid]
    pairs = list(zip(valid[:-1], valid[1:], _circular_diffs(phiv)))
    if params.periodic:
        seam = np.angle(np.exp(1j * (phiv[0] - phiv[-1])))
        pairs.append((valid[-1], valid[0], seam))
    walls = []
    L = state.L
    for a, b, d in pairs:
        if abs(abs(d) - math.pi) < thresholds.theta_wall:
            gap = (b - a) % L
            if gap > 1:
                masked = [(a + g) % L for g in range(1, gap)]
                walls.append(int(masked[len(masked) // 2]))
            else:
                walls.append(int(a))
    return walls


def classify_collision(traj: Trajectory, thresholds: ClassifyThresholds | None = None,
                       refine: bool = True) -> CollisionReport:
    """T/R classification of an intra-species encounter.

    The collision time is the argmin over frames of max_j |drho_j/dt|
    (refined by re-integration unless refine=False); T requires the phase
    dispersion over phase-carrying sites to fall below theta_uniform with no
    walls, R requires exactly two near-pi walls.  Indeterminate outcomes are
    reported, never raised.
    """
    th = thresholds or ClassifyThresholds()
    rates = _density_rate_series(traj)
    peak = float(np.max(rates))
    i_min = int(np.argmin(rates))
    if refine and traj.n_frames > 2:
        state_c, rate_min, fine = _refine(traj, traj.params, i_min, th, "density")
        rhos = fine.densities()
        node_lo = float(np.min(rhos))
        node_hi = float(np.max(rhos))
    else:
        state_c = traj.frame_state(i_min)
        rate_min = float(rates[i_min])
        rho_c = 0.5 * (1.0 - state_c.delta)
        node_lo, node_hi = float(np.min(rho_c)), float(np.max(rho_c))

    rho = 0.5 * (1.0 - state_c.delta)
    rho_s = rho * (1.0 - rho)
    valid = rho_s > th.rho_s_floor
    disp = _dispersion(state_c.phi[valid]) if np.any(valid) else float("inf")
    walls = _wall_bonds(state_c, traj.params, th)

    if rate_min > th.tau_stat_factor * peak:
        cls = "indeterminate"
    elif len(walls) == 2:
        cls = "R"
    elif disp < th.theta_uniform and not walls:
        cls = "T"
    else:
        cls = "indeterminate"
    return CollisionReport(collision_time=float(state_c.time), cls=cls,
                           min_density_rate=rate_min, peak_density_rate=peak,
                           phase_dispersion_at_collision=disp,
                           wall_sites=walls, node_extrema=(node_lo, node_hi))


# ---------------------------------------------------------------------------
# soliton tracking and fitting
# ---------------------------------------------------------------------------

@dataclass
class Tracker:
    """Extremum tracker: sign=+1 follows a density peak, -1 a notch."""

    sign: int
    start: float
    t_min: float = -np.inf
    t_max: float = np.inf
    window: int = 10


def _subsite_extremum(dev, j, L):
    a, b, c = dev[(j - 1) % L], dev[j], dev[(j + 1) % L]
    denom = a - 2 * b + c
    off = 0.5 * (a - c) / denom if abs(denom) > 1e-30 else 0.0
    return j + off


def measure_soliton_speed(traj: Trajectory, tracker: Tracker,
                          rho0: float | None = None) -> float:
    """Least-squares speed of a tracked extremum, sub-site resolved."""
    rho = traj.densities()
    L = rho.shape[1]
    bg = rho0 if rho0 is not None else float(np.median(rho[0]))
    sel = (traj.times >= tracker.t_min) & (traj.times <= tracker.t_max)
    idx = np.where(sel)[0]
    if len(idx) < 3:
        raise TrackerLost("fewer than 3 frames in the tracking window")
    guess = tracker.start % L
    positions, times = [], []
    offset = 0.0
    prev = None
    for i in idx:
        dev = tracker.sign * (rho[i] - bg)
        cells = np.arange(int(round(guess)) - tracker.window,
                          int(round(guess)) + tracker.window + 1) % L
        j = int(cells[np.argmax(dev[cells])])
        pos = _subsite_extremum(dev, j, L)
        if prev is not None:
            step = (pos - prev + L / 2) % L - L / 2
            if abs(step) > tracker.window:
                raise TrackerLost(f"extremum jumped {step:+.1f} sites at t={traj.times[i]}")
            offset += step
            positions.append(positions[0] + offset)
        else:
            positions.append(pos)
        prev = pos
        guess = pos % L
        times.append(traj.times[i])
    return float(np.polyfit(times, positions, 1)[0])


def fit_soliton(rho_row, rho0: float, sign: int, around: float, window: int = 25):
    """(amplitude, fwhm, position) of a localized density extremum."""
    L = len(rho_row)
    dev = sign * (rho_row - rho0)
    cells = np.arange(int(round(around)) - window, int(round(around)) + window + 1) % L
    j = int(cells[np.argmax(dev[cells])])
    amp = float(dev[j])
    pos = _subsite_extremum(dev, j, L)
    half = amp / 2.0
    lo = hi = 0.0
    for step in range(1, window):
        a, b = dev[(j - step) % L], dev[(j - step + 1) % L]
        if a <= half <= b:
            lo = step - (half - a) / (b - a)
            break
    for step in range(1, window):
        a, b = dev[(j + step - 1) % L], dev[(j + step) % L]
        if b <= half <= a:
            hi = step - 1 + (a - half) / (a - b)
            break
    return amp, float(lo + hi), float(pos)


# ---------------------------------------------------------------------------
# intra-species collisions
# ---------------------------------------------------------------------------

def collision_pair(species_a: str, species_b: str, rho0: float, vbar: float,
                   params: ModelParams, separation: float | None = None):
    """Mirror pair of specs centered on the ring, approaching head-on."""
    gmax = soliton_width(rho0, vbar, params).value
    if separation is None:
        separation = max(40.0, math.ceil(12.0 * gmax))
    c1 = round(params.L / 2 - separation / 2)
    c2 = round(params.L / 2 + separation / 2)
    return (SolitonSpec(species_a, rho0, abs(vbar), c1),
            SolitonSpec(species_b, rho0, -abs(vbar), c2))


def run_collision(spec_a: SolitonSpec, spec_b: SolitonSpec, params: ModelParams,
                  dt: float = 0.005, frame_dt: float = 1.0,
                  t_end: float | None = None,
                  thresholds: ClassifyThresholds | None = None,
                  winding: str = "strict"):
    """Evolve a two-soliton encounter and classify it.

    The trajectory spans at least twice the free-flight meeting time; the
    report's integrity residual compares each re-emerged soliton with the
    analytic profile translated to its fitted position.
    """
    if abs(spec_a.rho0 - spec_b.rho0) > 1e-12:
        raise ParamDomain("collision partners must share rho0")
    if not (spec_a.vbar > 0 > spec_b.vbar or spec_b.vbar > 0 > spec_a.vbar):
        raise ParamDomain("collision partners need opposite velocity signs")
    gmax = max(soliton_width(s.rho0, s.vbar, params).value for s in (spec_a, spec_b))
    sep = abs(spec_a.center - spec_b.center)
    sep = min(sep, params.L - sep)
    if sep < 10.0 * gmax:
        raise ParamDomain(f"initial separation {sep:.1f} below 10 Gamma = {10 * gmax:.1f}")
    th = thresholds or ClassifyThresholds()
    state = build_state([spec_a, spec_b], params.L, params, winding=winding)
    v_rel = (abs(spec_a.vbar) + abs(spec_b.vbar)) * sound_speed(spec_a.rho0, params) * params.t
    t_meet = sep / v_rel
    if t_end is None:
        t_end = 2.2 * t_meet
    traj = evolve(state, params,
                  IntegratorConfig(t_end=t_end, dt=dt,
                                   frame_stride=max(1, int(round(frame_dt / dt)))))
    rates = _density_rate_series(traj)
    if float(np.min(rates)) > th.tau_stat_factor * float(np.max(rates)):
        # confirm at fine resolution before giving up
        report = classify_collision(traj, th)
        if report.min_density_rate > th.tau_stat_factor * report.peak_density_rate:
            raise NoCollisionDetected(
                f"stationarity metric never dipped below {th.tau_stat_factor} of peak")
    report = classify_collision(traj, th)
    report.integrity_residual = _post_collision_residual(traj, spec_a, spec_b, params)
    return traj, report


def _post_collision_residual(traj, spec_a, spec_b, params):
    """Max L2 mismatch of the final-frame solitons vs translated analytic
    profiles, relative to the analytic perturbation norm."""
    rho = traj.densities()[-1]
    L = params.L
    rho0 = spec_a.rho0
    worst = 0.0
    for spec in (spec_a, spec_b):
        elapsed = traj.times[-1] - traj.times[0]
        expect = (spec.center + spec.vbar * sound_speed(rho0, params) * params.t
                  * elapsed) % L
        amp, fwhm, pos = fit_soliton(rho, rho0, spec.sign, expect, window=30)
        x = np.arange(L, dtype=float)
        zrel = (x - pos + L / 2) % L - L / 2
        f_ref = density_profile(zrel, spec, params)
        mask = np.abs(zrel) < 8.0 * soliton_width(rho0, spec.vbar, params).value
        resid = math.sqrt(float(np.sum((rho[mask] - rho0 - f_ref[mask]) ** 2)
                                / np.sum(f_ref[mask] ** 2)))
        worst = max(worst, resid)
    return worst


# ---------------------------------------------------------------------------
# interspecies (bright-dark) collisions at half filling
# ---------------------------------------------------------------------------

def run_interspecies(vbar: float, params: ModelParams, separation: float = 40.0,
                     dt: float = 0.005, frame_dt: float = 1.0,
                     t_end: float | None = None,
                     thresholds: ClassifyThresholds | None = None,
                     jump_halfwidth: int | None = None):
    """Bright-dark mirror collision at half filling.

    The encounter is located by the stationary-phase instant (argmin of
    max_j |dphi_j/dt|): there the density deviation from half filling nearly
    vanishes (the pair transiently annihilates) while the ~2 pi phase jump
    across the collision zone is conserved.
    """
    th = thresholds or ClassifyThresholds()
    L = params.L
    c1 = round(L / 2 - separation / 2)
    c2 = round(L / 2 + separation / 2)
    spec_b = SolitonSpec("bright", 0.5, abs(vbar), c1)
    spec_d = SolitonSpec("dark", 0.5, -abs(vbar), c2)
    state = build_state([spec_b, spec_d], L, params, winding="snap")
    v = abs(vbar) * sound_speed(0.5, params) * params.t
    t_meet = separation / (2.0 * v)
    if t_end is None:
        t_end = 2.5 * t_meet
    traj = evolve(state, params,
                  IntegratorConfig(t_end=t_end, dt=dt,
                                   frame_stride=max(1, int(round(frame_dt / dt)))))

    prates = np.array([_phase_rate(traj.frame_state(i), params)
                       for i in range(traj.n_frames)])
    peak = float(np.max(prates))
    i_min = int(np.argmin(prates))
    state_c, rate_min, _ = _refine(traj, params, i_min, th, "phase")
    if rate_min > th.tau_stat_factor * peak:
        raise NoCollisionDetected("no stationary-phase instant found")

    w = jump_halfwidth or int(separation / 2 + 30)
    lo, hi = L // 2 - w, L // 2 + w

    def window_jump(state):
        return float(np.sum(_circular_diffs(state.phi[lo:hi + 1])))

    rho_c = 0.5 * (1.0 - state_c.delta)
    dev_at = float(np.max(np.abs(rho_c - 0.5)))

    # pre/post speeds and amplitudes from the outer trajectory quarters
    third = max(2, traj.n_frames // 4)
    pre_sl = (traj.times[0], traj.times[third])
    post_sl = (traj.times[-third], traj.times[-1])
    v_pre_b = measure_soliton_speed(traj, Tracker(+1, c1, *pre_sl), rho0=0.5)
    v_pre_d = measure_soliton_speed(traj, Tracker(-1, c2, *pre_sl), rho0=0.5)
    elapsed = traj.times[-1] - traj.times[0]
    end_b = (c1 + v * elapsed) % L
    end_d = (c2 - v * elapsed) % L
    v_post_b = measure_soliton_speed(
        traj, Tracker(+1, (c1 + v * traj.times[-third]) % L, *post_sl), rho0=0.5)
    v_post_d = measure_soliton_speed(
        traj, Tracker(-1, (c2 - v * traj.times[-third]) % L, *post_sl), rho0=0.5)

    rho_first = traj.densities()[0]
    rho_last = traj.densities()[-1]
    amp_pre_b, _, _ = fit_soliton(rho_first, 0.5, +1, c1)
    amp_pre_d, _, _ = fit_soliton(rho_first, 0.5, -1, c2)
    amp_post_b, _, pos_b = fit_soliton(rho_last, 0.5, +1, end_b)
    amp_post_d, _, pos_d = fit_soliton(rho_last, 0.5, -1, end_d)

    worst = 0.0
    x = np.arange(L, dtype=float)
    for spec, pos in ((spec_b, pos_b), (spec_d, pos_d)):
        zrel = (x - pos + L / 2) % L - L / 2
        f_ref = density_profile(zrel, spec, params)
        mask = np.abs(zrel) < 8.0 * soliton_width(0.5, vbar, params).value
        worst = max(worst, math.sqrt(float(
            np.sum((rho_last[mask] - 0.5 - f_ref[mask]) ** 2) / np.sum(f_ref[mask] ** 2))))

    report = InterspeciesReport(
        stationary_phase_time=float(state_c.time),
        min_phase_rate=rate_min, peak_phase_rate=peak,
        density_deviation_at_instant=dev_at,
        jump_before=window_jump(traj.frame_state(0)),
        jump_at=window_jump(state_c),
        jump_after=window_jump(traj.frame_state(traj.n_frames - 1)),
        pre_speeds=(v_pre_b, v_pre_d), post_speeds=(v_post_b, v_post_d),
        amplitude_changes=(amp_post_b / amp_pre_b - 1.0,
                           amp_post_d / amp_pre_d - 1.0),
        integrity_residual=worst)
    return traj, report


# ---------------------------------------------------------------------------
# breathers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BreatherAnalysis:
    settle_time: float = 10.0
    count_window: float = 60.0      # trailing window for cluster counting
    floor_frac: float = 0.15        # activity floor vs profile max
    keep_frac: float = 0.5          # cluster peak vs strongest cluster
    variance_floor: float = 1e-10   # below this, no oscillation at all
    peak_prominence: float = 0.3
    alive_frac: float = 0.3         # envelope fraction ending the period window


def _clusters(profile, width, floor_frac, keep_frac):
    L = len(profile)
    gap = max(4, int(round(2.0 * width)))
    idx = np.where(profile > floor_frac * profile.max())[0]
    segs = []
    if len(idx):
        start = prev = idx[0]
        for j in idx[1:]:
            if j - prev <= gap:
                prev = j
            else:
                segs.append((start, prev))
                start = prev = j
        segs.append((start, prev))
    if len(segs) > 1 and segs[0][0] <= gap and segs[-1][1] >= L - 1 - gap:
        first = segs.pop(0)
        segs[-1] = (segs[-1][0], first[1] + L)
    peaks = [float(np.max(profile[np.arange(a, b + 1) % L])) for a, b in segs]
    if not peaks:
        return []
    strongest = max(peaks)
    return [(a, b, pk) for (a, b), pk in zip(segs, peaks) if pk >= keep_frac * strongest]


def run_breather(imprint: PhaseImprint, params: ModelParams,
                 config: IntegratorConfig | None = None,
                 analysis: BreatherAnalysis | None = None):
    """Imprint on uniform half filling, evolve, count and characterize.

    Counting segments the late-window mean |rho - 1/2| profile into localized
    clusters; each breather (a bound bright-dark lobe pair) registers as one
    cluster.  The oscillation period comes from successive density maxima at
    the strongest core site, seeded by the dominant spectral line.  The
    verdict is dissociated when the late-time activity maximum has escaped
    beyond 10 imprint widths from every imprint center.
    """
    ana = analysis or BreatherAnalysis()
    cfg = config or IntegratorConfig(t_end=260.0, dt=0.01, frame_stride=25)
    state = phase_imprint(uniform_state(params.L, 0.5), imprint)
    traj = evolve(state, params, cfg)
    rho = traj.densities()
    t = traj.times
    L = params.L

    dev = rho - 0.5
    if float(np.var(dev)) < ana.variance_floor:
        if imprint.n == 0:
            return traj, BreatherReport(count=0, centers=[], period_mean=float("nan"),
                                        period_std=float("nan"), n_cycles=0,
                                        verdict="bound")
        raise NoOscillationDetected("site-density variance below the noise floor")

    t_hi = t[-1] - 2.0 * (t[1] - t[0])
    t_lo = max(ana.settle_time, t_hi - ana.count_window)
    iw = (t >= t_lo) & (t <= t_hi)
    profile = np.mean(np.abs(dev[iw]), axis=0)
    clusters = _clusters(profile, imprint.width, ana.floor_frac, ana.keep_frac)
    centers = [0.5 * (a + b) % L for a, b, _ in clusters]

    j_peak = int(np.argmax(profile))
    dist = min(min(abs(j_peak - c) % L, L - abs(j_peak - c) % L)
               for c in imprint.centers)
    verdict = "bound" if dist <= 10.0 * imprint.width else "dissociated"

    # period at the strongest core site near the first imprint center; the
    # imprint transient can dominate the early window for narrow imprints,
    # so both the full window and its late half are tried and the
    # measurement with more cycles wins
    c0 = imprint.centers[0]
    x = np.arange(L)
    zrel = (x - c0 + L / 2) % L - L / 2
    core = np.abs(zrel) <= 3.0 * imprint.width + 2

    def measure(t_lo_m):
        iw_p = (t >= t_lo_m) & (t <= t_hi)
        if np.count_nonzero(iw_p) < 16:
            return None
        var = np.var(dev[iw_p][:, core], axis=0)
        j_site = int(x[core][np.argmax(var)])
        sig = dev[iw_p, j_site]
        tt = t[iw_p]
        if np.max(np.abs(sig)) < 1e-6:
            return None
        # the mode is metastable: measure only while its envelope is alive
        env = np.abs(sig - np.mean(sig))
        win = max(3, len(env) // 50)
        env = np.convolve(env, np.ones(win) / win, mode="same")
        alive = np.where(env >= ana.alive_frac * np.max(env))[0]
        i_hi = alive[-1] + 1 if len(alive) else len(sig)
        sig0 = sig[:i_hi] - np.mean(sig[:i_hi])
        tta = tt[:i_hi]
        if len(sig0) < 16:
            return None
        spec = np.abs(np.fft.rfft(sig0 * np.hanning(len(sig0)))) ** 2
        freqs = np.fft.rfftfreq(len(sig0), tta[1] - tta[0])
        t_est = 1.0 / freqs[int(np.argmax(spec[1:])) + 1]
        dist_pk = max(2, int(0.7 * t_est / (tta[1] - tta[0])))
        prom = ana.peak_prominence * np.max(np.abs(sig0))
        # maxima-to-maxima and minima-to-minima spacings are both
        # full-period samples; pool them
        per = []
        for s in (sig0, -sig0):
            pk, _ = find_peaks(s, distance=dist_pk, prominence=prom)
            dpk = np.diff(tta[pk])
            per.extend(dpk[(dpk > 0.7 * t_est) & (dpk < 1.4 * t_est)])
        if len(per) < 2:
            return None
        return (len(per), -np.std(per) / np.mean(per), float(np.mean(per)),
                float(np.std(per)), j_site)

    period_mean = period_std = float("nan")
    n_cyc = 0
    j_site = -1
    candidates = [m for m in (measure(ana.settle_time),
                              measure(0.5 * (ana.settle_time + t_hi))) if m]
    if candidates:
        best = max(candidates)
        n_cyc = (best[0] + 1) // 2
        period_mean, period_std, j_site = best[2], best[3], best[4]

    return traj, BreatherReport(count=len(clusters), centers=centers,
                                period_mean=period_mean, period_std=period_std,
                                n_cycles=n_cyc, verdict=verdict,
                                measure_site=j_site)


# ---------------------------------------------------------------------------
# supersonic trains
# ---------------------------------------------------------------------------

def commensurate_length(rho0: float, vbars, params_template, lo: int = 300,
                        hi: int = 700, strain_max: float = 0.02) -> int:
    """Smallest ring length fitting every train period within the strain cap."""
    periods = []
    for vb in vbars:
        g = soliton_width(rho0, abs(vb), params_template).value
        periods.append(2.0 * math.pi * g)
    for L in range(lo, hi + 1):
        ok = True
        for p in periods:
            n = max(1, round(L / p))
            if abs(L / (n * p) - 1.0) > strain_max:
                ok = False
                break
        if ok:
            return L
    raise ParamDomain(f"no lattice in [{lo}, {hi}] fits periods {periods} "
                      f"within {strain_max:.0%}")


def _train_segment(rho0, vbar, L, params, center, n_per, edge=10.0):
    """Windowed train deviation/phase-gradient about a half-filled background."""
    x = np.arange(L, dtype=float)
    gam = soliton_width(rho0, abs(vbar), params).value
    n_ring = max(1, round(L / (2.0 * math.pi * gam)))
    gam_adj = L / (2.0 * math.pi * n_ring)
    k = 2.0 * math.pi * n_ring / L
    span = n_per * 2.0 * math.pi * gam_adj
    zrel = (x - center + L / 2) % L - L / 2
    f = train_profile(zrel, rho0, abs(vbar), params, gamma_abs=gam_adj)
    rho_tr = rho0 + f
    env = 0.5 * (np.tanh((zrel + span / 2) / edge) - np.tanh((zrel - span / 2) / edge))
    dev = env * (rho_tr - 0.5)
    v = vbar * sound_speed(rho0, params) * params.t
    grad = env * (v * f / (rho_tr * (1.0 - rho_tr)))
    return dev, grad, k


def _train_state_from(parts, L):
    dev = np.zeros(L)
    grad = np.zeros(L)
    for d, g in parts:
        dev += d
        grad += g
    rho = np.clip(0.5 + dev, 1e-9, 1 - 1e-9)
    total = float(np.sum(grad))
    grad -= (total - 2.0 * math.pi * round(total / (2.0 * math.pi))) / L
    phi = np.concatenate([[0.0], np.cumsum(grad[:-1])])
    return LatticeState(np.clip(1.0 - 2.0 * rho, -1.0, 1.0), phi)


def run_train_collision(rho0: float, vbar_a: float, vbar_b: float,
                        params_template: ModelParams, n_per=(4, 7),
                        dt: float = 0.005, t_end: float = 350.0,
                        survival_floor: float = 0.5):
    """Counter-propagating train segments crossing on a ring.

    Transmission (T) holds when each train's fundamental carrier survives the
    mutual transit (amplitude >= survival_floor of an identically prepared
    solo run) with its direction of travel preserved.  The two speeds must
    differ so the carriers occupy distinct wavenumbers.
    """
    if not (abs(vbar_a) > 1.0 and abs(vbar_b) > 1.0):
        raise ParamDomain("train collisions require |vbar| > 1 on both sides")
    if abs(abs(vbar_a) - abs(vbar_b)) < 1e-6:
        raise ParamDomain("carrier speeds must differ (mirror pairs are "
                          "spectrally degenerate)")
    span = sum(n * 2.0 * math.pi * soliton_width(rho0, abs(vb), params_template).value
               for n, vb in zip(n_per, (vbar_a, vbar_b)))
    L = commensurate_length(rho0, (vbar_a, vbar_b), params_template,
                            lo=int(span) + 50, hi=int(span) + 400)
    params = ModelParams(L=L, t=params_template.t, V=params_template.V)
    segA = _train_segment(rho0, abs(vbar_a), L, params, L * 0.25, n_per[0])
    segB = _train_segment(rho0, -abs(vbar_b), L, params, L * 0.75, n_per[1])
    cfg = IntegratorConfig(t_end=t_end, dt=dt, frame_stride=max(1, int(round(1.0 / dt))))
    x = np.arange(L)
    runs = {}
    for lab, parts in (("pair", [segA[:2], segB[:2]]),
                       ("a", [segA[:2]]), ("b", [segB[:2]])):
        runs[lab] = evolve(_train_state_from(parts, L), params, cfg)

    tt = runs["pair"].times
    late = slice(3 * len(tt) // 4, len(tt))
    survivals, dirs_ok, vphs, wants = [], [], [], []
    for (dev, grad, k), solo, vb in ((segA, "a", abs(vbar_a)), (segB, "b", -abs(vbar_b))):
        want = vb * sound_speed(rho0, params) * params.t

        def amp(traj):
            rho = traj.densities()
            return (rho - np.mean(rho, axis=1, keepdims=True)) @ np.exp(-1j * k * x) / L

        a_pair = amp(runs["pair"])
        a_solo = amp(runs[solo])
        surv = float(np.mean(np.abs(a_pair[late]))
                     / max(np.mean(np.abs(a_solo[late])), 1e-12))
        vph = -float(np.polyfit(tt[late], np.unwrap(np.angle(a_pair))[late], 1)[0] / k)
        survivals.append(surv)
        vphs.append(vph)
        wants.append(want)
        dirs_ok.append(vph * want > 0)
    cls = "T" if (min(survivals) >= survival_floor and all(dirs_ok)) else "indeterminate"
    return runs["pair"], TrainCollisionReport(cls=cls, survivals=tuple(survivals),
                                              directions_ok=tuple(dirs_ok),
                                              phase_velocities=tuple(vphs),
                                              expected_velocities=tuple(wants))


# ---------------------------------------------------------------------------
# phase diagram
# ---------------------------------------------------------------------------

def _collision_label(rho0, vbar, species, params_template, dt,
                     thresholds) -> str:
    params = params_template
    try:
        a, b = collision_pair(species, species, rho0, vbar, params)
        _, rep = run_collision(a, b, params, dt=dt, thresholds=thresholds)
        return rep.cls
    except NoCollisionDetected:
        return "indeterminate"


def find_transmission_threshold(rho0: float, params: ModelParams,
                                species: str = "bright",
                                v_lo: float = 0.4, v_hi: float = 0.98,
                                dv: float = 0.01, dt: float = 0.005,
                                thresholds: ClassifyThresholds | None = None):
    """Bracket the R -> T crossover speed to width dv by bisection."""
    th = thresholds or ClassifyThresholds()
    lab_lo = _collision_label(rho0, v_lo, species, params, dt, th)
    lab_hi = _collision_label(rho0, v_hi, species, params, dt, th)
    if lab_lo == "T" or lab_hi != "T":
        raise ParamDomain(f"no R->T bracket in [{v_lo}, {v_hi}] at rho0={rho0}: "
                          f"ends classify {lab_lo}/{lab_hi}")
    while v_hi - v_lo > dv:
        mid = 0.5 * (v_lo + v_hi)
        if _collision_label(rho0, mid, species, params, dt, th) == "T":
            v_hi = mid
        else:
            v_lo = mid
    return v_lo, v_hi


def sweep_phase_diagram(rho0_grid, vbar_grid, params_template: ModelParams,
                        species: str = "bright", dt: float = 0.005,
                        thresholds: ClassifyThresholds | None = None,
                        bracket_thresholds: bool = False) -> PhaseDiagramGrid:
    """T/R labels over a (rho0, vbar) grid; supersonic points run as train
    collisions against a slightly faster counter-train.  Per-point failures
    are recorded and the sweep continues."""
    th = thresholds or ClassifyThresholds()
    labels = []
    failures = {}
    for i, rho0 in enumerate(rho0_grid):
        row = []
        for j, vbar in enumerate(vbar_grid):
            try:
                if abs(vbar) > 1.0:
                    _, rep = run_train_collision(rho0, vbar, vbar + 0.05,
                                                 params_template, dt=dt)
                    row.append(rep.cls)
                else:
                    row.append(_collision_label(rho0, vbar, species,
                                                params_template, dt, th))
            except Exception as exc:  # per-point failures recorded, sweep continues
                failures[(i, j)] = f"{type(exc).__name__}: {exc}"
                row.append("failed")
        labels.append(row)
    thresholds_out = {}
    if bracket_thresholds:
        for rho0 in rho0_grid:
            try:
                thresholds_out[rho0] = find_transmission_threshold(
                    rho0, params_template, species=species, dt=dt, thresholds=th)
            except ParamDomain as exc:
                thresholds_out[rho0] = ("failed", str(exc))
    return PhaseDiagramGrid(rho0_axis=list(rho0_grid), vbar_axis=list(vbar_grid),
                            labels=labels,
                            sound_speed_curve=[sound_speed(r, params_template)
                                               for r in rho0_grid],
                            failures=failures, thresholds=thresholds_out)
