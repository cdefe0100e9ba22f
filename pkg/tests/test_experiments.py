"""Experiments: classification, tracking, interspecies, breathers, trains."""

import math

import numpy as np
import pytest

from hcbsol import (IntegratorConfig, LatticeState, ModelParams, PhaseImprint,
                    SolitonSpec, TrackerLost, build_state, evolve,
                    sound_speed, uniform_state)
from hcbsol.experiments import (BreatherAnalysis, ClassifyThresholds, Tracker,
                                classify_collision, collision_pair,
                                commensurate_length, fit_soliton,
                                find_transmission_threshold, measure_soliton_speed,
                                run_breather, run_collision, run_interspecies,
                                run_train_collision, sweep_phase_diagram)
from hcbsol.integrate import Trajectory
from hcbsol.model import observables


def params(L=400, V=0.9):
    return ModelParams(L=L, t=1.0, V=V)


# ---- synthetic classification ------------------------------------------------

def synthetic_trajectory(states, p):
    times = np.array([s.time for s in states])
    return Trajectory(params=p, times=times,
                      deltas=np.array([s.delta for s in states]),
                      phis=np.array([s.phi for s in states]),
                      diagnostics=[observables(s, p) for s in states],
                      dt=0.01)


def test_classify_synthetic_uniform_phase_is_T():
    p = params(L=64)
    # a frozen density bump with a uniform phase: sin terms vanish identically
    delta = np.full(64, 0.1)
    delta[30:34] = -0.4
    states = [LatticeState(delta.copy(), np.zeros(64), t) for t in (0.0, 1.0, 2.0)]
    traj = synthetic_trajectory(states, p)
    rep = classify_collision(traj, refine=False)
    assert rep.cls == "T"
    assert rep.wall_sites == []
    assert rep.phase_dispersion_at_collision < 0.05


def test_classify_synthetic_pi_wall_is_R():
    p = params(L=64)
    delta = np.full(64, 0.1)
    delta[30] = -1.0   # two saturated anti-node sites
    delta[34] = -1.0
    phi = np.zeros(64)
    phi[31:34] = math.pi     # wall between the singular sites
    states = [LatticeState(delta.copy(), phi.copy(), t) for t in (0.0, 1.0, 2.0)]
    traj = synthetic_trajectory(states, p)
    rep = classify_collision(traj, refine=False)
    assert rep.cls == "R"
    assert rep.wall_sites == [30, 34]


def test_classify_indeterminate_when_no_dip():
    p = params(L=64)
    rng = np.random.default_rng(0)
    states = []
    for i, t in enumerate((0.0, 1.0, 2.0)):
        states.append(LatticeState(rng.uniform(-0.5, 0.5, 64),
                                   rng.uniform(-3, 3, 64), t))
    rep = classify_collision(synthetic_trajectory(states, p), refine=False)
    assert rep.cls == "indeterminate"


# ---- speed measurement ---------------------------------------------------------

def test_speed_stationary_soliton():
    p = params()
    st = build_state([SolitonSpec("dark", 0.45, 0.0, 100.0),
                      SolitonSpec("dark", 0.45, 0.0, 300.0, phase_sign=-1)],
                     400, p)
    traj = evolve(st, p, IntegratorConfig(t_end=50.0, dt=0.01, frame_stride=100))
    v = measure_soliton_speed(traj, Tracker(-1, 100.0), rho0=0.45)
    assert abs(v) < 1e-3


def test_speed_moving_soliton():
    p = params()
    st = build_state([SolitonSpec("bright", 0.45, 0.5, 100.0),
                      SolitonSpec("bright", 0.45, -0.5, 300.0)], 400, p)
    traj = evolve(st, p, IntegratorConfig(t_end=50.0, dt=0.01, frame_stride=100))
    want = 0.5 * sound_speed(0.45, p)
    v1 = measure_soliton_speed(traj, Tracker(+1, 100.0), rho0=0.45)
    v2 = measure_soliton_speed(traj, Tracker(+1, 300.0), rho0=0.45)
    assert v1 == pytest.approx(want, rel=0.02)
    assert v2 == pytest.approx(-want, rel=0.02)
    assert abs(v1 + v2) < 0.02 * want   # equal magnitude, opposite signs


def test_tracker_lost_on_jump():
    p = params(L=64)
    rng = np.random.default_rng(3)
    states = [LatticeState(rng.uniform(-0.2, 0.2, 64), np.zeros(64), t)
              for t in np.linspace(0, 5, 6)]
    traj = synthetic_trajectory(states, p)
    with pytest.raises(TrackerLost):
        measure_soliton_speed(traj, Tracker(+1, 32.0, window=3), rho0=0.0)


def test_fit_soliton_recovers_profile():
    p = params()
    spec = SolitonSpec("bright", 0.45, 0.5, 200.0)
    st = build_state([spec, SolitonSpec("bright", 0.45, -0.5, 40.0)], 400, p)
    rho = 0.5 * (1 - st.delta)
    amp, fwhm, pos = fit_soliton(rho, 0.45, +1, 200.0)
    assert pos == pytest.approx(200.0, abs=0.2)
    assert amp == pytest.approx(0.4837, abs=0.02)


# ---- real collisions -----------------------------------------------------------

@pytest.fixture(scope="module")
def benchmark_runs():
    p = params()
    out = {}
    for label, vbar in (("T", 0.85), ("R", 0.5)):
        a, b = collision_pair("bright", "bright", 0.45, vbar, p)
        out[label] = run_collision(a, b, p, dt=0.005)
    return out


def test_bright_pair_fast_transmits(benchmark_runs):
    _, rep = benchmark_runs["T"]
    assert rep.cls == "T"
    assert rep.phase_dispersion_at_collision < 0.05
    assert rep.wall_sites == []


def test_bright_pair_slow_reflects(benchmark_runs):
    _, rep = benchmark_runs["R"]
    assert rep.cls == "R"
    assert len(rep.wall_sites) == 2
    assert rep.node_extrema[1] >= 0.99     # anti-node reaches the hard-core bound


def test_collision_integrity(benchmark_runs):
    for label in ("T", "R"):
        _, rep = benchmark_runs[label]
        assert rep.integrity_residual < 0.05


def test_wall_distance_tunable_by_V():
    # R-class wall separation moves monotonically with the coupling
    seps = []
    for V in (0.8, 0.85, 0.9):
        p = params(V=V)
        a, b = collision_pair("bright", "bright", 0.45, 0.5, p)
        _, rep = run_collision(a, b, p, dt=0.005)
        assert rep.cls == "R"
        w = sorted(rep.wall_sites)
        seps.append(w[1] - w[0])
    assert seps == sorted(seps) or seps == sorted(seps, reverse=True)
    assert seps[0] != seps[-1]


def test_collision_precondition_guards():
    p = params()
    with pytest.raises(Exception):
        run_collision(SolitonSpec("bright", 0.45, 0.5, 190.0),
                      SolitonSpec("bright", 0.45, -0.5, 210.0), p)  # too close
    with pytest.raises(Exception):
        run_collision(SolitonSpec("bright", 0.45, 0.5, 100.0),
                      SolitonSpec("bright", 0.40, -0.5, 300.0), p)  # rho0 differ


# ---- interspecies ---------------------------------------------------------------

def test_interspecies_annihilation_and_reemergence():
    p = params()
    traj, rep = run_interspecies(0.5, p, separation=40.0, dt=0.005)
    assert rep.min_phase_rate < 0.1 * rep.peak_phase_rate
    assert rep.density_deviation_at_instant < 0.02
    two_pi = 2 * math.pi
    for j in (rep.jump_before, rep.jump_at, rep.jump_after):
        assert abs(j - two_pi) / two_pi < 0.05
    assert abs(rep.amplitude_changes[0]) < 0.05
    assert abs(rep.amplitude_changes[1]) < 0.05
    assert rep.integrity_residual < 0.05
    v = 0.5 * sound_speed(0.5, p)
    assert rep.pre_speeds[0] == pytest.approx(v, rel=0.05)
    assert rep.post_speeds[0] == pytest.approx(v, rel=0.05)


# ---- breathers -------------------------------------------------------------------

@pytest.fixture(scope="module")
def breather_params():
    return ModelParams(L=600, t=1.0, V=0.65)


def test_breather_n2_single_bound_mode(breather_params):
    traj, rep = run_breather(PhaseImprint(n=2, width=3.0, centers=(300.0,)),
                             breather_params)
    assert rep.count == 1
    assert rep.verdict == "bound"
    assert rep.n_cycles >= 5
    assert rep.period_std / rep.period_mean < 0.05


def test_breather_n4_two_modes(breather_params):
    traj, rep = run_breather(PhaseImprint(n=4, width=3.0, centers=(300.0,)),
                             breather_params)
    assert rep.count == 2
    assert rep.verdict == "bound"


def test_breather_n0_trivial(breather_params):
    traj, rep = run_breather(PhaseImprint(n=0, width=3.0, centers=(300.0,)),
                             breather_params,
                             config=IntegratorConfig(t_end=20.0, dt=0.01,
                                                     frame_stride=50))
    assert rep.count == 0
    assert np.max(np.abs(traj.densities() - 0.5)) < 1e-12


def test_breather_dissociates_at_strong_coupling():
    p = ModelParams(L=600, t=1.0, V=0.9)
    traj, rep = run_breather(PhaseImprint(n=2, width=3.0, centers=(300.0,)), p)
    assert rep.verdict == "dissociated"


# ---- trains ----------------------------------------------------------------------

def test_commensurate_length():
    p = params()
    L = commensurate_length(0.2, (1.05, 1.15), p)
    for vb in (1.05, 1.15):
        from hcbsol import soliton_width
        period = 2 * math.pi * soliton_width(0.2, vb, p).value
        n = round(L / period)
        assert abs(L / (n * period) - 1.0) <= 0.02


def test_train_collision_transmits():
    p = params()
    traj, rep = run_train_collision(0.2, 1.05, 1.15, p, t_end=350.0)
    assert rep.cls == "T"
    assert min(rep.survivals) >= 0.5
    assert all(rep.directions_ok)


# ---- threshold and sweep ----------------------------------------------------------

def test_transmission_threshold_bracket():
    p = params()
    lo, hi = find_transmission_threshold(0.45, p, v_lo=0.5, v_hi=0.85, dv=0.04)
    assert 0.5 <= lo < hi <= 0.85
    assert hi - lo <= 0.04


def test_sweep_grid_labels():
    p = params()
    grid = sweep_phase_diagram([0.45], [0.5, 0.85], p)
    assert grid.labels[0] == ["R", "T"]
    assert grid.sound_speed_curve[0] == pytest.approx(sound_speed(0.45, p))
