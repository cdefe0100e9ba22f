"""Soliton factory: closed forms, profiles, builders, imprints, trains."""

import math

import numpy as np
import pytest
from scipy.signal import find_peaks

from hcbsol import (HardCoreViolation, IntegratorConfig, ModelParams,
                    NonUniformInput, ParamDomain, PeriodMismatch, PhaseImprint,
                    SeparationTooSmall, SolitonSpec, WindingMismatch,
                    build_state, density_profile, evolve, phase_imprint,
                    phase_jump, phase_profile, signed_phase_jump,
                    soliton_width, sound_speed, train_state, uniform_state)


def params(L=400, **kw):
    return ModelParams(L=L, t=1.0, V=0.9, **kw)


P = params()


# ---- sound speed ------------------------------------------------------------

def test_sound_speed_value():
    # direct evaluation: sqrt(2 * 0.2475 * 0.1)
    assert sound_speed(0.45, P) == pytest.approx(math.sqrt(2 * 0.2475 * 0.1), abs=1e-15)
    assert sound_speed(0.45, P) == pytest.approx(0.2224859546128699, abs=1e-12)


def test_sound_speed_vanishes_at_band_edges():
    assert sound_speed(1e-9, P) < 1e-4
    assert sound_speed(1 - 1e-9, P) < 1e-4


def test_sound_speed_particle_hole_symmetric():
    for r in (0.1, 0.25, 0.4):
        assert sound_speed(r, P) == pytest.approx(sound_speed(1 - r, P), abs=1e-15)


def test_sound_speed_domain():
    with pytest.raises(ParamDomain):
        sound_speed(0.0, P)


# ---- width ------------------------------------------------------------------

def test_width_half_filling_value():
    w = soliton_width(0.5, 0.0, P)
    assert not w.periodic
    assert w.value == pytest.approx(math.sqrt(4.5), abs=1e-12)  # 2.1213


def test_width_gamma_scaling():
    g0 = soliton_width(0.37, 0.0, P).value
    for v in (0.3, 0.6, 0.9):
        want = g0 / math.sqrt(1 - v * v)
        assert soliton_width(0.37, v, P).value == pytest.approx(want, rel=1e-12)


def test_width_particle_hole_symmetric():
    assert soliton_width(0.3, 0.5, P).value == pytest.approx(
        soliton_width(0.7, 0.5, P).value, rel=1e-12)


def test_width_periodic_flag_and_degenerate_speed():
    assert soliton_width(0.2, 1.3, P).periodic
    with pytest.raises(ParamDomain):
        soliton_width(0.2, 1.0, P)


# ---- density profile --------------------------------------------------------

def test_half_filling_profile_touches_band_edges():
    bright = SolitonSpec("bright", 0.5, 0.0, 0.0)
    dark = SolitonSpec("dark", 0.5, 0.0, 0.0)
    assert density_profile(np.array([0.0]), bright, P)[0] == pytest.approx(0.5, abs=1e-12)
    assert density_profile(np.array([0.0]), dark, P)[0] == pytest.approx(-0.5, abs=1e-12)


def test_profile_decays():
    spec = SolitonSpec("bright", 0.3, 0.5, 0.0)
    f = density_profile(np.array([0.0, 30.0, 80.0]), spec, P)
    assert f[0] > 0.1
    assert abs(f[1]) < 1e-4
    assert abs(f[2]) < 1e-12


def test_duality_identity_pointwise():
    # f_bright(z, rho0) = -f_dark(z, 1 - rho0), both branches, to 1e-12
    z = np.linspace(-20, 20, 401)
    for rho0 in (0.2, 0.3, 0.45):
        for v in (0.0, 0.35, 0.7):
            fb = density_profile(z, SolitonSpec("bright", rho0, v, 0.0), P)
            fd = density_profile(z, SolitonSpec("dark", 1 - rho0, v, 0.0), P)
            assert np.max(np.abs(fb + fd)) < 1e-12
            fd2 = density_profile(z, SolitonSpec("dark", rho0, v, 0.0), P)
            fb2 = density_profile(z, SolitonSpec("bright", 1 - rho0, v, 0.0), P)
            assert np.max(np.abs(fd2 + fb2)) < 1e-12


def test_bright_crosses_half_filling():
    # bright profiles at rho0 < 1/2 always reach past rho = 1/2
    for rho0 in (0.2, 0.35, 0.45):
        for v in (0.0, 0.5, 0.9):
            spec = SolitonSpec("bright", rho0, v, 0.0)
            peak = rho0 + density_profile(np.array([0.0]), spec, P)[0]
            assert peak > 0.5


def test_amplitude_limits_near_sound_speed():
    # bright amplitude persists as vbar -> 1 at rho0 < 1/2; dark vanishes at 1/2
    z0 = np.array([0.0])
    fb = density_profile(z0, SolitonSpec("bright", 0.3, 0.999, 0.0), P)[0]
    assert fb > 0.35  # -> 1 - 2 rho0 = 0.4
    fd = density_profile(z0, SolitonSpec("dark", 0.5, 0.999, 0.0), P)[0]
    assert abs(fd) < 0.05


def test_localized_profile_rejects_supersonic():
    with pytest.raises(ParamDomain):
        density_profile(np.array([0.0]), SolitonSpec("bright", 0.2, 1.4, 0.0), P)


def test_fwhm_tracks_width_parameter():
    # FWHM / Gamma is v-independent at half filling (where the profile is a
    # pure sech) and stays so within 2% nearby; the ratio drifts more at low
    # filling where the cosh offset term competes
    z = np.linspace(-40, 40, 160001)
    for rho0 in (0.45, 0.5):
        for species in ("bright", "dark"):
            ratios = []
            for v in (0.0, 0.3, 0.6):
                spec = SolitonSpec(species, rho0, v, 0.0)
                f = np.abs(density_profile(z, spec, P))
                half = np.where(f >= 0.5 * f.max())[0]
                fwhm = z[half[-1]] - z[half[0]]
                ratios.append(fwhm / soliton_width(rho0, v, P).value)
            assert max(ratios) / min(ratios) - 1 < 0.02


# ---- phase jump -------------------------------------------------------------

def test_phase_jump_half_filling_value():
    # asin term vanishes: dphi = pi sqrt(1 - 2 c_s^2) = pi sqrt(0.9)
    for species in ("bright", "dark"):
        spec = SolitonSpec(species, 0.5, 0.5, 0.0)
        assert phase_jump(spec, P) == pytest.approx(math.pi * math.sqrt(0.9), abs=1e-12)
        assert phase_jump(spec, P) == pytest.approx(2.9803764797, abs=1e-9)


def test_phase_jump_zero_speed():
    for rho0 in (0.2, 0.35, 0.45):
        want = math.pi * math.sqrt(1 - 2 * sound_speed(rho0, P) ** 2)
        for species in ("bright", "dark"):
            spec = SolitonSpec(species, rho0, 0.0, 0.0)
            assert phase_jump(spec, P) == pytest.approx(want, abs=1e-12)


def test_phase_jump_sum_identity():
    for rho0 in (0.2, 0.45):
        for v in (0.1, 0.5, 0.85):
            tot = (phase_jump(SolitonSpec("bright", rho0, v, 0.0), P)
                   + phase_jump(SolitonSpec("dark", rho0, v, 0.0), P))
            want = 2 * math.pi * math.sqrt(1 - 2 * sound_speed(rho0, P) ** 2)
            assert tot == pytest.approx(want, rel=1e-12)


def test_signed_jump_branch_continuation():
    # past vbar = 1/sqrt(1+(1-2 rho0)^2) the arcsin argument turns back from 1
    # and the profile-integrated jump follows the second branch
    spec = SolitonSpec("bright", 0.3, 0.95, 0.0)
    z = np.linspace(-250, 250, 200001)
    phi = phase_profile(z, spec, P)
    assert phi[-1] - phi[0] == pytest.approx(signed_phase_jump(spec, P), rel=1e-3)
    assert signed_phase_jump(spec, P) > phase_jump(spec, P)  # branches differ here


def test_signed_jump_conventions():
    b_right = signed_phase_jump(SolitonSpec("bright", 0.45, 0.5, 0.0), P)
    b_left = signed_phase_jump(SolitonSpec("bright", 0.45, -0.5, 0.0), P)
    d_right = signed_phase_jump(SolitonSpec("dark", 0.45, 0.5, 0.0), P)
    assert b_right > 0 and d_right < 0
    assert b_right == pytest.approx(-b_left, rel=1e-15)
    # mirror bright-dark pair at half filling sums to ~2 pi
    s = (signed_phase_jump(SolitonSpec("bright", 0.5, 0.5, 0.0), P)
         + signed_phase_jump(SolitonSpec("dark", 0.5, -0.5, 0.0), P))
    assert s == pytest.approx(2 * math.pi * math.sqrt(0.9), rel=1e-12)
    # vbar = 0 sign picked by phase_sign
    up = signed_phase_jump(SolitonSpec("dark", 0.45, 0.0, 0.0, phase_sign=+1), P)
    dn = signed_phase_jump(SolitonSpec("dark", 0.45, 0.0, 0.0, phase_sign=-1), P)
    assert up == pytest.approx(-dn, rel=1e-15) and up < 0


# ---- phase profile ----------------------------------------------------------

@pytest.mark.parametrize("species", ["bright", "dark"])
@pytest.mark.parametrize("rho0,vbar", [(0.45, 0.5), (0.45, 0.85), (0.3, 0.5),
                                       (0.5, 0.3), (0.2, 0.7)])
def test_phase_profile_integrates_to_closed_form(species, rho0, vbar):
    spec = SolitonSpec(species, rho0, vbar, 0.0)
    G = soliton_width(rho0, vbar, P).value
    z = np.linspace(-50 * G, 50 * G, 4001)
    phi = phase_profile(z, spec, P)
    total = phi[-1] - phi[0]
    want = signed_phase_jump(spec, P)
    assert total == pytest.approx(want, rel=0.01)


def test_phase_profile_stationary_step():
    spec = SolitonSpec("dark", 0.45, 0.0, 0.0)
    z = np.linspace(-10, 10, 21)
    phi = phase_profile(z, spec, P)
    jump = signed_phase_jump(spec, P)
    assert np.allclose(phi + phi[::-1], 0.0, atol=1e-15)  # antisymmetric
    assert phi[-1] - phi[0] == pytest.approx(jump, rel=1e-12)


def test_phase_profile_mirror_pair_winding_cancels():
    a = SolitonSpec("bright", 0.45, 0.5, 0.0)
    b = SolitonSpec("bright", 0.45, -0.5, 0.0)
    z = np.linspace(-100, 100, 2001)
    total = (phase_profile(z, a, P)[-1] - phase_profile(z, a, P)[0]
             + phase_profile(z, b, P)[-1] - phase_profile(z, b, P)[0])
    assert abs(total) < 1e-10


# ---- build_state ------------------------------------------------------------

def test_build_single_dark_stationary():
    spec = SolitonSpec("dark", 0.45, 0.0, 200.0)
    st = build_state([spec], 400, P, winding="snap")
    rho = 0.5 * (1 - st.delta)
    assert np.argmin(rho) == 200
    assert st.delta[200] == 1.0          # exact node
    assert st.delta[0] == pytest.approx(0.1, abs=1e-12)   # far field 1 - 2 rho0


def test_build_mirror_pair_half_filling_number():
    # bright + dark mirror pair: perturbations cancel in the total number
    specs = [SolitonSpec("bright", 0.5, 0.5, 100.0),
             SolitonSpec("dark", 0.5, -0.5, 300.0)]
    st = build_state(specs, 400, P, polish=False, winding="snap")
    assert np.sum(0.5 * (1 - st.delta)) == pytest.approx(200.0, abs=1e-9)


def test_build_requires_common_background():
    specs = [SolitonSpec("bright", 0.45, 0.5, 100.0),
             SolitonSpec("bright", 0.40, -0.5, 300.0)]
    with pytest.raises(ParamDomain):
        build_state(specs, 400, P)


def test_build_separation_guard():
    specs = [SolitonSpec("bright", 0.45, 0.5, 100.0),
             SolitonSpec("bright", 0.45, -0.5, 108.0)]
    with pytest.raises(SeparationTooSmall):
        build_state(specs, 400, P)


def test_build_winding_guard_and_snap():
    lone = [SolitonSpec("bright", 0.45, 0.5, 200.0)]
    with pytest.raises(WindingMismatch):
        build_state(lone, 400, P)
    st = build_state(lone, 400, P, winding="snap")
    seam = st.phi[0] - st.phi[-1]  # implied seam difference
    dphi = np.diff(st.phi)
    total = np.sum(dphi) + seam
    assert abs(total % (2 * math.pi)) < 1e-9 or \
        abs(total % (2 * math.pi) - 2 * math.pi) < 1e-9


def test_build_open_chain_no_winding_constraint():
    p = params(L=400, boundary="open")
    st = build_state([SolitonSpec("bright", 0.45, 0.5, 200.0)], 400, p)
    jump = st.phi[-1] - st.phi[0]
    want = signed_phase_jump(SolitonSpec("bright", 0.45, 0.5, 200.0), P)
    assert jump == pytest.approx(want, rel=0.03)


def test_build_hard_core_guard():
    # two bright solitons stacked close enough to overflow rho = 1 trip
    # either the separation or the hard-core guard
    specs = [SolitonSpec("bright", 0.45, 0.0, 100.0),
             SolitonSpec("bright", 0.45, 0.0, 113.0)]
    with pytest.raises((HardCoreViolation, SeparationTooSmall)):
        build_state(specs, 400, P)


def test_polished_profile_stays_near_analytic():
    from hcbsol.solitons import _traveling_wave
    spec = SolitonSpec("bright", 0.45, 0.5, 0.0)
    prof = _traveling_wave(spec, P)
    assert prof.polished
    assert prof.analytic_distance < 0.05


def test_rigid_propagation_quick():
    # co-moving density change < 2% over 25 time units (full grid in acceptance)
    p = params(L=256)
    specs = [SolitonSpec("dark", 0.45, 0.85, 64.0),
             SolitonSpec("dark", 0.45, -0.85, 192.0)]
    st = build_state(specs, 256, p)
    traj = evolve(st, p, IntegratorConfig(t_end=25.0, dt=0.005, frame_stride=1000))
    v = 0.85 * sound_speed(0.45, p)
    shift = v * 25.0
    x = np.arange(256)
    rho0_frame = traj.densities()[0]
    rhoN = traj.densities()[-1]
    # compare around soliton 1 shifted by the analytic displacement
    ref = np.interp((x - shift) % 256, x, rho0_frame)
    mask = np.abs((x - (64 + shift) + 128) % 256 - 128) < 40
    l2 = np.sqrt(np.sum((rhoN[mask] - ref[mask]) ** 2)
                 / np.sum((ref[mask] - 0.45) ** 2))
    assert l2 < 0.02


# ---- trains -----------------------------------------------------------------

def test_train_spatial_period():
    p = params(L=400)
    spec = SolitonSpec("bright", 0.1, 1.1, 0.0)
    st = train_state(spec, 400, p)
    rho = 0.5 * (1 - st.delta)
    want = 2 * math.pi * soliton_width(0.1, 1.1, p).value
    peaks, _ = find_peaks(rho)
    gaps = np.diff(peaks)
    assert np.all(np.abs(gaps - want) <= 1.0)
    assert np.min(rho) >= 0.0 and np.max(rho) <= 1.0


def test_train_width_diverges_at_sound_speed():
    assert soliton_width(0.1, 1.02, P).value > soliton_width(0.1, 1.3, P).value * 3


def test_train_domain_errors():
    with pytest.raises(ParamDomain):
        train_state(SolitonSpec("bright", 0.1, 0.9, 0.0), 400, P)  # subsonic
    with pytest.raises(ParamDomain):
        train_state(SolitonSpec("dark", 0.1, 1.1, 0.0), 400, P)    # wrong branch
    with pytest.raises(ParamDomain):
        # beyond the real-train ceiling vbar^2 <= 1 + (1-2rho0)^2/(4 rho rho_h)
        train_state(SolitonSpec("bright", 0.45, 1.2, 0.0), 400, P)


def test_train_period_mismatch():
    p = params(L=64)
    # period ~ 50 sites cannot fit 64 sites within 2% strain
    with pytest.raises(PeriodMismatch):
        train_state(SolitonSpec("bright", 0.1, 1.1, 0.0), 64, p)


def test_train_zero_ring_winding():
    p = params(L=400)
    st = train_state(SolitonSpec("bright", 0.1, 1.1, 200.0), 400, p)
    seam = st.phi[0] - st.phi[-1]
    total = np.sum(np.diff(st.phi)) + seam
    assert abs(total) < 1e-6


# ---- phase imprint ----------------------------------------------------------

def test_imprint_adds_tanh_leaves_density():
    st = uniform_state(200, 0.5)
    imp = PhaseImprint(n=2, width=3.0, centers=(100.0,))
    out = phase_imprint(st, imp)
    assert np.array_equal(out.delta, st.delta)
    x = np.arange(200)
    want = 2 * math.pi * np.tanh((x - 100.0) / 3.0)
    assert np.allclose(out.phi, want, atol=1e-12)


def test_imprint_requires_uniform_density():
    st = build_state([SolitonSpec("dark", 0.45, 0.0, 200.0)], 400, P,
                     winding="snap")
    with pytest.raises(NonUniformInput):
        phase_imprint(st, PhaseImprint(n=2, width=3.0, centers=(100.0,)))


def test_imprint_validation():
    with pytest.raises(ParamDomain):
        PhaseImprint(n=3, width=3.0, centers=(50.0,))
    with pytest.raises(ParamDomain):
        PhaseImprint(n=2, width=0.0, centers=(50.0,))
    with pytest.raises(ParamDomain):
        PhaseImprint(n=2, width=3.0, centers=(50.0, 58.0))


def test_imprint_n0_stays_stationary():
    p = params(L=64)
    st = phase_imprint(uniform_state(64, 0.5),
                       PhaseImprint(n=0, width=3.0, centers=(32.0,)))
    traj = evolve(st, p, IntegratorConfig(t_end=5.0, dt=0.01, frame_stride=100))
    assert np.max(np.abs(traj.deltas[-1] - st.delta)) < 1e-12
