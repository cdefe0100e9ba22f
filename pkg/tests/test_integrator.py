"""Integrator: RK4 order, conservation, reversal, backends."""

import numpy as np
import pytest

from hcbsol import (ConservationBreach, IntegratorConfig, LatticeState,
                    ModelParams, NonFinite, ParamDomain, SolitonSpec,
                    build_state, evolve, sound_speed, step, uniform_state)
from hcbsol.integrate import ConservationTolerances, advance


def params(L=128, **kw):
    return ModelParams(L=L, t=1.0, V=0.9, **kw)


def soliton_pair(p, rho0=0.45, vbar=0.5, species="bright"):
    specs = [SolitonSpec(species, rho0, vbar, p.L * 0.25),
             SolitonSpec(species, rho0, -vbar, p.L * 0.75)]
    return build_state(specs, p.L, p)


def test_config_domain():
    with pytest.raises(ParamDomain):
        IntegratorConfig(t_end=1.0, dt=0.0)
    with pytest.raises(ParamDomain):
        IntegratorConfig(t_end=1.0, dt=0.1)
    with pytest.raises(ParamDomain):
        IntegratorConfig(t_end=1.0, frame_stride=0)


def test_uniform_fixed_point():
    p = params()
    st = uniform_state(p.L, 0.5, phi0=0.7)
    out = step(st, p, 0.005)
    assert np.allclose(out.delta, st.delta, atol=1e-15)
    assert np.allclose(out.phi, st.phi, atol=1e-15)
    assert out.time == pytest.approx(0.005)


def test_uniform_closed_form_phase_growth():
    # uniform delta0: delta stays, phi grows linearly at (t - V) delta0
    p = params()
    delta0 = 0.3
    st = LatticeState(np.full(p.L, delta0), np.zeros(p.L))
    traj = evolve(st, p, IntegratorConfig(t_end=10.0, dt=0.005, frame_stride=200))
    assert np.allclose(traj.deltas[-1], delta0, atol=1e-12)
    want = (p.t - p.V) * delta0 * 10.0
    assert np.allclose(traj.phis[-1], want, atol=1e-8)


def test_rk4_order():
    # halving dt shrinks the one-interval error by about 2^4
    p = params(L=96)
    st = soliton_pair(params(L=96), vbar=0.85)

    def err(dt, n):
        s = st.copy()
        d, ph = s.delta, s.phi
        advance(d, ph, dt, n, p)
        return d, ph

    ref_d, ref_p = err(0.04 / 16, 16)
    d1, p1 = err(0.04, 1)
    d2, p2 = err(0.02, 2)
    e1 = np.max(np.abs(d1 - ref_d)) + np.max(np.abs(p1 - ref_p))
    e2 = np.max(np.abs(d2 - ref_d)) + np.max(np.abs(p2 - ref_p))
    assert 10.0 < e1 / e2 < 24.0


def test_zero_length_evolution():
    p = params()
    st = uniform_state(p.L, 0.4)
    traj = evolve(st, p, IntegratorConfig(t_end=0.0, dt=0.01))
    assert traj.n_frames == 1
    assert np.array_equal(traj.deltas[0], st.delta)
    assert np.array_equal(traj.phis[0], st.phi)


def test_conservation_long_run():
    # 1e4 steps at dt = 0.01 on a soliton pair
    p = params(L=128)
    st = soliton_pair(p)
    traj = evolve(st, p, IntegratorConfig(t_end=100.0, dt=0.01, frame_stride=500))
    n = np.array([o.particle_number for o in traj.diagnostics])
    e = np.array([o.energy for o in traj.diagnostics])
    assert np.max(np.abs(n - n[0])) < 1e-10
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-7


def test_time_reversal():
    p = params(L=128)
    st = soliton_pair(p)
    fwd = evolve(st, p, IntegratorConfig(t_end=10.0, dt=0.005, frame_stride=400))
    turned = LatticeState(fwd.deltas[-1].copy(), -fwd.phis[-1], 0.0)
    back = evolve(turned, p, IntegratorConfig(t_end=10.0, dt=0.005, frame_stride=400))
    assert np.max(np.abs(back.deltas[-1] - st.delta)) < 1e-6


def test_particle_hole_symmetry():
    p = params(L=128)
    st = soliton_pair(p, species="bright")
    mirror = LatticeState(-st.delta, -st.phi, 0.0)
    cfg = IntegratorConfig(t_end=10.0, dt=0.005, frame_stride=400)
    t1 = evolve(st, p, cfg)
    t2 = evolve(mirror, p, cfg)
    assert np.max(np.abs(t2.deltas[-1] + t1.deltas[-1])) < 1e-8


def test_traveling_peak_speed_open_chain():
    # single bright soliton on an open chain moves at vbar * c_s
    p = params(L=300, boundary="open")
    spec = SolitonSpec("bright", 0.45, 0.5, 100.0)
    st = build_state([spec], p.L, p)
    traj = evolve(st, p, IntegratorConfig(t_end=50.0, dt=0.005, frame_stride=1000))
    rho = traj.densities()
    pos = [np.argmax(r) for r in rho]
    moved = pos[-1] - pos[0]
    want = 0.5 * sound_speed(0.45, p) * 50.0
    assert abs(moved - want) <= 1.0  # site resolution


def test_conservation_breach_raised():
    p = params(L=128)
    st = soliton_pair(p)
    tight = IntegratorConfig(t_end=5.0, dt=0.01, frame_stride=100,
                             tolerances=ConservationTolerances(number=1e-18,
                                                               energy=1e-18))
    with pytest.raises(ConservationBreach):
        evolve(st, p, tight)


def test_non_finite_detected():
    p = params(L=64)
    st = uniform_state(64, 0.4)
    st.delta[3] = np.nan  # corrupt after construction
    with pytest.raises(NonFinite):
        step(st, p, 0.005)


def test_backends_bit_equal():
    p = params(L=96)
    st = soliton_pair(params(L=96))
    da, pa = st.delta.copy(), st.phi.copy()
    db, pb = st.delta.copy(), st.phi.copy()
    advance(da, pa, 0.005, 200, p, backend="numba")
    advance(db, pb, 0.005, 200, p, backend="numpy")
    assert np.array_equal(da, db)
    assert np.array_equal(pa, pb)


def test_backends_bit_equal_open():
    p = params(L=96, boundary="open")
    spec = SolitonSpec("dark", 0.45, 0.5, 48.0)
    st = build_state([spec], p.L, p)
    da, pa = st.delta.copy(), st.phi.copy()
    db, pb = st.delta.copy(), st.phi.copy()
    advance(da, pa, 0.005, 200, p, backend="numba")
    advance(db, pb, 0.005, 200, p, backend="numpy")
    assert np.array_equal(da, db)
    assert np.array_equal(pa, pb)


def test_observer_called_per_frame():
    p = params()
    st = uniform_state(p.L, 0.5)
    seen = []
    evolve(st, p, IntegratorConfig(t_end=1.0, dt=0.01, frame_stride=20),
           observer=lambda t, s, o: seen.append(t))
    assert seen == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
