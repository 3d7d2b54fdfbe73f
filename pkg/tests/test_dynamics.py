import numpy as np
import pytest

from jacobi_reflect import (Background, HorizonExceeded, LatticeState,
                            WindowTooSmall, band_intervals, discriminant,
                            dynamical_reflection, evolve, free_propagator_kernel,
                            group_velocity, make_plan, projection_defect,
                            truncate, wave_packet)

from util import free_spec, period2_spec, random_spec, single_site_spec


def test_lattice_state_mass():
    amps = np.zeros(11, dtype=complex)
    amps[2] = 1.0
    state = LatticeState.from_amplitudes(5, amps)
    assert state.site(-3) == 1.0
    assert state.mass(-5, -3) == 1.0
    assert state.mass(-2, 5) == 0.0
    with pytest.raises(ValueError):
        LatticeState.from_amplitudes(5, np.zeros(4))


def test_evolution_is_unitary_and_reversible():
    rng = np.random.default_rng(71)
    spec = random_spec(rng)
    plan = make_plan(spec, 200, 40)
    amps = np.zeros(401, dtype=complex)
    amps[170:231] = rng.normal(size=61) + 1j * rng.normal(size=61)
    amps /= np.linalg.norm(amps)
    state = LatticeState.from_amplitudes(200, amps)
    out = evolve(plan, state, 30.0)
    assert abs(out.norm - 1.0) <= 1e-12
    back = evolve(plan, out, -30.0)
    assert np.abs(back.amplitudes - state.amplitudes).max() <= 1e-12


def test_energy_is_conserved():
    spec = single_site_spec()
    plan = make_plan(spec, 150, 30)
    h = truncate(spec, 150).to_dense()
    amps = np.zeros(301, dtype=complex)
    amps[130:171] = np.exp(-np.linspace(-2, 2, 41) ** 2)
    amps /= np.linalg.norm(amps)
    state = LatticeState.from_amplitudes(150, amps)
    e0 = np.vdot(state.amplitudes, h @ state.amplitudes).real
    out = evolve(plan, state, 40.0)
    e1 = np.vdot(out.amplitudes, h @ out.amplitudes).real
    np.testing.assert_allclose(e1, e0, atol=1e-12)


def test_free_propagation_matches_bessel_kernel():
    N, t = 300, 20.0
    plan = make_plan(free_spec(), N, 0)
    amps = np.zeros(2 * N + 1, dtype=complex)
    amps[N] = 1.0
    out = evolve(plan, LatticeState.from_amplitudes(N, amps), t)
    ks = np.arange(-40, 41)
    expect = np.array([free_propagator_kernel(int(k), t) for k in ks])
    got = np.array([out.site(int(k)) for k in ks])
    np.testing.assert_allclose(got, expect, atol=1e-10)


def test_group_velocity_against_discriminant():
    # v = 2 p sin(kappa) / |disc'(lambda)|, kappa from disc = 2 cos(p kappa)
    for bg, lam in [(Background.free(), 0.0), (Background.free(), 1.0),
                    (Background.periodic((1.0, 0.5), (0.0, 0.0)), 0.85),
                    (Background.periodic((1.0, 0.5), (0.0, 0.0)), -1.1)]:
        poly = discriminant(bg)
        p = bg.period
        kappa = np.arccos(np.clip(poly(lam) / 2.0, -1.0, 1.0))
        expect = 2.0 * p * np.sin(kappa) / abs(poly.deriv()(lam))
        np.testing.assert_allclose(group_velocity(bg, lam), expect, rtol=1e-6)


def test_wave_packet_shape():
    spec = single_site_spec()
    packet = wave_packet(spec, "l", 0.0, 0.05, 800)
    assert abs(packet.norm - 1.0) <= 1e-12
    assert packet.mass(-800, -1) >= 1.0 - 1e-12
    h = truncate(spec, 800)
    # mean energy sits at lambda0 well within the packet width
    dense_apply = (h.diag * packet.amplitudes
                   + np.append(h.offdiag * packet.amplitudes[1:], 0.0)
                   + np.append(0.0, h.offdiag * packet.amplitudes[:-1]))
    e_mean = np.vdot(packet.amplitudes, dense_apply).real
    assert abs(e_mean - 0.0) <= 0.05
    mirrored = wave_packet(spec, "r", 0.0, 0.05, 800)
    assert mirrored.mass(1, 800) >= 1.0 - 1e-12


def test_packet_must_fit_and_stay_in_band():
    with pytest.raises(WindowTooSmall):
        wave_packet(free_spec(), "l", 0.0, 0.05, 60)
    with pytest.raises(ValueError):
        wave_packet(free_spec(), "l", 1.99, 0.05, 800)


def test_horizon_refuses_long_times():
    plan = make_plan(free_spec(), 100, 20)
    amps = np.zeros(201, dtype=complex)
    amps[100] = 1.0
    state = LatticeState.from_amplitudes(100, amps)
    with pytest.raises(HorizonExceeded):
        evolve(plan, state, plan.t_max * 1.01)


def test_single_site_dynamical_reflection():
    out = dynamical_reflection(single_site_spec(), 0.0, 0.05, 1000)
    np.testing.assert_allclose(out["R_dyn"], 0.2, atol=5e-3)
    np.testing.assert_allclose(out["T_dyn"], 0.8, atol=5e-3)
    assert out["abs_error"] <= 1e-3
    assert out["site0_mass"] <= 1e-4
    assert out["R_dyn"] + out["T_dyn"] + out["site0_mass"] <= 1.0 + 1e-10


def test_free_packet_transmits():
    # N must leave the transmitted packet several widths past the cut at t*
    out = dynamical_reflection(free_spec(), 0.0, 0.05, 1000)
    assert out["T_dyn"] >= 0.999
    assert out["R_dyn"] <= 1e-3


def test_projection_defect_small():
    assert projection_defect(free_spec(), 0.0, 0.05, 600) <= 1e-8
    assert projection_defect(single_site_spec(), 0.0, 0.05, 600) <= 1e-8


def test_band_check_respects_background():
    spec = period2_spec()
    bands = band_intervals(spec.background)
    assert any(lo < 0.85 < hi for lo, hi in bands)
    with pytest.raises(ValueError):
        wave_packet(spec, "l", 0.0, 0.05, 800)   # gap energy
