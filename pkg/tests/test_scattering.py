import numpy as np
import pytest

from jacobi_reflect import (Background, BoundaryPoint, JacobiSpec, NoOpenChannel,
                            PoleHit,
                            ScatteringMatrix, channel_weight, green_diag,
                            green_diag_grid, reflection_transmission,
                            scattering_grid, scattering_matrix, unitarity_defect,
                            unitarity_defect_grid)

from util import free_spec, period2_spec, random_spec, single_site_spec


def test_free_green_fixtures():
    spec = free_spec()
    g = green_diag(spec, 0, BoundaryPoint.upper(1j)).value
    np.testing.assert_allclose(g, 1j / np.sqrt(5.0), atol=1e-14)
    g = green_diag(spec, 0, BoundaryPoint.real(0.0)).value
    np.testing.assert_allclose(g, 0.5j, atol=1e-14)
    g = green_diag(spec, 0, BoundaryPoint.real(1.0)).value
    np.testing.assert_allclose(g, 1j / np.sqrt(3.0), atol=1e-14)


def test_single_site_green():
    g = green_diag(single_site_spec(), 0, BoundaryPoint.real(0.0)).value
    np.testing.assert_allclose(g, (1.0 + 2.0j) / 5.0, atol=1e-14)


def test_free_scattering_is_pure_transmission():
    s = scattering_matrix(free_spec(), 0, 0.0)
    np.testing.assert_allclose(s.matrix(), [[0.0, -1.0], [-1.0, 0.0]], atol=1e-14)
    res = scattering_grid(free_spec(), 0, np.linspace(-1.9, 1.9, 201))
    np.testing.assert_allclose(np.abs(res["s_lr"]), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.abs(res["s_ll"]), 0.0, atol=1e-12)


def test_single_site_fixture_probabilities():
    s = scattering_matrix(single_site_spec(), 0, 0.0)
    rt = reflection_transmission(s)
    np.testing.assert_allclose(rt["R_l"], 0.2, atol=1e-12)
    np.testing.assert_allclose(rt["R_r"], 0.2, atol=1e-12)
    np.testing.assert_allclose(rt["T"], 0.8, atol=1e-12)
    np.testing.assert_allclose(s.s_ll, 0.2 + 0.4j, atol=1e-12)
    assert s.open_left and s.open_right


def test_unitarity_over_random_specs():
    rng = np.random.default_rng(31)
    lams = np.linspace(-1.95, 1.95, 301)
    for _ in range(30):
        spec = random_spec(rng)
        res = scattering_grid(spec, int(rng.integers(-3, 4)), lams)
        assert unitarity_defect_grid(res).max() <= 1e-8


def test_symmetry_of_off_diagonal():
    rng = np.random.default_rng(37)
    for _ in range(10):
        spec = random_spec(rng)
        s = scattering_matrix(spec, 0, float(rng.uniform(-1.8, 1.8)))
        assert s.s_lr == s.s_rl


def test_cut_site_invariance_of_moduli():
    rng = np.random.default_rng(41)
    lams = np.linspace(-1.9, 1.9, 96)
    for _ in range(10):
        spec = random_spec(rng)
        base = np.abs(scattering_grid(spec, 0, lams)["s_ll"])
        for n in range(-3, 4):
            here = np.abs(scattering_grid(spec, n, lams)["s_ll"])
            np.testing.assert_allclose(here, base, atol=1e-8)


def test_gap_has_no_open_channel():
    with pytest.raises(NoOpenChannel):
        scattering_matrix(period2_spec(), 0, 0.2)
    with pytest.raises(NoOpenChannel):
        scattering_matrix(free_spec(), 0, 3.0)
    # the gap center is an exact pole of the stripped left m-function
    with pytest.raises(PoleHit):
        scattering_matrix(period2_spec(), 0, 0.0)


def test_channel_weight_examples():
    w = channel_weight(free_spec(), 0, 0.0)
    np.testing.assert_allclose(w.v_l, 1.0 / np.sqrt(np.pi), atol=1e-12)
    np.testing.assert_allclose(w.v_r, 1.0 / np.sqrt(np.pi), atol=1e-12)
    half = JacobiSpec(background=Background.constant(0.5, 0.0))
    w = channel_weight(half, 0, 0.0)
    np.testing.assert_allclose(w.v_l, np.sqrt(2.0 / np.pi), atol=1e-12)


def test_closed_channel_defect_convention():
    # one open channel: the open entry must be unimodular, defect ignores the rest
    s = ScatteringMatrix(n=0, lam=0.0, s_ll=np.exp(0.3j), s_lr=0.0, s_rl=0.0,
                         s_rr=1.0, density_l=0.2, density_r=0.0)
    assert not s.open_right
    assert unitarity_defect(s) <= 1e-15


def test_green_forms_cross_check_on_grid():
    # green_diag_grid runs the two-form consistency check internally
    rng = np.random.default_rng(43)
    lams = np.linspace(-1.9, 1.9, 64)
    for _ in range(20):
        spec = random_spec(rng)
        g = green_diag_grid(spec, int(rng.integers(-2, 3)), lams)
        assert np.isfinite(g).all()
        assert (g.imag >= -1e-12).all()


def test_reflectionless_background_scattering_off_diagonal():
    spec = period2_spec()
    res = scattering_grid(spec, 0, np.array([0.8, 1.0, -1.2]))
    np.testing.assert_allclose(np.abs(res["s_ll"]), 0.0, atol=1e-10)
    np.testing.assert_allclose(np.abs(res["s_lr"]), 1.0, atol=1e-10)
