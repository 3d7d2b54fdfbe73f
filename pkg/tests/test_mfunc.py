import numpy as np
import pytest

from jacobi_reflect import (BandEdge, Background, BoundaryPoint, JacobiSpec,
                            ac_density, m_left, m_left_boundary, m_left_grid,
                            m_oracle_truncated, m_right, m_right_boundary,
                            m_right_grid, strip_once, tail_m)

from util import free_spec, period2_spec, random_spec, single_site_spec

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def test_free_fixtures_upper_half_plane():
    spec = free_spec()
    # m(z) = (-z + sqrt(z^2 - 4)) / 2 with the Herglotz branch
    m = m_right(spec, 0, BoundaryPoint.upper(1j)).value
    np.testing.assert_allclose(m, GOLDEN * 1j, atol=1e-14)
    m = m_left(spec, 0, BoundaryPoint.upper(1j)).value
    np.testing.assert_allclose(m, GOLDEN * 1j, atol=1e-14)


def test_free_fixtures_boundary():
    spec = free_spec()
    m0 = m_right(spec, 0, BoundaryPoint.real(0.0)).value
    np.testing.assert_allclose(m0, 1j, atol=1e-14)
    m1 = m_right(spec, 0, BoundaryPoint.real(1.0)).value
    np.testing.assert_allclose(m1, (-1.0 + 1j * np.sqrt(3.0)) / 2.0, atol=1e-14)
    # outside the band both roots are real; continuity picks the Herglotz one
    m3 = m_right(spec, 0, BoundaryPoint.real(3.0)).value
    np.testing.assert_allclose(m3, -(3.0 - np.sqrt(5.0)) / 2.0, atol=1e-14)
    assert abs(m3.imag) <= 1e-14


def test_single_site_left_fixture():
    spec = single_site_spec()
    m = m_left(spec, 1, BoundaryPoint.real(0.0)).value
    np.testing.assert_allclose(m, (1.0 + 1j) / 2.0, atol=1e-14)


def test_strip_once_relation():
    rng = np.random.default_rng(2)
    for _ in range(50):
        m = complex(rng.normal(), abs(rng.normal()) + 0.1)
        a = rng.uniform(0.5, 2.0)
        b = rng.uniform(-1.0, 1.0)
        z = complex(rng.normal(), rng.uniform(0.1, 1.0))
        out = strip_once(m, a, b, z)
        np.testing.assert_allclose(out * (b - z - a * a * m), 1.0, atol=1e-12)


def test_herglotz_positivity():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        spec = random_spec(rng)
        z = complex(rng.uniform(-3, 3), rng.uniform(1e-3, 1.0))
        n = int(rng.integers(-5, 6))
        assert m_right(spec, n, BoundaryPoint.upper(z)).value.imag > 0
        assert m_left(spec, n, BoundaryPoint.upper(z)).value.imag > 0


def test_reflection_principle_via_side():
    spec = single_site_spec()
    plus = m_right(spec, 0, BoundaryPoint.real(0.5, side="+")).value
    minus = m_right(spec, 0, BoundaryPoint.real(0.5, side="-")).value
    assert minus == np.conj(plus)


def test_truncated_oracle():
    rng = np.random.default_rng(23)
    for _ in range(10):
        spec = random_spec(rng)
        z = complex(rng.uniform(-2, 2), 1e-2)
        n = int(rng.integers(-3, 4))
        exact = m_right(spec, n, BoundaryPoint.upper(z)).value
        oracle = m_oracle_truncated(spec, n, z, 4000, side="right")
        assert abs(exact - oracle) <= 1e-6
        exact = m_left(spec, n, BoundaryPoint.upper(z)).value
        oracle = m_oracle_truncated(spec, n, z, 4000, side="left")
        assert abs(exact - oracle) <= 1e-6


def test_free_band_unimodularity():
    spec = free_spec()
    lams = np.arange(-1.999, 1.999 + 5e-4, 1e-3)
    m = m_right_boundary(spec, 0, lams)
    np.testing.assert_allclose(np.abs(m), 1.0, atol=1e-12)


def test_stripping_consistency_grids():
    # m at neighboring cut sites must be related by one stripping step
    rng = np.random.default_rng(29)
    zs = np.array([0.3 + 0.2j, -1.1 + 0.05j, 1.7 + 1.0j])
    for _ in range(20):
        spec = random_spec(rng)
        for n in (-2, 0, 3):
            m_n = m_right_grid(spec, n, zs)
            m_prev = m_right_grid(spec, n - 1, zs)
            a_n, b_n = spec.a(n), spec.b(n)
            expect = 1.0 / (b_n - zs - a_n * a_n * m_n)
            np.testing.assert_allclose(m_prev, expect, rtol=1e-10)
            m_l = m_left_grid(spec, n, zs)
            m_next = m_left_grid(spec, n + 1, zs)
            a_prev, b_n = spec.a(n - 1), spec.b(n)
            expect = 1.0 / (b_n - zs - a_prev * a_prev * m_l)
            np.testing.assert_allclose(m_next, expect, rtol=1e-10)


def test_tail_periodic_fixed_point():
    # the tail value must be invariant under stripping one full period
    bg = Background.periodic((1.0, 0.5), (0.0, 0.0))
    z = 0.9 + 0.3j
    for cut in (0, 1):
        m = tail_m(bg, cut, np.array([z]), side="right")[0]
        stripped = m
        for k in range(cut + 2, cut, -1):
            a_k, b_k = bg.value_at(k)
            stripped = 1.0 / (b_k - z - a_k * a_k * stripped)
        np.testing.assert_allclose(stripped, m, rtol=1e-12)


def test_band_edge_guard():
    spec = free_spec()
    with pytest.raises(BandEdge):
        m_right_boundary(spec, 0, np.array([2.0 - 1e-8]))


def test_ac_density_positive_in_band_zero_in_gap():
    spec = period2_spec()
    rho_band = ac_density(spec, 0, np.array([0.8, 1.1, -0.8]))
    assert (rho_band > 1e-3).all()
    rho_gap = ac_density(spec, 0, np.array([0.0, 2.5, -2.5]))
    assert (np.abs(rho_gap) <= 1e-12).all()
