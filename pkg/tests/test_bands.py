import numpy as np
import pytest

from jacobi_reflect import (BandEdge, Background, band_edges, band_intervals,
                            discriminant, in_band_mask)
from jacobi_reflect.bands import guard_edges


def _monodromy(bg, lam):
    m = np.eye(2)
    for k in range(bg.period):
        a_k, b_k = bg.value_at(k + 1)
        a_prev = bg.value_at(k)[0]
        step = np.array([[(lam - b_k) / a_k, -a_prev / a_k], [1.0, 0.0]])
        m = step @ m
    return m


def test_free_band():
    bands = band_intervals(Background.free())
    assert len(bands) == 1
    np.testing.assert_allclose(bands[0], (-2.0, 2.0), atol=1e-12)


def test_constant_band_scales():
    bands = band_intervals(Background.constant(0.5, 0.25))
    np.testing.assert_allclose(bands[0], (0.25 - 1.0, 0.25 + 1.0), atol=1e-12)


def test_period2_bands_and_discriminant():
    bg = Background.periodic((1.0, 0.5), (0.0, 0.0))
    bands = band_intervals(bg)
    np.testing.assert_allclose(bands, [(-1.5, -0.5), (0.5, 1.5)], atol=1e-10)
    # closed form: trace of the monodromy over one cell divided by prod(a)
    poly = discriminant(bg)
    lams = np.linspace(-3, 3, 41)
    np.testing.assert_allclose(poly(lams), 2.0 * lams**2 - 2.5, atol=1e-12)


def test_discriminant_matches_monodromy_trace():
    rng = np.random.default_rng(5)
    for _ in range(15):
        p = int(rng.integers(1, 5))
        bg = Background.periodic(tuple(rng.uniform(0.5, 2.0, p)),
                                 tuple(rng.uniform(-1.0, 1.0, p)))
        poly = discriminant(bg)
        for lam in rng.uniform(-4.0, 4.0, 5):
            m = _monodromy(bg, lam)
            np.testing.assert_allclose(np.linalg.det(m), 1.0, atol=1e-10)
            np.testing.assert_allclose(poly(lam), np.trace(m), atol=1e-9)


def test_edges_have_unimodular_multipliers():
    bg = Background.periodic((1.0, 0.5), (0.0, 0.0))
    poly = discriminant(bg)
    for edge in band_edges(bg):
        assert abs(abs(poly(edge)) - 2.0) <= 1e-8
        mu = np.linalg.eigvals(_monodromy(bg, edge))
        np.testing.assert_allclose(np.abs(mu), 1.0, atol=1e-6)


def test_in_band_mask():
    bg = Background.periodic((1.0, 0.5), (0.0, 0.0))
    bands = band_intervals(bg)
    lams = np.array([-2.0, -1.0, 0.0, 0.7, 1.2, 1.6])
    mask = in_band_mask(bands, lams)
    assert mask.tolist() == [False, True, False, True, True, False]
    poly = discriminant(bg)
    inside = np.abs(poly(lams)) <= 2.0
    assert mask.tolist() == inside.tolist()


def test_guard_edges():
    bands = band_intervals(Background.free())
    with pytest.raises(BandEdge):
        guard_edges(bands, np.array([2.0 - 1e-9]))
    with pytest.raises(BandEdge):
        guard_edges(bands, np.array([-2.0 + 1e-9]))
    guard_edges(bands, np.array([0.0, 1.9, -1.9]))


def test_bands_sorted_disjoint():
    rng = np.random.default_rng(13)
    for _ in range(10):
        p = int(rng.integers(1, 6))
        bg = Background.periodic(tuple(rng.uniform(0.5, 2.0, p)),
                                 tuple(rng.uniform(-1.0, 1.0, p)))
        bands = band_intervals(bg)
        flat = [x for band in bands for x in band]
        assert flat == sorted(flat)
        assert all(hi > lo for lo, hi in bands)
