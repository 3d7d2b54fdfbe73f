"""Floquet discriminant and spectral bands of the periodic background.

The transfer step across site ``k`` sends ``(u_k, u_{k-1})`` to
``(u_{k+1}, u_k)``:

    T_k(lambda) = [[(lambda - b_k)/a_k, -a_{k-1}/a_k], [1, 0]]

The discriminant is the trace of the one-period product.  The essential
spectrum of the unperturbed operator is ``{|Delta| <= 2}``, a finite union
of closed bands.  Band edges are the roots of ``Delta -+ 2``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .errors import BandEdge

__all__ = [
    "discriminant",
    "band_intervals",
    "band_edges",
    "in_band_mask",
    "guard_edges",
]

_ZERO = Polynomial([0.0])
_ONE = Polynomial([1.0])


@lru_cache(maxsize=None)
def discriminant(background):
    """Trace of the one-period transfer product, as a Polynomial in lambda."""
    p = background.period
    # scaled step S_k = a_k T_k keeps entries polynomial; divide at the end
    prod = [[_ONE, _ZERO], [_ZERO, _ONE]]
    scale = 1.0
    for k in range(p):
        a_k, b_k = background.value_at(k)
        a_km1 = background.value_at(k - 1)[0]
        s = [[Polynomial([-b_k, 1.0]), Polynomial([-a_km1])],
             [Polynomial([a_k]), _ZERO]]
        prod = [[s[0][0] * prod[0][0] + s[0][1] * prod[1][0],
                 s[0][0] * prod[0][1] + s[0][1] * prod[1][1]],
                [s[1][0] * prod[0][0] + s[1][1] * prod[1][0],
                 s[1][0] * prod[0][1] + s[1][1] * prod[1][1]]]
        scale *= a_k
    return (prod[0][0] + prod[1][1]) / scale


def _real_roots(poly):
    r = poly.roots()
    scale = max(1.0, np.abs(r).max()) if r.size else 1.0
    keep = np.abs(r.imag) < 1e-9 * scale
    return np.sort(r[keep].real)


def _polish(poly, x):
    # one-dimensional Newton; harmless at machine-accurate starting points,
    # simple roots gain a couple of digits
    d = poly.deriv()
    for _ in range(3):
        g, gp = poly(x), d(x)
        if gp == 0:
            break
        step = g / gp
        if abs(step) > 1e-3:
            break
        x = x - step
    return x


@lru_cache(maxsize=None)
def band_intervals(background):
    """Closed bands ((lo, hi), ...) in increasing order.

    Touching bands (closed gaps) are merged, so the result is the list of
    maximal intervals of essential spectrum.
    """
    delta = discriminant(background)
    edges = np.concatenate([_real_roots(delta - 2.0), _real_roots(delta + 2.0)])
    edges = np.sort(np.array([_polish(delta - 2.0, x) if abs(delta(x) - 2.0) < abs(delta(x) + 2.0)
                              else _polish(delta + 2.0, x) for x in edges]))
    if edges.size < 2:
        raise ValueError("discriminant produced fewer than two band edges")
    bands = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0:
            continue
        if abs(delta(0.5 * (lo + hi))) <= 2.0:
            if bands and lo <= bands[-1][1] + 1e-12 * max(1.0, abs(lo)):
                bands[-1] = (bands[-1][0], hi)
            else:
                bands.append((lo, hi))
    if not bands:
        raise ValueError("no spectral bands found")
    return tuple(bands)


def band_edges(background):
    """Sorted flat array lo_0, hi_0, lo_1, hi_1, ... of the band endpoints."""
    return np.array([e for band in band_intervals(background) for e in band])


def in_band_mask(bands, lams):
    """Boolean mask of which lambda lie inside a (closed) band."""
    lams = np.asarray(lams, dtype=float)
    flat = np.array([e for band in bands for e in band])
    idx = np.searchsorted(flat, lams, side="left")
    # odd insertion index means strictly inside; catch exact endpoints too
    mask = (idx % 2 == 1) | np.isin(lams, flat)
    return mask


def guard_edges(bands, lams, rel=1e-6):
    """Raise BandEdge if any lambda sits within rel * band width of an edge.

    Real-boundary limits degenerate like an inverse square root at band
    edges, so evaluation there is refused instead of silently losing
    accuracy.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    flat = np.array([e for band in bands for e in band])
    widths = np.array([hi - lo for lo, hi in bands])
    dist = np.abs(lams[:, None] - flat[None, :])
    nearest = dist.argmin(axis=1)
    margin = rel * widths[nearest // 2]
    bad = dist[np.arange(lams.size), nearest] < margin
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise BandEdge(lams[i], flat[nearest[i]], margin[i])
