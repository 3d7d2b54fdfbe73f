"""Generalized eigenfunctions decaying at one infinity, and what they buy.

For real in-band energies the solution space of

    a_k psi_{k+1} + a_{k-1} psi_{k-1} + b_k psi_k = lambda psi_k

is spanned by the boundary values of the two Weyl solutions: psi_right
(limit of the solution square-summable at +inf) and psi_left (at -inf).
Both are normalized to psi_0 = 1.  Expanding psi_left over the right pair
(conj(psi_right), psi_right) gives the coefficients alpha, beta and the
right reflection probability |beta/alpha|^2, which must agree with the
scattering-matrix route and with the m-function ratio route.

Tails are seeded by the Floquet eigenvector of the one-period transfer
product; the decaying branch is selected by a probe at lambda + i*1e-8
(in band the multiplier is unimodular and the probe breaks the tie).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bands import band_intervals, guard_edges
from .errors import (
    CrossCheckFailure,
    DegenerateBasis,
    NormalizationPole,
    PoleHit,
)
from .mfunc import POLE_TOL, PROBE_IM, _m_grid, strip_once

RECURSION_TOL = 1e-10   # residual of the three-term recursion, relative
WRONSKIAN_TOL = 1e-12   # constancy of the Wronskian, relative
DEGENERATE_TOL = 1e-12  # |W(conj(psi_r), psi_r)| below this is degenerate

__all__ = [
    "JostSolution",
    "ReflectionDatum",
    "jost_solution",
    "wronskian",
    "alpha_beta",
    "spectral_reflection_mratio",
    "spectral_reflection_mratio_grid",
    "green_offdiag",
]


@dataclass(frozen=True)
class JostSolution:
    """One decaying-branch solution on a finite site window."""

    side: str
    lam: float
    k_min: int
    k_max: int
    values: np.ndarray
    x: complex          # per-period amplitude ratio toward the decaying end
    spec: object = field(repr=False, default=None)

    def value(self, k):
        if not self.k_min <= k <= self.k_max:
            raise IndexError(f"site {k} outside window [{self.k_min}, {self.k_max}]")
        return self.values[k - self.k_min]


@dataclass(frozen=True)
class ReflectionDatum:
    """Expansion of psi_left over the right-tail basis at one energy."""

    lam: float
    alpha: complex
    beta: complex
    R_r: float


def _transfer(spec, k, lam):
    a_k, b_k = spec.a(k), spec.b(k)
    a_km1 = spec.a(k - 1)
    return np.array([[(lam - b_k) / a_k, -a_km1 / a_k], [1.0, 0.0]],
                    dtype=complex if isinstance(lam, complex) else float)


def _monodromy(spec, K, lam):
    # product over sites K+1 .. K+p mapping (psi_{K+1}, psi_K) one period up
    p = spec.background.period
    M = np.eye(2, dtype=complex if isinstance(lam, complex) else float)
    for k in range(K + 1, K + p + 1):
        M = _transfer(spec, k, lam) @ M
    return M


def _multipliers(M):
    # eigenvalues of the unit-determinant monodromy
    tr = M[0, 0] + M[1, 1]
    sq = np.sqrt(complex(tr * tr - 4.0))
    return (tr + sq) / 2.0, (tr - sq) / 2.0


def _pick_multiplier(spec, K, lam, decaying):
    """Floquet multiplier continued from the upper half plane.

    ``decaying=True`` picks |mu| < 1 at the probe (right tail),
    ``decaying=False`` the reciprocal one (left tail).
    """
    probe = _multipliers(_monodromy(spec, K, complex(lam, PROBE_IM)))
    target = min(probe, key=abs) if decaying else max(probe, key=abs)
    mu1, mu2 = _multipliers(_monodromy(spec, K, lam))
    return mu1 if abs(mu1 - target) <= abs(mu2 - target) else mu2


def _eigvec(M, mu):
    v1 = np.array([M[0, 1], mu - M[0, 0]])
    v2 = np.array([mu - M[1, 1], M[1, 0]])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    nrm = np.linalg.norm(v)
    if nrm < DEGENERATE_TOL:
        raise DegenerateBasis("monodromy eigenvector degenerates (band edge?)")
    return v / nrm


def jost_solution(spec, side, lam, k_min=None, k_max=None):
    """Decaying-branch solution, normalized to 1 at site 0.

    ``side='r'`` decays toward +inf, ``side='l'`` toward -inf; energies
    within the band-edge margin are refused.
    """
    if side not in ("l", "r"):
        raise ValueError(f"side must be 'l' or 'r', got {side!r}")
    lam = float(lam)
    guard_edges(band_intervals(spec.background), lam)

    w = spec.window
    p = spec.background.period
    lo_default = min(-3, (w[0] - 2) if w else -3)
    hi_default = max(3, (w[1] + 2) if w else 3)
    k_lo = min(k_min if k_min is not None else lo_default, 0)
    k_hi = max(k_max if k_max is not None else hi_default, 1)

    if side == "r":
        K = max(0, (w[1] + 1) if w else 0, k_hi)
        mu = _pick_multiplier(spec, K, lam, decaying=True)
        x = mu
        psi_up, psi_at = _eigvec(_monodromy(spec, K, lam), mu)  # psi_{K+1}, psi_K
    else:
        K = min(0, (w[0] - 1 - p) if w else -p, k_lo - 1)
        mu = _pick_multiplier(spec, K, lam, decaying=False)
        x = 1.0 / mu
        psi_up, psi_at = _eigvec(_monodromy(spec, K, lam), mu)

    # propagate to cover [min(k_lo, K), max(k_hi, K+1)] then slice
    lo = min(k_lo, K)
    hi = max(k_hi, K + 1)
    vals = np.empty(hi - lo + 1, dtype=complex)
    vals[K - lo] = psi_at
    vals[K + 1 - lo] = psi_up
    for k in range(K, lo, -1):
        # downward: psi_{k-1} = ((lam - b_k) psi_k - a_k psi_{k+1}) / a_{k-1}
        vals[k - 1 - lo] = ((lam - spec.b(k)) * vals[k - lo]
                            - spec.a(k) * vals[k + 1 - lo]) / spec.a(k - 1)
    for k in range(K + 1, hi):
        vals[k + 1 - lo] = ((lam - spec.b(k)) * vals[k - lo]
                            - spec.a(k - 1) * vals[k - 1 - lo]) / spec.a(k)

    scale = np.abs(vals).max()
    psi0 = vals[0 - lo]
    if abs(psi0) < 1e-12 * scale:
        raise NormalizationPole(
            f"psi_0 = {psi0:.3e} vanishes at lambda = {lam} ({side} side)"
        )
    vals = vals / psi0

    sol = JostSolution(side=side, lam=lam, k_min=lo, k_max=hi,
                       values=vals[: hi - lo + 1], x=complex(x), spec=spec)
    _check_recursion(sol)
    return _slice(sol, k_lo, k_hi)


def _slice(sol, k_lo, k_hi):
    i0 = k_lo - sol.k_min
    i1 = k_hi - sol.k_min + 1
    return JostSolution(side=sol.side, lam=sol.lam, k_min=k_lo, k_max=k_hi,
                        values=sol.values[i0:i1], x=sol.x, spec=sol.spec)


def _check_recursion(sol):
    spec, lam, vals = sol.spec, sol.lam, sol.values
    scale = np.abs(vals).max()
    worst = 0.0
    for k in range(sol.k_min + 1, sol.k_max):
        i = k - sol.k_min
        r = (spec.a(k) * vals[i + 1] + spec.a(k - 1) * vals[i - 1]
             + (spec.b(k) - lam) * vals[i])
        worst = max(worst, abs(r))
    if worst > RECURSION_TOL * scale:
        raise CrossCheckFailure(
            f"three-term recursion residual {worst:.3e} exceeds "
            f"{RECURSION_TOL} * {scale:.3e}"
        )


def wronskian(u, v, k):
    """a_k (u_{k+1} v_k - u_k v_{k+1}); k-independent for equal energies."""
    a_k = u.spec.a(k)
    return a_k * (u.value(k + 1) * v.value(k) - u.value(k) * v.value(k + 1))


def _wronskian_checked(u, v):
    """Wronskian at site 0 plus a constancy check over the shared window."""
    k_lo = max(u.k_min, v.k_min)
    k_hi = min(u.k_max, v.k_max) - 1
    ws = np.array([wronskian(u, v, k) for k in range(k_lo, k_hi + 1)])
    w0 = ws[0 - k_lo] if k_lo <= 0 <= k_hi else ws[0]
    spread = np.abs(ws - w0).max()
    # scale by the solutions, not |W|: W = 0 is a legitimate value
    scale = max(np.abs(u.values).max() * np.abs(v.values).max(), 1e-30)
    if spread > WRONSKIAN_TOL * scale * 1e2:
        raise CrossCheckFailure(
            f"Wronskian varies by {spread:.3e} across the window (|W| = {abs(w0):.3e})"
        )
    return w0


def _conj_solution(sol):
    return JostSolution(side=sol.side, lam=sol.lam, k_min=sol.k_min,
                        k_max=sol.k_max, values=np.conj(sol.values),
                        x=np.conj(sol.x), spec=sol.spec)


def alpha_beta(spec, lam):
    """Expansion psi_left = alpha conj(psi_right) + beta psi_right at cut 0.

    Valid where the right channel is open (psi_right genuinely complex);
    returns the reflection probability R_r = |beta/alpha|^2 as well.
    """
    w = spec.window
    k_lo = min(-3, (w[0] - 2) if w else -3)
    k_hi = max(3, (w[1] + 2) if w else 3)
    psi_r = jost_solution(spec, "r", lam, k_lo, k_hi)
    psi_l = jost_solution(spec, "l", lam, k_lo, k_hi)
    psi_rbar = _conj_solution(psi_r)

    w_rbar_r = _wronskian_checked(psi_rbar, psi_r)
    if abs(w_rbar_r) < DEGENERATE_TOL:
        raise DegenerateBasis(
            f"psi_right is (a multiple of) a real solution at lambda = {lam}"
        )
    alpha = _wronskian_checked(psi_l, psi_r) / w_rbar_r
    beta = _wronskian_checked(psi_l, psi_rbar) / (-w_rbar_r)

    recon = alpha * psi_rbar.values + beta * psi_r.values
    resid = np.abs(psi_l.values - recon).max()
    if resid > 1e-9 * max(1.0, np.abs(psi_l.values).max()):
        raise CrossCheckFailure(f"basis expansion residual {resid:.3e} at lambda = {lam}")

    r_r = abs(beta / alpha) ** 2
    if r_r > 1.0 + 1e-8:
        raise CrossCheckFailure(f"reflection probability {r_r} exceeds 1")
    return ReflectionDatum(lam=lam, alpha=complex(alpha), beta=complex(beta),
                           R_r=min(float(r_r), 1.0))


def spectral_reflection_mratio_grid(spec, lams):
    """Reflection probability from the m-function ratio at cut 0, vectorized.

    R_r = |a_0^2 conj(m_right(0)) m_left(1) - 1|^2
        / |a_0^2 m_right(0) m_left(1) - 1|^2   at lambda + i0.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    m_r = _m_grid(spec, 0, lams, "right", True)
    m_l1 = strip_once(_m_grid(spec, 0, lams, "left", True),
                      spec.a(-1), spec.b(0), lams)
    a0sq = spec.a(0) ** 2
    num = a0sq * np.conj(m_r) * m_l1 - 1.0
    den = a0sq * m_r * m_l1 - 1.0
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleHit("m-ratio denominator vanishes")
    return np.abs(num / den) ** 2


def spectral_reflection_mratio(spec, lam):
    """Scalar version of the m-ratio reflection probability."""
    return float(spectral_reflection_mratio_grid(spec, np.array([lam]))[0])


def green_offdiag(spec, n, m, lam):
    """G_nm(lambda + i0) from the product of the two decaying solutions.

    The orientation of the Wronskian is fixed so that the n = m case
    agrees with the continued-fraction diagonal value (checked in tests).
    """
    k_lo = min(n, m, (spec.window[0] - 2) if spec.window else -1) - 1
    k_hi = max(n, m, (spec.window[1] + 2) if spec.window else 1) + 1
    psi_r = jost_solution(spec, "r", lam, k_lo, k_hi)
    psi_l = jost_solution(spec, "l", lam, k_lo, k_hi)
    w = _wronskian_checked(psi_r, psi_l)
    if abs(w) < DEGENERATE_TOL:
        raise PoleHit(f"Wronskian vanishes at lambda = {lam} (bound state)")
    return psi_l.value(min(n, m)) * psi_r.value(max(n, m)) / w
