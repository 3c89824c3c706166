"""Pure-numpy implementations of the hot kernels.

Formulas here mirror vlcomp.rates / vlcomp.allocator definitions; the
expressions are written in the same order as the numba twin so both
backends agree to the last few ulps.
"""

from __future__ import annotations

import math

import numpy as np

C_RATE = 1.0 / (2.0 * math.pi * math.e)

_BISECT_ITERS = 60


def los_gain_matrix(dst_pos, dst_nrm, dst_area, src_pos, src_nrm, m_order, cos_fov):
    """Lambertian LOS gains for every (destination, source) pair.

    Returns an [n_dst, n_src] matrix; zero where the source radiates backwards,
    the destination faces away, or the incidence angle falls outside the FOV.
    """
    dst_pos = np.asarray(dst_pos, dtype=float)
    src_pos = np.asarray(src_pos, dtype=float)
    delta = dst_pos[:, None, :] - src_pos[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", delta, delta)
    d = np.sqrt(d2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_phi = np.einsum("ijk,jk->ij", delta, np.asarray(src_nrm, dtype=float)) / d
        cos_psi = -np.einsum("ijk,ik->ij", delta, np.asarray(dst_nrm, dtype=float)) / d
        ok = (d2 > 0.0) & (cos_phi > 0.0) & (cos_psi > 0.0) & (cos_psi >= cos_fov)
        gain = (m_order + 1.0) * np.asarray(dst_area, dtype=float)[:, None] / (2.0 * math.pi * d2)
        gain = gain * np.power(np.where(ok, cos_phi, 1.0), m_order) * cos_psi
    return np.where(ok, gain, 0.0)


def _patch_axes(nrm):
    helper = np.where(np.abs(nrm[:, :1]) < 0.9,
                      np.array([[1.0, 0.0, 0.0]]), np.array([[0.0, 1.0, 0.0]]))
    u = helper - np.sum(helper * nrm, axis=1, keepdims=True) * nrm
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = np.cross(nrm, u)
    return u, v


def _pair_gain(pi, ni, ai, pj, nj):
    d = pi - pj
    d2 = float(d @ d)
    if d2 <= 0.0:
        return 0.0
    dd = math.sqrt(d2)
    cos_phi = float(d @ nj) / dd
    cos_psi = float(-(d @ ni)) / dd
    if cos_phi <= 0.0 or cos_psi <= 0.0:
        return 0.0
    return 2.0 * ai / (2.0 * math.pi * d2) * cos_phi * cos_psi


def element_transfer_matrix(pos, nrm, area, subdiv_dist):
    """Element-to-element transfer with 2x2 sub-patch quadrature for close pairs.

    Point sampling overestimates the kernel when patch separation is
    comparable to the patch size (corner-adjacent patches), which inflates
    the operator spectral radius; averaging over sub-patch centers restores
    the integrated form factor. The close-pair fix-up loops in Python, so
    this fallback is noticeably slower than the numba twin (built once per
    room, so still acceptable).
    """
    pos = np.asarray(pos, dtype=float)
    nrm = np.asarray(nrm, dtype=float)
    area = np.asarray(area, dtype=float)
    out = los_gain_matrix(pos, nrm, area, pos, nrm, 1.0, 0.0)
    u, v = _patch_axes(nrm)
    delta = pos[:, None, :] - pos[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", delta, delta)
    close = np.argwhere((d2 > 0.0) & (d2 < subdiv_dist * subdiv_dist))
    quarter = 0.25 * np.sqrt(area)
    offsets = np.array([(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)])
    for i, j in close:
        sub_i = pos[i] + quarter[i] * (offsets[:, :1] * u[i] + offsets[:, 1:] * v[i])
        sub_j = pos[j] + quarter[j] * (offsets[:, :1] * u[j] + offsets[:, 1:] * v[j])
        acc = 0.0
        for pi in sub_i:
            for pj in sub_j:
                acc += _pair_gain(pi, nrm[i], area[i], pj, nrm[j])
        out[i, j] = acc / 16.0
    return out


def _rate_own(alpha, gamma, bandwidth):
    return 0.5 * bandwidth * np.log1p(C_RATE * gamma * (1.0 - alpha))


def _rate_decode(alpha, gamma, bandwidth):
    return 0.5 * bandwidth * np.log1p(C_RATE * alpha / (C_RATE * (1.0 - alpha) + 1.0 / gamma))


def _rate_weak(alpha1, alpha2, h1, h2, gamma, bandwidth):
    num = C_RATE * (h1 * np.sqrt(alpha1) + h2 * np.sqrt(alpha2)) ** 2
    den = C_RATE * h1 * h1 * (1.0 - alpha1) + C_RATE * h2 * h2 * (1.0 - alpha2) + 1.0 / gamma
    return 0.5 * bandwidth * np.log1p(num / den)


def _min_alpha2_grid(alpha1, h1, h2, t_v, gamma, a_min, a_max):
    """Smallest feasible alpha2 per alpha1 grid point; NaN marks no solution."""
    c1 = C_RATE * (1.0 + t_v) * h2 * h2
    c2 = 2.0 * C_RATE * h1 * h2 * np.sqrt(alpha1)
    c3 = (C_RATE * (1.0 + t_v) * h1 * h1 * alpha1
          - t_v * (C_RATE * h1 * h1 + C_RATE * h2 * h2 + 1.0 / gamma))
    if c1 <= 0.0:
        # weak UE invisible to AP2 after precoding: inequality is constant in alpha2
        return np.where(c3 >= 0.0, a_min, np.nan)
    disc = c2 * c2 - 4.0 * c1 * c3
    sq = np.sqrt(np.maximum(disc, 0.0))
    b2 = (-c2 + sq) / (2.0 * c1)
    sqa_min = math.sqrt(a_min)
    sqa_max = math.sqrt(a_max)
    b1 = (-c2 - sq) / (2.0 * c1)
    out = np.full_like(np.asarray(alpha1, dtype=float), a_min)
    inside = (disc > 0.0) & (b1 <= sqa_min) & (b2 > sqa_min)
    out = np.where(inside & (b2 <= sqa_max), b2 * b2, out)
    out = np.where(inside & (b2 > sqa_max), np.nan, out)
    return out


def p1_scan(h1, h2, t_v, gamma, a_min, a_max, k, bandwidth):
    """Discrete line search for the QoS-constrained sum-rate problem.

    Returns (alpha1, alpha2, objective, index); index -1 when no grid point
    admits a feasible alpha2.
    """
    i = np.arange(k, dtype=float)
    alpha1 = a_min + (a_max - a_min) * i / (k - 1)
    alpha2 = _min_alpha2_grid(alpha1, h1, h2, t_v, gamma, a_min, a_max)
    valid = ~np.isnan(alpha2)
    a2 = np.where(valid, alpha2, 0.0)
    obj = (_rate_own(alpha1, gamma, bandwidth) + _rate_own(a2, gamma, bandwidth)
           + np.minimum(np.minimum(_rate_decode(alpha1, gamma, bandwidth),
                                   _rate_weak(alpha1, a2, h1, h2, gamma, bandwidth)),
                        _rate_decode(a2, gamma, bandwidth)))
    obj = np.where(valid, obj, -np.inf)
    best = int(np.argmax(obj))
    if not valid[best]:
        return math.nan, math.nan, math.nan, -1
    return float(alpha1[best]), float(alpha2[best]), float(obj[best]), best


def p3_scan(h1, h2, gamma, alpha0, k, bandwidth):
    """Discrete line search for the max-min problem over [alpha0, 1]^2.

    For each alpha1 the inner step bisects for the smallest alpha2 with
    weak-UE rate >= strong-UE own rate (the difference is monotone).
    """
    i = np.arange(k, dtype=float)
    alpha1 = alpha0 + (1.0 - alpha0) * i / (k - 1)

    def diff(a2):
        return (_rate_weak(alpha1, a2, h1, h2, gamma, bandwidth)
                - _rate_own(a2, gamma, bandwidth))

    lo = np.full(k, alpha0)
    hi = np.ones(k)
    at_lo = diff(lo) >= 0.0
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        ge = diff(mid) >= 0.0
        hi = np.where(ge, mid, hi)
        lo = np.where(ge, lo, mid)
    alpha2 = np.where(at_lo, alpha0, hi)

    obj = np.minimum.reduce([
        _rate_decode(alpha1, gamma, bandwidth),
        _rate_own(alpha1, gamma, bandwidth),
        _rate_decode(alpha2, gamma, bandwidth),
        _rate_own(alpha2, gamma, bandwidth),
        _rate_weak(alpha1, alpha2, h1, h2, gamma, bandwidth),
    ])
    best = int(np.argmax(obj))
    return float(alpha1[best]), float(alpha2[best]), float(obj[best]), best
