"""Numba-compiled twins of the numpy kernels.

Scalar loops, same expression order as numpy_impl so results agree to a few
ulps. fastmath stays off to keep the two backends interchangeable.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

C_RATE = 1.0 / (2.0 * math.pi * math.e)

_BISECT_ITERS = 60


@njit(cache=True, parallel=True)
def los_gain_matrix(dst_pos, dst_nrm, dst_area, src_pos, src_nrm, m_order, cos_fov):
    n_dst = dst_pos.shape[0]
    n_src = src_pos.shape[0]
    out = np.zeros((n_dst, n_src))
    for i in prange(n_dst):
        for j in range(n_src):
            dx = dst_pos[i, 0] - src_pos[j, 0]
            dy = dst_pos[i, 1] - src_pos[j, 1]
            dz = dst_pos[i, 2] - src_pos[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 <= 0.0:
                continue
            d = math.sqrt(d2)
            cos_phi = (dx * src_nrm[j, 0] + dy * src_nrm[j, 1] + dz * src_nrm[j, 2]) / d
            if cos_phi <= 0.0:
                continue
            cos_psi = -(dx * dst_nrm[i, 0] + dy * dst_nrm[i, 1] + dz * dst_nrm[i, 2]) / d
            if cos_psi <= 0.0 or cos_psi < cos_fov:
                continue
            out[i, j] = ((m_order + 1.0) * dst_area[i] / (2.0 * math.pi * d2)
                         * cos_phi ** m_order * cos_psi)
    return out


@njit(cache=True)
def _patch_axes(nrm):
    """Deterministic in-plane orthonormal axes for every patch normal."""
    m = nrm.shape[0]
    u = np.empty((m, 3))
    v = np.empty((m, 3))
    for i in range(m):
        nx, ny, nz = nrm[i, 0], nrm[i, 1], nrm[i, 2]
        if abs(nx) < 0.9:
            ax, ay, az = 1.0, 0.0, 0.0
        else:
            ax, ay, az = 0.0, 1.0, 0.0
        d = ax * nx + ay * ny + az * nz
        ux, uy, uz = ax - d * nx, ay - d * ny, az - d * nz
        un = math.sqrt(ux * ux + uy * uy + uz * uz)
        u[i, 0], u[i, 1], u[i, 2] = ux / un, uy / un, uz / un
        v[i, 0] = ny * u[i, 2] - nz * u[i, 1]
        v[i, 1] = nz * u[i, 0] - nx * u[i, 2]
        v[i, 2] = nx * u[i, 1] - ny * u[i, 0]
    return u, v


@njit(cache=True)
def _element_pair_gain(pix, piy, piz, ni, ai, pjx, pjy, pjz, nj):
    dx, dy, dz = pix - pjx, piy - pjy, piz - pjz
    d2 = dx * dx + dy * dy + dz * dz
    if d2 <= 0.0:
        return 0.0
    d = math.sqrt(d2)
    cos_phi = (dx * nj[0] + dy * nj[1] + dz * nj[2]) / d
    if cos_phi <= 0.0:
        return 0.0
    cos_psi = -(dx * ni[0] + dy * ni[1] + dz * ni[2]) / d
    if cos_psi <= 0.0:
        return 0.0
    return 2.0 * ai / (2.0 * math.pi * d2) * cos_phi * cos_psi


@njit(cache=True, parallel=True)
def element_transfer_matrix(pos, nrm, area, subdiv_dist):
    """Element-to-element transfer with 2x2 sub-patch quadrature for close pairs.

    Point sampling overestimates the kernel when patch separation is
    comparable to the patch size (corner-adjacent patches), which inflates
    the operator spectral radius; averaging over sub-patch centers restores
    the integrated form factor.
    """
    m = pos.shape[0]
    u, v = _patch_axes(nrm)
    out = np.zeros((m, m))
    thresh2 = subdiv_dist * subdiv_dist
    for i in prange(m):
        qi = 0.25 * math.sqrt(area[i])
        for j in range(m):
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            dz = pos[i, 2] - pos[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 <= 0.0:
                continue
            if d2 >= thresh2:
                out[i, j] = _element_pair_gain(pos[i, 0], pos[i, 1], pos[i, 2],
                                               nrm[i], area[i],
                                               pos[j, 0], pos[j, 1], pos[j, 2], nrm[j])
            else:
                qj = 0.25 * math.sqrt(area[j])
                acc = 0.0
                for si in range(4):
                    oiu = qi if si % 2 == 1 else -qi
                    oiv = qi if si // 2 == 1 else -qi
                    pix = pos[i, 0] + oiu * u[i, 0] + oiv * v[i, 0]
                    piy = pos[i, 1] + oiu * u[i, 1] + oiv * v[i, 1]
                    piz = pos[i, 2] + oiu * u[i, 2] + oiv * v[i, 2]
                    for sj in range(4):
                        oju = qj if sj % 2 == 1 else -qj
                        ojv = qj if sj // 2 == 1 else -qj
                        acc += _element_pair_gain(
                            pix, piy, piz, nrm[i], area[i],
                            pos[j, 0] + oju * u[j, 0] + ojv * v[j, 0],
                            pos[j, 1] + oju * u[j, 1] + ojv * v[j, 1],
                            pos[j, 2] + oju * u[j, 2] + ojv * v[j, 2], nrm[j])
                out[i, j] = acc / 16.0
    return out


@njit(cache=True)
def _rate_own(alpha, gamma, bandwidth):
    return 0.5 * bandwidth * math.log1p(C_RATE * gamma * (1.0 - alpha))


@njit(cache=True)
def _rate_decode(alpha, gamma, bandwidth):
    return 0.5 * bandwidth * math.log1p(C_RATE * alpha / (C_RATE * (1.0 - alpha) + 1.0 / gamma))


@njit(cache=True)
def _rate_weak(alpha1, alpha2, h1, h2, gamma, bandwidth):
    num = C_RATE * (h1 * math.sqrt(alpha1) + h2 * math.sqrt(alpha2)) ** 2
    den = C_RATE * h1 * h1 * (1.0 - alpha1) + C_RATE * h2 * h2 * (1.0 - alpha2) + 1.0 / gamma
    return 0.5 * bandwidth * math.log1p(num / den)


@njit(cache=True)
def _min_alpha2(alpha1, h1, h2, t_v, gamma, a_min, a_max):
    c1 = C_RATE * (1.0 + t_v) * h2 * h2
    c2 = 2.0 * C_RATE * h1 * h2 * math.sqrt(alpha1)
    c3 = (C_RATE * (1.0 + t_v) * h1 * h1 * alpha1
          - t_v * (C_RATE * h1 * h1 + C_RATE * h2 * h2 + 1.0 / gamma))
    if c1 <= 0.0:
        return a_min if c3 >= 0.0 else math.nan
    disc = c2 * c2 - 4.0 * c1 * c3
    if disc <= 0.0:
        return a_min
    sq = math.sqrt(disc)
    b1 = (-c2 - sq) / (2.0 * c1)
    b2 = (-c2 + sq) / (2.0 * c1)
    sqa_min = math.sqrt(a_min)
    if b1 > sqa_min or b2 <= sqa_min:
        return a_min
    if b2 <= math.sqrt(a_max):
        return b2 * b2
    return math.nan


@njit(cache=True)
def p1_scan(h1, h2, t_v, gamma, a_min, a_max, k, bandwidth):
    best_obj = -math.inf
    best_i = -1
    best_a1 = math.nan
    best_a2 = math.nan
    for i in range(k):
        alpha1 = a_min + (a_max - a_min) * i / (k - 1)
        alpha2 = _min_alpha2(alpha1, h1, h2, t_v, gamma, a_min, a_max)
        if math.isnan(alpha2):
            continue
        obj = (_rate_own(alpha1, gamma, bandwidth) + _rate_own(alpha2, gamma, bandwidth)
               + min(min(_rate_decode(alpha1, gamma, bandwidth),
                         _rate_weak(alpha1, alpha2, h1, h2, gamma, bandwidth)),
                     _rate_decode(alpha2, gamma, bandwidth)))
        if obj > best_obj:
            best_obj = obj
            best_i = i
            best_a1 = alpha1
            best_a2 = alpha2
    if best_i < 0:
        return math.nan, math.nan, math.nan, -1
    return best_a1, best_a2, best_obj, best_i


@njit(cache=True)
def p3_scan(h1, h2, gamma, alpha0, k, bandwidth):
    best_obj = -math.inf
    best_i = -1
    best_a1 = math.nan
    best_a2 = math.nan
    for i in range(k):
        alpha1 = alpha0 + (1.0 - alpha0) * i / (k - 1)
        if (_rate_weak(alpha1, alpha0, h1, h2, gamma, bandwidth)
                - _rate_own(alpha0, gamma, bandwidth)) >= 0.0:
            alpha2 = alpha0
        else:
            lo = alpha0
            hi = 1.0
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                if (_rate_weak(alpha1, mid, h1, h2, gamma, bandwidth)
                        - _rate_own(mid, gamma, bandwidth)) >= 0.0:
                    hi = mid
                else:
                    lo = mid
            alpha2 = hi
        obj = min(min(min(min(_rate_decode(alpha1, gamma, bandwidth),
                              _rate_own(alpha1, gamma, bandwidth)),
                          _rate_decode(alpha2, gamma, bandwidth)),
                      _rate_own(alpha2, gamma, bandwidth)),
                  _rate_weak(alpha1, alpha2, h1, h2, gamma, bandwidth))
        if obj > best_obj:
            best_obj = obj
            best_i = i
            best_a1 = alpha1
            best_a2 = alpha2
    return best_a1, best_a2, best_obj, best_i
