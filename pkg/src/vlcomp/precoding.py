"""ZF precoder with infinity-norm normalization and the peak-amplitude checker.

The precoder is W = H^(-1) / ||H^(-1)||_inf where ||.||_inf is the induced
infinity norm (max absolute row sum): that is the norm for which
||W s||_inf <= ||W||_inf ||s||_inf holds, which is what makes the peak-power
argument work. H W is then norm_scale * I with norm_scale = 1/||H^(-1)||_inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError


@dataclass(frozen=True)
class Precoder:
    w: np.ndarray          # 2x2, induced inf-norm <= 1
    norm_scale: float      # 1 / ||H^(-1)||_inf
    h_ab_pinv: np.ndarray  # 2x2 unnormalized inverse


def induced_inf_norm(m: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(m), axis=1)))


def zf_precoder(h_ab: np.ndarray, det_floor: float = 1e-15) -> Precoder:
    h_ab = np.asarray(h_ab, dtype=float)
    det = h_ab[0, 0] * h_ab[1, 1] - h_ab[0, 1] * h_ab[1, 0]
    scale = float(np.sum(h_ab * h_ab))  # ||H||_F^2, conditioning reference
    if abs(det) < det_floor * scale or scale == 0.0:
        raise DegenerateChannelError(
            f"channel matrix near singular: |det|={abs(det):.3g} < {det_floor:.0e} * ||H||^2")
    pinv = np.array([[h_ab[1, 1], -h_ab[0, 1]],
                     [-h_ab[1, 0], h_ab[0, 0]]]) / det
    norm = induced_inf_norm(pinv)
    return Precoder(w=pinv / norm, norm_scale=1.0 / norm, h_ab_pinv=pinv)


def effective_weak_channel(precoder: Precoder, h_w: np.ndarray) -> np.ndarray:
    """W^T h_w: the weak-UE channel as seen through the normalized precoder."""
    return precoder.w.T @ np.asarray(h_w, dtype=float)


@dataclass(frozen=True)
class AmplitudeReport:
    max_ratio: float       # max ||W s||_inf / (nu * I_DC) over all samples
    n_samples: int
    worst_sample: np.ndarray


def check_amplitude(precoder: Precoder, alpha1: float, alpha2: float,
                    p_elec: float, modulation_index: float, i_dc: float,
                    n_samples: int, seed, tolerance: float = 0.0) -> AmplitudeReport:
    """Fuzz the peak-amplitude bound ||W s||_inf <= nu I_DC over random messages.

    Messages (s_a, s_b, s_w) are drawn uniformly in [-1, 1]^3 and superposed
    with the power split (alpha1, alpha2). Any violation beyond `tolerance`
    raises: that would contradict the norm bound that justifies the precoder
    normalization, so it is treated as an implementation bug.
    """
    limit = modulation_index * i_dc
    if limit <= 0.0:
        raise ValueError("modulation_index * i_dc must be positive")
    rng = np.random.default_rng(seed)
    msgs = rng.uniform(-1.0, 1.0, size=(n_samples, 3))
    s1 = (math.sqrt((1.0 - alpha1) * p_elec) * msgs[:, 0]
          + math.sqrt(alpha1 * p_elec) * msgs[:, 2])
    s2 = (math.sqrt((1.0 - alpha2) * p_elec) * msgs[:, 1]
          + math.sqrt(alpha2 * p_elec) * msgs[:, 2])
    precoded = np.stack([s1, s2], axis=0)
    peaks = np.max(np.abs(precoder.w @ precoded), axis=0)
    worst = int(np.argmax(peaks))
    max_ratio = float(peaks[worst]) / limit
    if max_ratio > 1.0 + tolerance:
        raise AssertionError(
            f"amplitude bound violated: ||W s||_inf = {peaks[worst]:.9g} > "
            f"nu*I_DC = {limit:.9g} at sample {msgs[worst]} "
            f"(alpha1={alpha1}, alpha2={alpha2}, p_elec={p_elec})")
    return AmplitudeReport(max_ratio=max_ratio, n_samples=n_samples,
                           worst_sample=msgs[worst])
