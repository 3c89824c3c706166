"""RF device-to-device links from the strong UEs to the weak UE.

The amplitude is Nakagami distributed with shape F and mean power
Omega = d^(-mu), so the squared gain |g|^2 is Gamma(F, Omega/F) with
E|g|^2 = d^(-mu) and Var|g|^2 = d^(-2 mu)/F. Only |g|^2 enters the rate
expression, so the squared gain is sampled directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RfLink:
    power_gain: float   # |g|^2, dimensionless
    distance: float     # m
    fading_shape: float # F >= 0.5
    pathloss_exponent: float


def sample_rf_gain(distance: float, fading_shape: float, pathloss_exponent: float,
                   seed, size=None):
    """Squared Nakagami gain(s) |g|^2 for one D2D link; deterministic per seed."""
    if distance <= 0.0:
        raise ValueError(f"distance={distance} must be positive")
    if fading_shape < 0.5:
        raise ValueError(f"fading_shape={fading_shape} must be >= 0.5")
    omega = distance ** (-pathloss_exponent)
    rng = np.random.default_rng(seed)
    draw = rng.gamma(shape=fading_shape, scale=omega / fading_shape, size=size)
    return float(draw) if size is None else draw
