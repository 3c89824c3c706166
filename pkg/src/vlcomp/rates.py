"""Achievable-rate formulas: SIC rates, joint-transmission weak-UE rate,
light-energy harvesting and the RF relaying rate.

All rates are in nat/s (natural logarithm); the closed-form solvers invert
rates with exp, which forces base e. The per-signal capacity prefactor is
c = 1/(2 pi e), the entropy-power factor of amplitude-limited (truncated
Gaussian) signaling; interference terms carry the same factor.

Channel scaling convention: after ZF precoding each strong UE sees its
message through the common amplitude norm_scale, and gamma_rx is defined
against that amplitude. The effective weak-UE gains used here are expressed
relative to norm_scale (h_eff = H_pinv^T h_w = W^T h_w / norm_scale), so a
single gamma_rx serves all three receivers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .precoding import Precoder
from .vlc_channel import ChannelState

C_RATE = 1.0 / (2.0 * math.pi * math.e)

LN2 = math.log(2.0)


def nat_to_bit(rate_nat_s):
    """Display conversion; internal computations stay in nat/s."""
    return rate_nat_s / LN2


@dataclass(frozen=True)
class PhyParams:
    """Resolved physical-layer parameters (defaults follow the simulation setup)."""

    p_elec: float = 8.912509381337456e-3      # W (9.5 dBm)
    vlc_bandwidth: float = 20e6               # Hz
    vlc_noise_psd: float = 1e-21              # W/Hz
    sigma_d: float = 1.0                      # truncated-Gaussian scale of the messages
    responsivity: float = 0.58                # A/W
    conversion_efficiency: float = 0.6        # W/A
    i_dc: float = 0.3162277660168379          # A
    modulation_index: float = 0.33
    rf_bandwidth: float = 16e6                # Hz
    rf_noise_psd: float = 1e-21               # W/Hz
    fill_factor: float = 0.75
    thermal_voltage: float = 0.025            # V
    dark_current: float = 1e-10               # A
    nakagami_f: float = 1.0
    pathloss_exponent: float = 2.0

    @property
    def sigma_s2(self) -> float:
        return truncated_gaussian_power(self.sigma_d)

    @property
    def vlc_noise_power(self) -> float:
        return self.vlc_noise_psd * self.vlc_bandwidth

    @property
    def rf_noise_power(self) -> float:
        return self.rf_noise_psd * self.rf_bandwidth

    @property
    def peak_power_cap(self) -> float:
        """Largest electrical power compatible with the LED amplitude limit."""
        return (self.modulation_index * self.i_dc) ** 2 / 2.0


@dataclass(frozen=True)
class LinkBudget:
    """Everything the solvers need about one precoded realization."""

    gamma_rx: float
    h_eff: np.ndarray          # 2-vector, relative effective weak-UE gains
    norm_scale: float
    sigma_s2: float
    noise_power: float         # sigma_v^2 = N_v * B_v, W
    vlc_bandwidth: float       # Hz
    p_elec: float              # W
    responsivity: float
    conversion_efficiency: float
    c: float = field(default=C_RATE)


def truncated_gaussian_power(sigma_d: float) -> float:
    """Average electrical power of a unit-interval truncated Gaussian message."""
    if sigma_d <= 0.0:
        raise ValueError(f"sigma_d={sigma_d} must be positive")
    value = sigma_d ** 2 - sigma_d * math.exp(-1.0 / (2.0 * sigma_d ** 2)) \
        / math.erf(1.0 / (sigma_d * math.sqrt(2.0)))
    # the subtracted term underflows to exactly zero for very small scales
    if not (0.0 < value <= sigma_d ** 2):
        raise ValueError(
            f"sigma_d={sigma_d} yields invalid signal power {value:.4g}; "
            "use a scale small enough that truncation keeps the power positive")
    return value


def gamma_rx(p_elec: float, sigma_s2: float, responsivity: float,
             conversion_efficiency: float, channel_scale: float,
             noise_power: float) -> float:
    """Receive SNR for a link whose post-precoding amplitude gain is channel_scale."""
    return (responsivity * conversion_efficiency * channel_scale) ** 2 \
        * p_elec * sigma_s2 / noise_power


def build_link_budget(precoder: Precoder, channel: ChannelState, phy: PhyParams) -> LinkBudget:
    h_eff = precoder.h_ab_pinv.T @ channel.h_w
    return LinkBudget(
        gamma_rx=gamma_rx(phy.p_elec, phy.sigma_s2, phy.responsivity,
                          phy.conversion_efficiency, precoder.norm_scale,
                          phy.vlc_noise_power),
        h_eff=h_eff,
        norm_scale=precoder.norm_scale,
        sigma_s2=phy.sigma_s2,
        noise_power=phy.vlc_noise_power,
        vlc_bandwidth=phy.vlc_bandwidth,
        p_elec=phy.p_elec,
        responsivity=phy.responsivity,
        conversion_efficiency=phy.conversion_efficiency,
    )


def rate_strong_decode_weak(alpha, gamma, bandwidth):
    """Rate at which a strong UE decodes the weak-UE message before SIC."""
    with np.errstate(divide="ignore"):  # gamma = 0 means a dead link, rate 0
        return 0.5 * bandwidth * np.log1p(
            C_RATE * alpha / (C_RATE * (1.0 - alpha) + 1.0 / gamma))


def rate_strong_own(alpha, gamma, bandwidth):
    """Rate of a strong UE on its own message after cancelling the weak one."""
    return 0.5 * bandwidth * np.log1p(C_RATE * gamma * (1.0 - alpha))


def sic_capacity(gamma, bandwidth):
    """(B/2) ln(1 + c gamma): the exact sum of the two SIC stages for any alpha."""
    return 0.5 * bandwidth * np.log1p(C_RATE * gamma)


def rate_weak_vlc(alpha1, alpha2, h_eff, gamma, bandwidth):
    """Weak-UE rate under joint transmission, strong messages treated as noise."""
    h1, h2 = h_eff[0], h_eff[1]
    with np.errstate(divide="ignore"):
        num = C_RATE * (h1 * np.sqrt(alpha1) + h2 * np.sqrt(alpha2)) ** 2
        den = (C_RATE * h1 * h1 * (1.0 - alpha1) + C_RATE * h2 * h2 * (1.0 - alpha2)
               + 1.0 / gamma)
        return 0.5 * bandwidth * np.log1p(num / den)


def rate_weak_vl_combined(alpha1, alpha2, h_eff, gamma, bandwidth):
    """Delivered weak-UE VLC rate: its message must be decodable at both strong UEs."""
    return np.minimum(np.minimum(rate_strong_decode_weak(alpha1, gamma, bandwidth),
                                 rate_weak_vlc(alpha1, alpha2, h_eff, gamma, bandwidth)),
                      rate_strong_decode_weak(alpha2, gamma, bandwidth))


def harvested_rf_power(h1k: float, h2k: float, responsivity: float,
                       conversion_efficiency: float, i_dc: float,
                       fill_factor: float, thermal_voltage: float,
                       dark_current: float) -> float:
    """RF transmit power a strong UE harvests from the received DC light level.

    The slot is split into two equal halves (harvest, then relay); with the
    slot normalized to one, the harvested energy equals the transmit power.
    """
    i_received = responsivity * conversion_efficiency * i_dc * (h1k + h2k)
    return fill_factor * thermal_voltage * i_received * math.log1p(i_received / dark_current)


def rate_weak_rf_link(gain2_a, gain2_b, p_rf_a, p_rf_b, rf_bandwidth, rf_noise_power):
    """MRC-combined D2D relaying rate of the two strong-UE copies."""
    snr = (gain2_a * p_rf_a + gain2_b * p_rf_b) / rf_noise_power
    return 0.5 * rf_bandwidth * np.log1p(snr)


def rate_weak_rf_combined(alpha1, alpha2, gamma, bandwidth, rf_rate):
    """Delivered weak-UE rate with relaying: both strong UEs must decode it first."""
    return np.minimum(np.minimum(rate_strong_decode_weak(alpha1, gamma, bandwidth),
                                 rf_rate),
                      rate_strong_decode_weak(alpha2, gamma, bandwidth))


@dataclass(frozen=True)
class SchemeRates:
    """Per-UE and aggregate rates of one scheme on one realization (nat/s)."""

    scheme: str
    r_a: float
    r_b: float
    r_w: float            # delivered weak-UE rate
    r_decode_a: float     # strong-UE rates on the weak message (SIC stage 1)
    r_decode_b: float

    @property
    def total(self) -> float:
        return self.r_a + self.r_b + self.r_w

    @property
    def minimum(self) -> float:
        return min(self.r_a, self.r_b, self.r_w)
