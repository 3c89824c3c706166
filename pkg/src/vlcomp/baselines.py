"""Comparison schemes: coordinated OMA, and non-coordinated NOMA / C-NOMA.

The reconstruction choices (surfaced in config/docs so they can be varied):

* comp-oma: each cell splits the VLC bandwidth equally between its strong UE
  and the weak UE; the weak sub-band is common to both cells and served by
  joint transmission (amplitudes add), strong sub-bands are orthogonal across
  cells so no inter-cell interference remains. Full per-AP power on each band.
* noma / cnoma: identity precoder, both cells on the full band. The weak UE
  associates with the AP of larger gain; that cell superposes the weak
  message while the other cell sends its strong message at full power.
  Inter-cell interference appears in every SINR denominator with the same
  entropy-power factor c as intra-cell interference, which folds it into an
  effective SNR per link; the serving cell's power split is then a
  one-dimensional line search mirroring the main solvers.
* cnoma relays the weak message over the associated strong UE's RF link, and
  the relayed copy replaces the direct one (as in the coordinated scheme).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rates import (C_RATE, PhyParams, SchemeRates, gamma_rx, harvested_rf_power,
                    rate_strong_decode_weak, rate_strong_own, rate_weak_rf_link,
                    sic_capacity)
from .vlc_channel import ChannelState


@dataclass(frozen=True)
class BaselineResult:
    rates: SchemeRates
    feasible: bool
    alpha: float  # weak-UE power fraction in the NOMA cell (nan for comp-oma)


def _link_gamma(h: float, phy: PhyParams, noise_power: float) -> float:
    return gamma_rx(phy.p_elec, phy.sigma_s2, phy.responsivity,
                    phy.conversion_efficiency, h, noise_power)


def comp_oma_rates(channel: ChannelState, phy: PhyParams, r_th: float) -> BaselineResult:
    half_band = phy.vlc_bandwidth / 2.0
    sub_noise = phy.vlc_noise_psd * half_band
    g_a = _link_gamma(channel.h_ab[0, 0], phy, sub_noise)
    g_b = _link_gamma(channel.h_ab[1, 1], phy, sub_noise)
    g_w = _link_gamma(channel.h_w[0] + channel.h_w[1], phy, sub_noise)  # JT adds amplitudes
    r_a = float(sic_capacity(g_a, half_band))
    r_b = float(sic_capacity(g_b, half_band))
    r_w = float(sic_capacity(g_w, half_band))
    rates = SchemeRates(scheme="comp-oma", r_a=r_a, r_b=r_b, r_w=r_w,
                        r_decode_a=math.nan, r_decode_b=math.nan)
    return BaselineResult(rates=rates, feasible=min(r_a, r_b, r_w) >= r_th,
                          alpha=math.nan)


@dataclass(frozen=True)
class _NonCoordinatedLinks:
    """Effective SNRs after folding inter-cell interference into the noise."""

    serving_ap: int       # 0 or 1: the AP the weak UE associates with
    gamma_strong: float   # strong UE of the serving (NOMA) cell
    gamma_weak: float     # weak UE, listening to the serving cell
    gamma_idle: float     # strong UE of the single-user cell


def _noncoordinated_links(channel: ChannelState, phy: PhyParams) -> _NonCoordinatedLinks:
    serving = int(np.argmax(channel.h_w))
    other = 1 - serving
    noise = phy.vlc_noise_power

    def effective(own: float, interf: float) -> float:
        # the interfering AP radiates its full superposition, so its entire
        # power rides on the interference term
        g_own = _link_gamma(own, phy, noise)
        g_int = _link_gamma(interf, phy, noise)
        return g_own / (C_RATE * g_int + 1.0)

    strong = channel.h_ab[serving]      # gain row of the serving-cell strong UE
    idle = channel.h_ab[other]
    return _NonCoordinatedLinks(
        serving_ap=serving,
        gamma_strong=effective(strong[serving], strong[other]),
        gamma_weak=effective(channel.h_w[serving], channel.h_w[other]),
        gamma_idle=effective(idle[other], idle[serving]),
    )


def _noma_scheme_rates(scheme: str, links: _NonCoordinatedLinks, phy: PhyParams,
                       r_th: float, objective: str, k_points: int,
                       rf_rate: float | None) -> BaselineResult:
    bw = phy.vlc_bandwidth
    alphas = np.linspace(0.0, 1.0, k_points)
    decode_w = rate_strong_decode_weak(alphas, links.gamma_strong, bw)
    own = rate_strong_own(alphas, links.gamma_strong, bw)
    direct_w = rate_strong_decode_weak(alphas, links.gamma_weak, bw)
    if rf_rate is None:
        weak = np.minimum(decode_w, direct_w)
    else:
        weak = np.minimum(decode_w, rf_rate)
    r_idle = float(sic_capacity(links.gamma_idle, bw))

    if objective == "sum":
        value = own + weak + r_idle
        ok = (decode_w >= r_th) & (own >= r_th) & (weak >= r_th) & (r_idle >= r_th)
        if not np.any(ok):
            rates = SchemeRates(scheme=scheme, r_a=math.nan, r_b=math.nan,
                                r_w=math.nan, r_decode_a=math.nan, r_decode_b=math.nan)
            return BaselineResult(rates=rates, feasible=False, alpha=math.nan)
        value = np.where(ok, value, -np.inf)
    else:
        value = np.minimum(np.minimum(own, weak), r_idle)
    best = int(np.argmax(value))

    if links.serving_ap == 0:
        r_a, r_b = float(own[best]), r_idle
        dec_a, dec_b = float(decode_w[best]), math.nan
    else:
        r_a, r_b = r_idle, float(own[best])
        dec_a, dec_b = math.nan, float(decode_w[best])
    rates = SchemeRates(scheme=scheme, r_a=r_a, r_b=r_b, r_w=float(weak[best]),
                        r_decode_a=dec_a, r_decode_b=dec_b)
    return BaselineResult(rates=rates, feasible=True, alpha=float(alphas[best]))


def noma_rates(channel: ChannelState, phy: PhyParams, r_th: float,
               objective: str = "sum", k_points: int = 1000) -> BaselineResult:
    links = _noncoordinated_links(channel, phy)
    return _noma_scheme_rates("noma", links, phy, r_th, objective, k_points, None)


def cnoma_rates(channel: ChannelState, phy: PhyParams, rf_gain2: np.ndarray,
                r_th: float, objective: str = "sum",
                k_points: int = 1000) -> BaselineResult:
    """rf_gain2: squared D2D gains (strong-cell1 -> weak, strong-cell2 -> weak)."""
    links = _noncoordinated_links(channel, phy)
    relay = links.serving_ap  # the associated cell's strong UE relays
    p_rf = harvested_rf_power(channel.h_ab[relay, 0], channel.h_ab[relay, 1],
                              phy.responsivity, phy.conversion_efficiency,
                              phy.i_dc, phy.fill_factor, phy.thermal_voltage,
                              phy.dark_current)
    rf_rate = float(rate_weak_rf_link(rf_gain2[relay], 0.0, p_rf, 0.0,
                                      phy.rf_bandwidth, phy.rf_noise_power))
    return _noma_scheme_rates("cnoma", links, phy, r_th, objective, k_points, rf_rate)
