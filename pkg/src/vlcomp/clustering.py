"""Multi-user clustering: triples of (strong-cell1, strong-cell2, weak) UEs.

Clusters share the VLC band by FDMA with an equal split, and the coordinated
power allocation runs independently per cluster on its sub-band. A clustering
is a complete matching of the three equally-sized UE sets into disjoint
triples; at the experiment scale (two UEs per role) exhaustive enumeration is
exact and doubles as the oracle for the assignment-solver path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConfigurationError, DegenerateChannelError
from .precoding import zf_precoder
from .rates import PhyParams, build_link_budget, rate_weak_rf_link, harvested_rf_power
from .allocator import solve_p1, solve_p2
from .vlc_channel import ChannelState


@dataclass(frozen=True)
class Cluster:
    strong1: int
    strong2: int
    weak: int
    bandwidth_fraction: float


def enumerate_clusterings(n_strong1: int, n_strong2: int, n_weak: int) -> list[list[Cluster]]:
    """All complete matchings into disjoint triples; (2,2,2) yields 2!*2! = 4."""
    if not (n_strong1 == n_strong2 == n_weak):
        raise ConfigurationError(
            f"clustering needs equal role counts, got ({n_strong1}, {n_strong2}, {n_weak})")
    n = n_strong1
    fraction = 1.0 / n
    out = []
    for sigma in itertools.permutations(range(n)):
        for tau in itertools.permutations(range(n)):
            out.append([Cluster(i, sigma[i], tau[i], fraction) for i in range(n)])
    return out


def cluster_value(cluster: Cluster, gains_strong1: np.ndarray, gains_strong2: np.ndarray,
                  gains_weak: np.ndarray, phy: PhyParams, scheme: str, r_th: float,
                  k_points: int, rf_gain2: np.ndarray | None = None) -> float:
    """Optimal sum rate of one cluster on its bandwidth share (0 if infeasible).

    gains_* are [n, 2] arrays of (AP1, AP2) channel gains per UE; rf_gain2 is
    the [n_strong1 + n_strong2, n_weak] matrix of squared D2D gains, required
    for the relaying scheme.
    """
    h_ab = np.vstack([gains_strong1[cluster.strong1], gains_strong2[cluster.strong2]])
    h_w = gains_weak[cluster.weak]
    sub_phy = replace(phy, vlc_bandwidth=phy.vlc_bandwidth * cluster.bandwidth_fraction)
    zeros = np.zeros_like(h_ab)
    state = ChannelState(h_ab=h_ab, h_w=h_w, h_ab_los=h_ab, h_ab_nlos=zeros,
                         h_w_los=h_w, h_w_nlos=np.zeros_like(h_w))
    try:
        precoder = zf_precoder(h_ab)
    except DegenerateChannelError:
        return 0.0
    budget = build_link_budget(precoder, state, sub_phy)

    if scheme == "comp-noma":
        alloc = solve_p1(budget, r_th, k_points)
    elif scheme == "comp-cnoma":
        if rf_gain2 is None:
            raise ConfigurationError("comp-cnoma clustering requires rf_gain2")
        n1 = len(gains_strong1)
        powers = [harvested_rf_power(gains_strong1[cluster.strong1][0],
                                     gains_strong1[cluster.strong1][1],
                                     phy.responsivity, phy.conversion_efficiency,
                                     phy.i_dc, phy.fill_factor, phy.thermal_voltage,
                                     phy.dark_current),
                  harvested_rf_power(gains_strong2[cluster.strong2][0],
                                     gains_strong2[cluster.strong2][1],
                                     phy.responsivity, phy.conversion_efficiency,
                                     phy.i_dc, phy.fill_factor, phy.thermal_voltage,
                                     phy.dark_current)]
        g2a = rf_gain2[cluster.strong1, cluster.weak]
        g2b = rf_gain2[n1 + cluster.strong2, cluster.weak]
        rf_rate = float(rate_weak_rf_link(g2a, g2b, powers[0], powers[1],
                                          phy.rf_bandwidth, phy.rf_noise_power))
        alloc = solve_p2(budget, r_th, rf_rate)
    else:
        raise ConfigurationError(f"clustering does not support scheme {scheme!r}")
    return alloc.objective if alloc.feasible else 0.0


def value_tensor(value_fn, n: int) -> np.ndarray:
    v = np.empty((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                v[i, j, k] = value_fn(i, j, k)
    return v


def clustering_total(clustering: list[Cluster], values: np.ndarray) -> float:
    return float(sum(values[c.strong1, c.strong2, c.weak] for c in clustering))


def optimal_uc(values: np.ndarray) -> tuple[list[Cluster], float]:
    """Exhaustive maximization over all clusterings (exact at this scale)."""
    n = values.shape[0]
    best, best_total = None, -math.inf
    for clustering in enumerate_clusterings(n, n, n):
        total = clustering_total(clustering, values)
        if total > best_total:
            best, best_total = clustering, total
    return best, best_total


def optimal_uc_assignment(values: np.ndarray) -> tuple[list[Cluster], float]:
    """Assignment-solver path: enumerate strong1-strong2 pairings, then assign
    weak UEs to pairs by the Hungarian method. Must agree with optimal_uc."""
    n = values.shape[0]
    fraction = 1.0 / n
    best, best_total = None, -math.inf
    for sigma in itertools.permutations(range(n)):
        cost = np.array([[values[i, sigma[i], k] for k in range(n)] for i in range(n)])
        rows, cols = linear_sum_assignment(cost, maximize=True)
        total = float(cost[rows, cols].sum())
        if total > best_total:
            best_total = total
            best = [Cluster(i, sigma[i], int(k), fraction) for i, k in zip(rows, cols)]
    return best, best_total


def random_uc(values: np.ndarray, seed) -> tuple[list[Cluster], float]:
    """Uniform draw among all valid clusterings."""
    n = values.shape[0]
    rng = np.random.default_rng(seed)
    sigma = rng.permutation(n)
    tau = rng.permutation(n)
    clustering = [Cluster(i, int(sigma[i]), int(tau[i]), 1.0 / n) for i in range(n)]
    return clustering, clustering_total(clustering, values)
