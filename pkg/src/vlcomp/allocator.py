"""Feasibility analysis and the power-allocation solvers.

Four problems are solved for the weak-UE power fractions (alpha1, alpha2):

  P1  QoS-constrained sum rate, joint VLC transmission   (discrete line search)
  P2  QoS-constrained sum rate with RF relaying          (closed form: the
      alpha_min corner, since every arm of the objective is non-increasing)
  P3  max-min rate, joint VLC transmission               (line search + bisection)
  P4  max-min rate with RF relaying                      (closed form: alpha0,
      where the two SIC arms of a strong UE cross)

The feasibility metric g is the algebraic rearrangement of
"weak-UE VLC rate >= threshold"; expanding the squared numerator gives the
cross term 2 c h1 h2 sqrt(alpha1 alpha2) (coefficient two), and the
discriminant of the quadratic in beta = sqrt(alpha2) is c2^2 - 4 c1 c3.
A brute-force grid oracle evaluating the exact objective and every
constraint directly is provided for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericalError
from .rates import (C_RATE, LinkBudget, rate_strong_decode_weak, rate_strong_own,
                    rate_weak_rf_combined, rate_weak_vl_combined, rate_weak_vlc)


@dataclass(frozen=True)
class PowerAllocation:
    alpha1: float
    alpha2: float
    objective: float       # nat/s; nan when infeasible
    feasible: bool
    scheme: str            # p1 | p2 | p3 | p4 | oracle


@dataclass(frozen=True)
class FeasibilityBounds:
    """QoS thresholds mapped through the rate inverses, plus the alpha limits.

    alpha_min / alpha_max are kept raw (they leave [0, 1] exactly when the
    QoS is unattainable); the *_clamped properties are for reporting only.
    """

    t_v: float
    t_r: float
    alpha_min: float
    alpha_max: float
    alpha0: float

    @property
    def alpha_min_clamped(self) -> float:
        return min(max(self.alpha_min, 0.0), 1.0)

    @property
    def alpha_max_clamped(self) -> float:
        return min(max(self.alpha_max, 0.0), 1.0)


def qos_threshold(r_th: float, bandwidth: float) -> float:
    """t = exp(2 R_th / B) - 1, the SINR level equivalent to the rate threshold."""
    if r_th < 0.0:
        raise ValueError(f"r_th={r_th} must be non-negative")
    if bandwidth <= 0.0:
        raise ValueError(f"bandwidth={bandwidth} must be positive")
    return math.expm1(2.0 * r_th / bandwidth)


def thresholds(r_th: float, vlc_bandwidth: float, rf_bandwidth: float) -> tuple[float, float]:
    return qos_threshold(r_th, vlc_bandwidth), qos_threshold(r_th, rf_bandwidth)


def bounds(t_v: float, gamma: float, t_r: float = 0.0) -> FeasibilityBounds:
    cg = C_RATE * gamma
    alpha_max = 1.0 - t_v / cg
    alpha_min = t_v * (cg + 1.0) / (cg * (1.0 + t_v))
    alpha0 = ((cg + 1.0) - math.sqrt(cg + 1.0)) / cg
    return FeasibilityBounds(t_v=t_v, t_r=t_r, alpha_min=alpha_min,
                             alpha_max=alpha_max, alpha0=alpha0)


def g_metric(alpha1, alpha2, h_eff, t_v, gamma, cross_coeff: float = 2.0):
    """Sign-equivalent form of (weak-UE VLC rate - threshold); >= 0 means satisfied.

    cross_coeff exists as a fault-injection hook for the verification suite;
    the derived value is 2.
    """
    h1, h2 = h_eff[0], h_eff[1]
    return (C_RATE * (1.0 + t_v) * h1 * h1 * alpha1
            + C_RATE * (1.0 + t_v) * h2 * h2 * alpha2
            + cross_coeff * C_RATE * h1 * h2 * np.sqrt(alpha1 * alpha2)
            - t_v * (C_RATE * h1 * h1 + C_RATE * h2 * h2 + 1.0 / gamma))


def feasibility_p1(bnds: FeasibilityBounds, h_eff, t_v: float, gamma: float) -> bool:
    if bnds.alpha_min > bnds.alpha_max:
        return False
    return bool(g_metric(bnds.alpha_max, bnds.alpha_max, h_eff, t_v, gamma) >= 0.0)


def feasibility_p2(bnds: FeasibilityBounds, rf_rate: float, r_th: float) -> bool:
    return bnds.alpha_min <= bnds.alpha_max and rf_rate >= r_th


def min_alpha2_for_g(alpha1: float, bnds: FeasibilityBounds, h_eff, t_v: float,
                     gamma: float) -> float | None:
    """Smallest alpha2 in [alpha_min, alpha_max] with g(alpha1, alpha2) >= 0.

    Solves the quadratic in beta = sqrt(alpha2); returns None when the whole
    segment violates the inequality. Reference implementation; the line-search
    kernels inline the same case analysis.
    """
    h1, h2 = float(h_eff[0]), float(h_eff[1])
    a_min, a_max = bnds.alpha_min, bnds.alpha_max
    c1 = C_RATE * (1.0 + t_v) * h2 * h2
    c2 = 2.0 * C_RATE * h1 * h2 * math.sqrt(alpha1)
    c3 = (C_RATE * (1.0 + t_v) * h1 * h1 * alpha1
          - t_v * (C_RATE * h1 * h1 + C_RATE * h2 * h2 + 1.0 / gamma))
    if c1 <= 0.0:
        # alpha2 dropped out of g entirely (weak UE invisible to AP2)
        return a_min if c3 >= 0.0 else None
    disc = c2 * c2 - 4.0 * c1 * c3
    if disc <= 0.0:
        return a_min
    sq = math.sqrt(disc)
    beta1 = (-c2 - sq) / (2.0 * c1)
    beta2 = (-c2 + sq) / (2.0 * c1)
    sq_min = math.sqrt(a_min)
    if beta1 > sq_min or beta2 <= sq_min:
        return a_min
    if beta2 <= math.sqrt(a_max):
        return beta2 * beta2
    return None


def _infeasible(scheme: str) -> PowerAllocation:
    return PowerAllocation(alpha1=math.nan, alpha2=math.nan, objective=math.nan,
                           feasible=False, scheme=scheme)


def solve_p1(budget: LinkBudget, r_th: float, k_points: int = 1000) -> PowerAllocation:
    """Line search over alpha1 with the closed-form smallest feasible alpha2."""
    if k_points < 2:
        raise ValueError("k_points must be >= 2")
    t_v = qos_threshold(r_th, budget.vlc_bandwidth)
    bnds = bounds(t_v, budget.gamma_rx)
    if not feasibility_p1(bnds, budget.h_eff, t_v, budget.gamma_rx):
        return _infeasible("p1")
    a1, a2, obj, idx = _kernels.p1_scan(
        float(budget.h_eff[0]), float(budget.h_eff[1]), t_v, budget.gamma_rx,
        bnds.alpha_min, bnds.alpha_max, k_points, budget.vlc_bandwidth)
    if idx < 0:
        return _infeasible("p1")
    return PowerAllocation(alpha1=a1, alpha2=a2, objective=obj, feasible=True, scheme="p1")


def solve_p2(budget: LinkBudget, r_th: float, rf_rate: float) -> PowerAllocation:
    """Closed form: both fractions at alpha_min (every objective arm is non-increasing)."""
    t_v, t_r = qos_threshold(r_th, budget.vlc_bandwidth), 0.0
    bnds = bounds(t_v, budget.gamma_rx, t_r)
    if not feasibility_p2(bnds, rf_rate, r_th):
        return _infeasible("p2")
    a = bnds.alpha_min_clamped
    obj = (rate_strong_own(a, budget.gamma_rx, budget.vlc_bandwidth) * 2.0
           + rate_weak_rf_combined(a, a, budget.gamma_rx, budget.vlc_bandwidth, rf_rate))
    return PowerAllocation(alpha1=a, alpha2=a, objective=float(obj),
                           feasible=True, scheme="p2")


def _assert_weak_rate_monotone(budget: LinkBudget, alpha0: float):
    # The P3 inner bisection needs (weak rate - own rate) increasing in alpha2.
    probe = np.linspace(alpha0, 1.0, 5)
    for a1 in (alpha0, 1.0):
        d = (rate_weak_vlc(a1, probe, budget.h_eff, budget.gamma_rx, budget.vlc_bandwidth)
             - rate_strong_own(probe, budget.gamma_rx, budget.vlc_bandwidth))
        if np.any(np.diff(d) < 0.0):
            raise NumericalError(
                "weak-rate/own-rate difference is not monotone in alpha2 "
                f"(h_eff={budget.h_eff}); bisection would be unsound")


def solve_p3(budget: LinkBudget, k_points: int = 1000) -> PowerAllocation:
    """Max-min line search over [alpha0, 1]^2; always feasible."""
    if k_points < 2:
        raise ValueError("k_points must be >= 2")
    bnds = bounds(0.0, budget.gamma_rx)
    _assert_weak_rate_monotone(budget, bnds.alpha0)
    a1, a2, obj, _ = _kernels.p3_scan(
        float(budget.h_eff[0]), float(budget.h_eff[1]), budget.gamma_rx,
        bnds.alpha0, k_points, budget.vlc_bandwidth)
    return PowerAllocation(alpha1=a1, alpha2=a2, objective=obj, feasible=True, scheme="p3")


def solve_p4(budget: LinkBudget, rf_rate: float) -> tuple[PowerAllocation, float]:
    """Closed form (alpha0, alpha0); returns the allocation and the overall
    min rate including the RF relaying arm."""
    bnds = bounds(0.0, budget.gamma_rx)
    a0 = bnds.alpha0
    obj = float(rate_strong_own(a0, budget.gamma_rx, budget.vlc_bandwidth))
    alloc = PowerAllocation(alpha1=a0, alpha2=a0, objective=obj, feasible=True, scheme="p4")
    return alloc, min(rf_rate, obj)


@dataclass(frozen=True)
class OracleResult:
    allocation: PowerAllocation
    alpha1_axis: np.ndarray | None = None
    alpha2_axis: np.ndarray | None = None
    objective_grid: np.ndarray | None = None
    feasible_grid: np.ndarray | None = None


def grid_oracle(problem: str, budget: LinkBudget, r_th: float = 0.0,
                rf_rate: float = 0.0, n: int = 500,
                return_grid: bool = False) -> OracleResult:
    """Exhaustive N x N evaluation of the exact objective and all constraints.

    Constraints are checked by direct rate evaluation (never through g).
    Ties resolve to the first grid point in row-major order from low alpha.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    gamma, bw, h_eff = budget.gamma_rx, budget.vlc_bandwidth, budget.h_eff

    if problem == "p2":
        t_v = qos_threshold(r_th, bw)
        bnds = bounds(t_v, gamma)
        if bnds.alpha_min > bnds.alpha_max:
            return OracleResult(_infeasible("oracle"))
        axis1 = np.linspace(bnds.alpha_min_clamped, bnds.alpha_max_clamped, n)
    else:
        axis1 = np.linspace(0.0, 1.0, n)
    axis2 = axis1

    dec = rate_strong_decode_weak(axis1, gamma, bw)
    own = rate_strong_own(axis1, gamma, bw)

    if problem in ("p1", "p3"):
        weak = rate_weak_vlc(axis1[:, None], axis2[None, :], h_eff, gamma, bw)

    if problem == "p1":
        objective = own[:, None] + own[None, :] + np.minimum(
            np.minimum(dec[:, None], weak), dec[None, :])
        feasible = ((dec[:, None] >= r_th) & (own[:, None] >= r_th)
                    & (dec[None, :] >= r_th) & (own[None, :] >= r_th)
                    & (weak >= r_th))
    elif problem == "p2":
        rf_ok = rf_rate >= r_th
        objective = own[:, None] + own[None, :] + np.minimum(
            np.minimum(dec[:, None], rf_rate), dec[None, :])
        feasible = ((dec[:, None] >= r_th) & (own[:, None] >= r_th)
                    & (dec[None, :] >= r_th) & (own[None, :] >= r_th) & rf_ok)
    elif problem == "p3":
        objective = np.minimum.reduce([
            np.broadcast_to(np.minimum(dec, own)[:, None], (n, n)),
            np.broadcast_to(np.minimum(dec, own)[None, :], (n, n)),
            weak])
        feasible = np.ones((n, n), dtype=bool)
    elif problem == "p4":
        objective = np.minimum(np.minimum(dec, own)[:, None],
                               np.minimum(dec, own)[None, :])
        feasible = np.ones((n, n), dtype=bool)
    else:
        raise ValueError(f"unknown problem {problem!r}")

    masked = np.where(feasible, objective, -np.inf)
    flat = int(np.argmax(masked))
    i, j = divmod(flat, n)
    if not feasible[i, j]:
        alloc = _infeasible("oracle")
    else:
        alloc = PowerAllocation(alpha1=float(axis1[i]), alpha2=float(axis2[j]),
                                objective=float(objective[i, j]),
                                feasible=True, scheme="oracle")
    if return_grid:
        return OracleResult(alloc, axis1, axis2, objective, feasible)
    return OracleResult(alloc)


def oracle_csv_rows(result: OracleResult):
    """Flatten an oracle grid into (alpha1, alpha2, objective, feasible) rows."""
    if result.objective_grid is None:
        raise ValueError("oracle was run without return_grid=True")
    for i, a1 in enumerate(result.alpha1_axis):
        for j, a2 in enumerate(result.alpha2_axis):
            yield (float(a1), float(a2), float(result.objective_grid[i, j]),
                   bool(result.feasible_grid[i, j]))
