"""Seeded trial generation, per-scheme evaluation and sweep aggregation.

One trial draws a single placement / orientation / fading realization and
evaluates every requested scheme on it (paired comparison). Per-trial
sub-seeds derive deterministically from (master_seed, trial_index) via
SeedSequence, so results are independent of worker count and scheme order,
and the same trial index reuses the same realization at every sweep point
whenever the geometry parameters are unchanged.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import clustering as uc
from .allocator import solve_p1, solve_p2, solve_p3, solve_p4
from .baselines import cnoma_rates, comp_oma_rates, noma_rates
from .errors import ConfigurationError, DegenerateChannelError, NumericalError
from .geometry import (ApNode, OrientationModel, PlacementPolicy, RoomConfig,
                       UeNode, place_ues, sample_orientation)
from .precoding import zf_precoder
from .rates import (PhyParams, SchemeRates, build_link_budget, harvested_rf_power,
                    rate_strong_decode_weak, rate_strong_own, rate_weak_rf_combined,
                    rate_weak_rf_link, rate_weak_vl_combined)
from .rf_channel import sample_rf_gain
from .vlc_channel import ChannelState, NlosSolver, los_gain

COMP_SCHEMES = ("comp-noma", "comp-cnoma")
ALL_SCHEMES = ("comp-noma", "comp-cnoma", "comp-oma", "cnoma", "noma")


@dataclass(frozen=True)
class Scenario:
    """Fully resolved inputs for one sweep point."""

    room: RoomConfig
    policy: PlacementPolicy
    orientation: OrientationModel
    phy: PhyParams
    r_th: float
    k_points: int = 1000
    objective: str = "sum"                  # sum | min
    schemes: tuple[str, ...] = ALL_SCHEMES
    nlos: NlosSolver | None = None
    n_per_role: int = 1
    clustering_policies: tuple[str, ...] = ()

    @property
    def aps(self) -> tuple[ApNode, ApNode]:
        p1, p2 = self.room.ap_positions
        kwargs = dict(half_power_semiangle=self.policy.half_power_semiangle,
                      conversion_efficiency=self.phy.conversion_efficiency,
                      i_dc=self.phy.i_dc, modulation_index=self.phy.modulation_index)
        return ApNode(position=p1, **kwargs), ApNode(position=p2, **kwargs)


@dataclass(frozen=True, eq=False)
class TrialRecord:
    trial_index: int
    scheme: str
    objective: str
    value: float          # nat/s; nan when not feasible
    rate_a: float
    rate_b: float
    rate_w: float
    alpha1: float
    alpha2: float
    feasible: bool
    degenerate: bool
    channel_hash: str

    def __eq__(self, other):
        # nan-valued fields (infeasible trials) must compare equal across
        # process boundaries, where object identity of nan is lost
        if not isinstance(other, TrialRecord):
            return NotImplemented
        for name in self.__dataclass_fields__:
            a, b = getattr(self, name), getattr(other, name)
            if a != b and not (isinstance(a, float) and isinstance(b, float)
                               and math.isnan(a) and math.isnan(b)):
                return False
        return True


@dataclass(frozen=True)
class Aggregate:
    sweep_var: str
    sweep_value: float
    scheme: str
    objective: str
    mean_rate_nat_s: float
    stderr: float
    n_trials: int
    n_infeasible: int
    n_degenerate: int


@dataclass(frozen=True)
class Realization:
    ues: list[UeNode]
    gains: np.ndarray          # [n_ues, 2] total gains (AP1, AP2)
    rf_gain2: np.ndarray       # [n_strong, n_weak] squared D2D gains
    channel_hash: str


def _trial_seeds(master_seed: int, trial_index: int):
    root = np.random.SeedSequence([int(master_seed), int(trial_index)])
    return root.spawn(4)  # placement, orientations, rf fading, clustering draw


def realize_network(scenario: Scenario, master_seed: int, trial_index: int) -> Realization:
    seeds = _trial_seeds(master_seed, trial_index)
    n = scenario.n_per_role
    ues = place_ues(scenario.room, scenario.policy, seeds[0],
                    n_strong_per_cell=n, n_weak=n)
    orient_seeds = seeds[1].spawn(len(ues))
    ues = [ue.with_normal(sample_orientation(scenario.orientation, s))
           for ue, s in zip(ues, orient_seeds)]

    aps = scenario.aps
    gains = np.empty((len(ues), 2))
    for i, ue in enumerate(ues):
        for j, ap in enumerate(aps):
            g = los_gain(ap, ue)
            if scenario.nlos is not None:
                g += scenario.nlos.gain(ap, ue)
            gains[i, j] = g

    strong = ues[:2 * n]
    weak = ues[2 * n:]
    rf_seeds = seeds[2].spawn(len(strong) * len(weak))
    rf_gain2 = np.empty((len(strong), len(weak)))
    for i, su in enumerate(strong):
        for k, wu in enumerate(weak):
            d = float(np.linalg.norm(su.position - wu.position))
            rf_gain2[i, k] = sample_rf_gain(d, scenario.phy.nakagami_f,
                                            scenario.phy.pathloss_exponent,
                                            rf_seeds[i * len(weak) + k])
    digest = hashlib.sha256(gains.tobytes() + rf_gain2.tobytes()).hexdigest()[:16]
    return Realization(ues=ues, gains=gains, rf_gain2=rf_gain2, channel_hash=digest)


def _channel_state(real: Realization) -> ChannelState:
    rows = real.gains[:2].copy()
    h_w = real.gains[2].copy()
    zeros = np.zeros_like(rows)
    return ChannelState(h_ab=rows, h_w=h_w, h_ab_los=rows, h_ab_nlos=zeros,
                        h_w_los=h_w, h_w_nlos=np.zeros_like(h_w))


def _record(trial_index, scheme, objective, hash_, *, value=math.nan,
            rates: SchemeRates | None = None, alpha=(math.nan, math.nan),
            feasible=False, degenerate=False) -> TrialRecord:
    r_a = rates.r_a if rates else math.nan
    r_b = rates.r_b if rates else math.nan
    r_w = rates.r_w if rates else math.nan
    return TrialRecord(trial_index=trial_index, scheme=scheme, objective=objective,
                       value=value, rate_a=r_a, rate_b=r_b, rate_w=r_w,
                       alpha1=alpha[0], alpha2=alpha[1], feasible=feasible,
                       degenerate=degenerate, channel_hash=hash_)


def _rf_relay_rate(scenario: Scenario, channel: ChannelState,
                   rf_gain2: np.ndarray) -> float:
    phy = scenario.phy
    powers = [harvested_rf_power(channel.h_ab[k, 0], channel.h_ab[k, 1],
                                 phy.responsivity, phy.conversion_efficiency,
                                 phy.i_dc, phy.fill_factor, phy.thermal_voltage,
                                 phy.dark_current) for k in range(2)]
    return float(rate_weak_rf_link(rf_gain2[0], rf_gain2[1], powers[0], powers[1],
                                   phy.rf_bandwidth, phy.rf_noise_power))


def _eval_comp_scheme(scheme: str, scenario: Scenario, channel: ChannelState,
                      rf_gain2: np.ndarray, trial_index: int, hash_) -> TrialRecord:
    objective = scenario.objective
    try:
        precoder = zf_precoder(channel.h_ab)
    except DegenerateChannelError:
        return _record(trial_index, scheme, objective, hash_, degenerate=True)
    budget = build_link_budget(precoder, channel, scenario.phy)
    gamma, bw = budget.gamma_rx, budget.vlc_bandwidth

    if scheme == "comp-noma":
        if objective == "sum":
            alloc = solve_p1(budget, scenario.r_th, scenario.k_points)
        else:
            try:
                alloc = solve_p3(budget, scenario.k_points)
            except NumericalError:
                return _record(trial_index, scheme, objective, hash_, degenerate=True)
        if not alloc.feasible:
            return _record(trial_index, scheme, objective, hash_)
        rates = SchemeRates(
            scheme=scheme,
            r_a=float(rate_strong_own(alloc.alpha1, gamma, bw)),
            r_b=float(rate_strong_own(alloc.alpha2, gamma, bw)),
            r_w=float(rate_weak_vl_combined(alloc.alpha1, alloc.alpha2,
                                            budget.h_eff, gamma, bw)),
            r_decode_a=float(rate_strong_decode_weak(alloc.alpha1, gamma, bw)),
            r_decode_b=float(rate_strong_decode_weak(alloc.alpha2, gamma, bw)))
    else:  # comp-cnoma
        rf_rate = _rf_relay_rate(scenario, channel, rf_gain2)
        if objective == "sum":
            alloc = solve_p2(budget, scenario.r_th, rf_rate)
            if not alloc.feasible:
                return _record(trial_index, scheme, objective, hash_)
        else:
            alloc, _ = solve_p4(budget, rf_rate)
        rates = SchemeRates(
            scheme=scheme,
            r_a=float(rate_strong_own(alloc.alpha1, gamma, bw)),
            r_b=float(rate_strong_own(alloc.alpha2, gamma, bw)),
            r_w=float(rate_weak_rf_combined(alloc.alpha1, alloc.alpha2, gamma,
                                            bw, rf_rate)),
            r_decode_a=float(rate_strong_decode_weak(alloc.alpha1, gamma, bw)),
            r_decode_b=float(rate_strong_decode_weak(alloc.alpha2, gamma, bw)))

    value = rates.total if objective == "sum" else rates.minimum
    return _record(trial_index, scheme, objective, hash_, value=value, rates=rates,
                   alpha=(alloc.alpha1, alloc.alpha2), feasible=True)


def _eval_baseline(scheme: str, scenario: Scenario, channel: ChannelState,
                   rf_gain2: np.ndarray, trial_index: int, hash_) -> TrialRecord:
    objective = scenario.objective
    r_th = scenario.r_th if objective == "sum" else 0.0
    if scheme == "comp-oma":
        result = comp_oma_rates(channel, scenario.phy, r_th)
    elif scheme == "noma":
        result = noma_rates(channel, scenario.phy, r_th, objective, scenario.k_points)
    else:
        result = cnoma_rates(channel, scenario.phy, rf_gain2, r_th, objective,
                             scenario.k_points)
    if objective == "sum" and not result.feasible:
        return _record(trial_index, scheme, objective, hash_)
    value = result.rates.total if objective == "sum" else result.rates.minimum
    return _record(trial_index, scheme, objective, hash_, value=value,
                   rates=result.rates, alpha=(result.alpha, math.nan), feasible=True)


def _eval_clustered(scheme: str, policy: str, scenario: Scenario, real: Realization,
                    trial_index: int, cluster_seed) -> TrialRecord:
    n = scenario.n_per_role
    phy = scenario.phy
    gains_s1 = real.gains[:n]
    gains_s2 = real.gains[n:2 * n]
    gains_w = real.gains[2 * n:]

    def value_fn(i, j, k):
        return uc.cluster_value(
            uc.Cluster(i, j, k, 1.0 / n), gains_s1, gains_s2, gains_w, phy,
            scheme, scenario.r_th, scenario.k_points, rf_gain2=real.rf_gain2)

    values = uc.value_tensor(value_fn, n)
    if policy == "optimal":
        _, total = uc.optimal_uc(values)
    else:
        _, total = uc.random_uc(values, cluster_seed)
    tag = f"{scheme}/{policy}-uc"
    return TrialRecord(trial_index=trial_index, scheme=tag, objective="sum",
                       value=total, rate_a=math.nan, rate_b=math.nan,
                       rate_w=math.nan, alpha1=math.nan, alpha2=math.nan,
                       feasible=True, degenerate=False,
                       channel_hash=real.channel_hash)


def run_trial(scenario: Scenario, master_seed: int, trial_index: int) -> list[TrialRecord]:
    """All scheme records for one realization."""
    real = realize_network(scenario, master_seed, trial_index)
    records = []
    if scenario.n_per_role == 1:
        channel = _channel_state(real)
        rf = real.rf_gain2[:, 0]
        for scheme in scenario.schemes:
            if scheme in COMP_SCHEMES:
                records.append(_eval_comp_scheme(scheme, scenario, channel, rf,
                                                 trial_index, real.channel_hash))
            else:
                records.append(_eval_baseline(scheme, scenario, channel, rf,
                                              trial_index, real.channel_hash))
    else:
        cluster_seed = _trial_seeds(master_seed, trial_index)[3]
        for scheme in scenario.schemes:
            if scheme not in COMP_SCHEMES:
                raise ConfigurationError(
                    f"clustering experiments support {COMP_SCHEMES}, got {scheme!r}")
            for policy in scenario.clustering_policies:
                records.append(_eval_clustered(scheme, policy, scenario, real,
                                               trial_index, cluster_seed))
    return records


_WORKER_STATE: dict = {}


def _init_worker(scenario, master_seed):  # pragma: no cover - subprocess entry
    _WORKER_STATE["scenario"] = scenario
    _WORKER_STATE["master_seed"] = master_seed


def _worker_trial(trial_index):  # pragma: no cover - subprocess entry
    return run_trial(_WORKER_STATE["scenario"], _WORKER_STATE["master_seed"], trial_index)


def run_point(scenario: Scenario, master_seed: int, trials: int,
              threads: int = 1) -> list[TrialRecord]:
    """All trial records for one sweep point, in trial order."""
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if threads <= 1:
        batches = [run_trial(scenario, master_seed, i) for i in range(trials)]
    else:
        import multiprocessing as mp
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=threads, mp_context=ctx,
                                 initializer=_init_worker,
                                 initargs=(scenario, master_seed)) as pool:
            chunk = max(1, trials // (threads * 8))
            batches = list(pool.map(_worker_trial, range(trials), chunksize=chunk))
    return [rec for batch in batches for rec in batch]


def build_scenario(config, sweep_value: float, nlos_cache: dict | None = None) -> Scenario:
    """Scenario for one sweep point; NLOS solvers are cached per geometry."""
    var = config.sweep.variable
    room = config.room(
        ap_separation=sweep_value if var == "ap_separation_m" else None,
        ap_height=sweep_value if var == "ap_height_m" else None)
    policy = config.placement_policy(
        pd_area_cm2=sweep_value if var == "pd_area_cm2" else None)
    phy = config.phy(p_elec_dbm=sweep_value if var == "p_elec_dbm" else None)
    r_th = sweep_value if var == "rate_threshold_nat_s" else config.rate_threshold_nat_s

    nlos = None
    if config.nlos_enabled:
        key = (room.length, room.width, room.ap_height, config.surface_resolution_m,
               room.reflectivity_walls, room.reflectivity_ceiling, room.reflectivity_floor)
        if nlos_cache is not None and key in nlos_cache:
            nlos = nlos_cache[key]
        else:
            from .vlc_channel import discretize_room
            nlos = NlosSolver(discretize_room(room, config.surface_resolution_m))
            if nlos_cache is not None:
                nlos_cache[key] = nlos

    clustered = config.clustering.enabled
    return Scenario(room=room, policy=policy, orientation=config.orientation_model(),
                    phy=phy, r_th=r_th, k_points=config.line_search_points,
                    objective=config.objective, schemes=tuple(config.schemes),
                    nlos=nlos, n_per_role=config.clustering.n_per_role if clustered else 1,
                    clustering_policies=tuple(config.clustering.policies) if clustered else ())


def run_experiment(config) -> tuple[list[Aggregate], list[tuple[float, list[TrialRecord]]]]:
    """Sweep one variable across its grid; returns aggregates and raw records."""
    nlos_cache: dict = {}
    aggregates: list[Aggregate] = []
    raw: list[tuple[float, list[TrialRecord]]] = []
    for value in config.sweep.values:
        scenario = build_scenario(config, value, nlos_cache)
        records = run_point(scenario, config.master_seed, config.trials,
                            threads=config.threads)
        aggregates.extend(aggregate_records(records, config.sweep.variable, value,
                                            zero_fill=config.zero_fill_infeasible))
        raw.append((value, records))
    return aggregates, raw


def aggregate_records(records: list[TrialRecord], sweep_var: str, sweep_value: float,
                      zero_fill: bool = True) -> list[Aggregate]:
    """Per-scheme means in deterministic scheme order; aggregation is a plain
    in-order sum so the result is independent of how trials were scheduled."""
    by_scheme: dict[str, list[TrialRecord]] = {}
    for rec in records:
        by_scheme.setdefault(rec.scheme, []).append(rec)
    out = []
    for scheme, recs in by_scheme.items():
        recs = sorted(recs, key=lambda r: r.trial_index)
        n = len(recs)
        n_degenerate = sum(r.degenerate for r in recs)
        n_infeasible = sum((not r.feasible) and (not r.degenerate) for r in recs)
        if zero_fill:
            values = np.array([r.value if r.feasible else 0.0 for r in recs])
        else:
            values = np.array([r.value for r in recs if r.feasible])
        if values.size:
            mean = float(values.mean())
            stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
        else:
            mean, stderr = math.nan, math.nan
        out.append(Aggregate(sweep_var=sweep_var, sweep_value=sweep_value,
                             scheme=scheme, objective=recs[0].objective,
                             mean_rate_nat_s=mean, stderr=stderr, n_trials=n,
                             n_infeasible=n_infeasible, n_degenerate=n_degenerate))
    return out
