"""Command-line entry point: run experiments, verify numerics, dump oracle grids.

Subcommands:
  run     execute a sweep from a JSON config; writes the aggregate CSV, an
          optional raw per-trial CSV and a JSON run manifest
  verify  run the built-in verification suites (solver vs grid oracle,
          feasibility vs exhaustive scan, rate/feasibility-metric equivalence,
          amplitude fuzz, bounce-sum cross-check); nonzero exit on failure
  oracle  evaluate a solver instance on a dense alpha grid and export the
          heatmap CSV plus a manifest carrying the solver and oracle points

All files are written atomically (temp file + rename) so no output is left
half-written on error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .allocator import (bounds, feasibility_p1, g_metric, grid_oracle,
                        oracle_csv_rows, qos_threshold, solve_p1, solve_p2,
                        solve_p3, solve_p4)
from .config import ExperimentConfig
from .errors import ConfigurationError
from .montecarlo import run_experiment
from .precoding import check_amplitude, zf_precoder
from .rates import (C_RATE, LN2, LinkBudget, rate_strong_decode_weak,
                    rate_strong_own, rate_weak_vlc, sic_capacity)

CSV_HEADER = ("sweep_var,sweep_value,scheme,objective,mean_rate_nat_s,"
              "mean_rate_bit_s,stderr,n_trials,n_infeasible,n_degenerate")

RAW_HEADER = ("sweep_var,sweep_value,trial_index,scheme,objective,value_nat_s,"
              "rate_a_nat_s,rate_b_nat_s,rate_w_nat_s,alpha1,alpha2,feasible,"
              "degenerate,clustering_policy,channel_hash")


def atomic_write(path: str, content: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def aggregates_csv(aggregates) -> str:
    lines = [CSV_HEADER]
    for a in aggregates:
        mean_bit = a.mean_rate_nat_s / LN2
        lines.append(",".join(_fmt(v) for v in (
            a.sweep_var, a.sweep_value, a.scheme, a.objective, a.mean_rate_nat_s,
            mean_bit, a.stderr, a.n_trials, a.n_infeasible, a.n_degenerate)))
    return "\n".join(lines) + "\n"


def raw_records_csv(sweep_var, raw) -> str:
    lines = [RAW_HEADER]
    for sweep_value, records in raw:
        for r in records:
            policy = r.scheme.split("/", 1)[1] if "/" in r.scheme else ""
            lines.append(",".join(_fmt(v) for v in (
                sweep_var, sweep_value, r.trial_index, r.scheme, r.objective,
                r.value, r.rate_a, r.rate_b, r.rate_w, r.alpha1, r.alpha2,
                r.feasible, r.degenerate, policy, r.channel_hash)))
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            config = ExperimentConfig.from_json(fh.read())
        overrides = {}
        if args.out_dir is not None:
            overrides["out_dir"] = args.out_dir
        if args.threads is not None:
            overrides["threads"] = args.threads
        if args.zero_fill_infeasible is not None:
            overrides["zero_fill_infeasible"] = args.zero_fill_infeasible == "true"
        if args.units is not None:
            overrides["units"] = args.units
        if overrides:
            d = config.to_dict()
            d.update(overrides)
            config = ExperimentConfig.from_dict(d)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return 2
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    aggregates, raw = run_experiment(config)

    out_dir = config.out_dir
    csv_text = aggregates_csv(aggregates)
    csv_path = os.path.join(out_dir, "aggregates.csv")
    atomic_write(csv_path, csv_text)
    if config.raw_records:
        atomic_write(os.path.join(out_dir, "records.csv"),
                     raw_records_csv(config.sweep.variable, raw))

    manifest = {
        "config": config.to_dict(),
        "master_seed": config.master_seed,
        "package_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "csv_path": "aggregates.csv",
        "csv_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
    }
    atomic_write(os.path.join(out_dir, "manifest.json"),
                 json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    unit_div = 1.0 if config.units == "nat" else LN2
    unit_name = "nat/s" if config.units == "nat" else "bit/s"
    print(f"wrote {csv_path}")
    for a in aggregates:
        print(f"  {a.sweep_var}={a.sweep_value:g} {a.scheme:24s} "
              f"mean={a.mean_rate_nat_s / unit_div:.4g} {unit_name} "
              f"(n={a.n_trials}, infeasible={a.n_infeasible}, "
              f"degenerate={a.n_degenerate})")
    return 0


# --- verify suites ---------------------------------------------------------


def _random_budget(rng) -> LinkBudget:
    c_gamma = math.exp(rng.uniform(math.log(0.5), math.log(50.0)))
    return LinkBudget(gamma_rx=c_gamma / C_RATE, h_eff=rng.uniform(0.05, 1.5, size=2),
                      norm_scale=1e-5, sigma_s2=0.1116, noise_power=2e-14,
                      vlc_bandwidth=20e6, p_elec=1e-2, responsivity=0.58,
                      conversion_efficiency=0.6)


def _suite_solver_vs_grid(rng, tolerance):
    worst = 0.0
    done = 0
    while done < 25:
        budget = _random_budget(rng)
        r_th = rng.uniform(0.0, 0.6) * sic_capacity(budget.gamma_rx, budget.vlc_bandwidth)
        t_v = qos_threshold(r_th, budget.vlc_bandwidth)
        if not feasibility_p1(bounds(t_v, budget.gamma_rx), budget.h_eff, t_v,
                              budget.gamma_rx):
            continue
        done += 1
        sol = solve_p1(budget, r_th, 1000)
        ora = grid_oracle("p1", budget, r_th=r_th, n=300).allocation
        if ora.feasible:
            worst = max(worst, (ora.objective - sol.objective) / ora.objective)
        sol3 = solve_p3(budget, 1000)
        ora3 = grid_oracle("p3", budget, n=300).allocation
        worst = max(worst, (ora3.objective - sol3.objective) / ora3.objective)
        alloc4, _ = solve_p4(budget, rf_rate=1e9)
        ora4 = grid_oracle("p4", budget, n=300).allocation
        worst = max(worst, (ora4.objective - alloc4.objective) / alloc4.objective)
        sol2 = solve_p2(budget, r_th, rf_rate=max(2.0 * r_th, 1e6))
        ora2 = grid_oracle("p2", budget, r_th=r_th,
                           rf_rate=max(2.0 * r_th, 1e6), n=300).allocation
        if sol2.feasible and ora2.feasible:
            worst = max(worst, (ora2.objective - sol2.objective) / ora2.objective)
    return worst <= max(tolerance, 1e-3), worst


def _suite_feasibility_scan(rng, _tolerance):
    disagreements = 0
    for _ in range(100):
        budget = _random_budget(rng)
        r_th = rng.uniform(0.0, 0.7) * sic_capacity(budget.gamma_rx, budget.vlc_bandwidth)
        t_v = qos_threshold(r_th, budget.vlc_bandwidth)
        bnds = bounds(t_v, budget.gamma_rx)
        verdict = feasibility_p1(bnds, budget.h_eff, t_v, budget.gamma_rx)
        axis = np.linspace(0.0, 1.0, 200)
        dec = rate_strong_decode_weak(axis, budget.gamma_rx, budget.vlc_bandwidth)
        own = rate_strong_own(axis, budget.gamma_rx, budget.vlc_bandwidth)
        weak = rate_weak_vlc(axis[:, None], axis[None, :], budget.h_eff,
                             budget.gamma_rx, budget.vlc_bandwidth)
        ok1 = (dec >= r_th) & (own >= r_th)
        scanned = bool(np.any(ok1[:, None] & ok1[None, :] & (weak >= r_th)))
        if verdict != scanned:
            a = bnds.alpha_max_clamped
            witness = min(
                rate_strong_decode_weak(a, budget.gamma_rx, budget.vlc_bandwidth),
                rate_strong_own(a, budget.gamma_rx, budget.vlc_bandwidth),
                rate_weak_vlc(a, a, budget.h_eff, budget.gamma_rx,
                              budget.vlc_bandwidth))
            if verdict and witness >= r_th * (1 - 1e-12):
                continue
            disagreements += 1
    return disagreements == 0, float(disagreements)


def _suite_g_equivalence(rng, _tolerance):
    disagreements = 0
    for _ in range(10_000):
        budget = _random_budget(rng)
        t_v = qos_threshold(rng.uniform(0.0, 2.0) * 1e7, budget.vlc_bandwidth)
        a1, a2 = rng.uniform(0.0, 1.0, size=2)
        g = g_metric(a1, a2, budget.h_eff, t_v, budget.gamma_rx)
        rate = rate_weak_vlc(a1, a2, budget.h_eff, budget.gamma_rx,
                             budget.vlc_bandwidth)
        r_th = 0.5 * budget.vlc_bandwidth * math.log1p(t_v)
        if (g >= 0.0) != (rate >= r_th):
            scale = t_v * (C_RATE * float(np.sum(budget.h_eff ** 2))
                           + 1.0 / budget.gamma_rx)
            if abs(g) > 1e-9 * max(scale, 1e-300):
                disagreements += 1
    return disagreements == 0, float(disagreements)


def _suite_amplitude(rng, tolerance):
    worst = 0.0
    nu, i_dc = 0.33, 0.3162277660168379
    cap = (nu * i_dc) ** 2 / 2.0
    for _ in range(20):
        h = rng.uniform(0.2, 1.0, size=(2, 2)) * 1e-4
        h[0, 0] *= 5.0
        h[1, 1] *= 5.0
        precoder = zf_precoder(h)
        report = check_amplitude(precoder, rng.uniform(0, 1), rng.uniform(0, 1),
                                 rng.uniform(0, 1) * cap, nu, i_dc,
                                 n_samples=5000, seed=int(rng.integers(2 ** 32)),
                                 tolerance=tolerance)
        worst = max(worst, report.max_ratio)
    # tight case: full power, alpha = 1/2, all-ones messages touch the bound
    from .precoding import Precoder
    identity = Precoder(w=np.eye(2), norm_scale=1.0, h_ab_pinv=np.eye(2))
    s_peak = 2.0 * math.sqrt(0.5 * cap)
    worst = max(worst, s_peak / (nu * i_dc))
    return worst <= 1.0 + tolerance, worst


def _suite_nlos_neumann(rng, _tolerance):
    import math as _math

    from .geometry import (ROLE_WEAK, ApNode, OrientationModel, RoomConfig,
                           UeNode, sample_orientation, vec3)
    from .vlc_channel import NlosSolver, discretize_room

    solver = NlosSolver(discretize_room(RoomConfig(), 0.5))
    model = OrientationModel()
    worst = 0.0
    for _ in range(10):
        ap = ApNode(position=vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), 2.5),
                    half_power_semiangle=_math.radians(45.0))
        ue = UeNode(position=vec3(rng.uniform(-3.4, 3.4), rng.uniform(-3.4, 3.4), 0.9),
                    normal=sample_orientation(model, int(rng.integers(2 ** 32))),
                    pd_area=1e-4, responsivity=0.58, fov=_math.radians(60.0),
                    role=ROLE_WEAK)
        inv = solver.gain(ap, ue)
        if inv <= 0.0:
            continue
        neumann = solver.neumann_gain(ap, ue, terms=51)
        worst = max(worst, abs(inv - neumann) / inv)
    return worst <= 1e-8, worst


SUITES = [
    ("solver-vs-grid", _suite_solver_vs_grid),
    ("feasibility-vs-scan", _suite_feasibility_scan),
    ("g-equivalence", _suite_g_equivalence),
    ("amplitude-fuzz", _suite_amplitude),
    ("nlos-neumann", _suite_nlos_neumann),
]


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    failed = False
    for name, suite in SUITES:
        ok, deviation = suite(rng, args.tolerance)
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: max observed deviation {deviation:.6g}")
        failed |= not ok
    return 1 if failed else 0


def cmd_oracle(args) -> int:
    try:
        with open(args.instance) as fh:
            inst = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: cannot read instance file: {e}", file=sys.stderr)
        return 2

    problem = inst.get("problem")
    if problem not in ("p1", "p2", "p3", "p4"):
        print(f"error: instance.problem must be p1|p2|p3|p4, got {problem!r}",
              file=sys.stderr)
        return 2
    try:
        budget = LinkBudget(gamma_rx=float(inst["gamma_rx"]),
                            h_eff=np.array(inst["h_eff"], dtype=float),
                            norm_scale=float(inst.get("norm_scale", 1.0)),
                            sigma_s2=float(inst.get("sigma_s2", 0.1116)),
                            noise_power=float(inst.get("noise_power", 2e-14)),
                            vlc_bandwidth=float(inst.get("vlc_bandwidth_hz", 20e6)),
                            p_elec=float(inst.get("p_elec_w", 1e-2)),
                            responsivity=float(inst.get("responsivity_a_per_w", 0.58)),
                            conversion_efficiency=float(
                                inst.get("conversion_efficiency_w_per_a", 0.6)))
    except (KeyError, TypeError, ValueError) as e:
        print(f"error: bad instance fields: {e}", file=sys.stderr)
        return 2
    r_th = float(inst.get("rate_threshold_nat_s", 0.0))
    rf_rate = float(inst.get("rf_rate_nat_s", 0.0))
    n = int(args.points)

    result = grid_oracle(problem, budget, r_th=r_th, rf_rate=rf_rate, n=n,
                         return_grid=True)
    if problem == "p1":
        solver = solve_p1(budget, r_th, 1000)
    elif problem == "p2":
        solver = solve_p2(budget, r_th, rf_rate)
    elif problem == "p3":
        solver = solve_p3(budget, 1000)
    else:
        solver, _ = solve_p4(budget, rf_rate)

    lines = ["alpha1,alpha2,objective_nat_s,feasible"]
    for a1, a2, obj, ok in oracle_csv_rows(result):
        lines.append(f"{a1!r},{a2!r},{obj!r},{'true' if ok else 'false'}")
    csv_text = "\n".join(lines) + "\n"
    csv_path = os.path.join(args.out_dir, "oracle_grid.csv")
    atomic_write(csv_path, csv_text)

    def point(alloc):
        return {"alpha1": alloc.alpha1, "alpha2": alloc.alpha2,
                "objective_nat_s": alloc.objective, "feasible": alloc.feasible,
                "scheme": alloc.scheme}

    manifest = {
        "instance": inst,
        "grid_points": n,
        "solver": point(solver),
        "oracle_argmax": point(result.allocation),
        "csv_path": "oracle_grid.csv",
        "csv_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
    }
    atomic_write(os.path.join(args.out_dir, "oracle_manifest.json"),
                 json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {csv_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlcomp",
        description="Two-cell VLC network simulator: coordinated NOMA/C-NOMA "
                    "power allocation and Monte Carlo sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment sweep from a JSON config")
    run.add_argument("--config", required=True, help="path to the JSON config")
    run.add_argument("--out-dir", default=None, help="output directory override")
    run.add_argument("--threads", type=int, default=None, help="worker processes")
    run.add_argument("--zero-fill-infeasible", choices=("true", "false"), default=None,
                     help="average infeasible trials as zeros (true) or exclude them")
    run.add_argument("--units", choices=("nat", "bit"), default=None,
                     help="display units for the console summary")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="run the verification suites")
    verify.add_argument("--seed", type=int, default=2024)
    verify.add_argument("--tolerance", type=float, default=0.0,
                        help="extra slack for the amplitude suite (exact bound: 0)")
    verify.set_defaults(func=cmd_verify)

    oracle = sub.add_parser("oracle", help="dump an alpha-grid heatmap for one instance")
    oracle.add_argument("--instance", required=True, help="instance JSON path")
    oracle.add_argument("--out-dir", default="out", help="output directory")
    oracle.add_argument("--points", type=int, default=200, help="grid points per axis")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
