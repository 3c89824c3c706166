"""Experiment configuration: JSON schema, validation and scenario building.

Keys are flat snake_case names mirroring the simulation-parameter table
(half_power_semiangle_deg, i_dc_dbm / i_dc_amp, pd_area_cm2, ...). Required
keys: trials, master_seed, sweep. Everything else defaults to the standard
simulation setup. Validation collects every problem and reports them
all at once with field paths.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import ConfigurationError
from .geometry import OrientationModel, PlacementPolicy, RoomConfig
from .rates import PhyParams

SWEEP_VARIABLES = ("p_elec_dbm", "rate_threshold_nat_s", "pd_area_cm2",
                   "ap_separation_m", "ap_height_m")
SCHEMES = ("comp-noma", "comp-cnoma", "comp-oma", "cnoma", "noma")
UC_POLICIES = ("optimal", "random")


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def dbm_to_amp(dbm: float) -> float:
    # a dBm figure applied to a bias current: 10^(dBm/10) milliamps
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ClusteringSpec:
    enabled: bool = False
    n_per_role: int = 2
    policies: tuple[str, ...] = ("optimal", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    # required
    trials: int
    master_seed: int
    sweep: SweepSpec
    # room
    length_m: float = 7.0
    width_m: float = 7.0
    ap_height_m: float = 2.5
    ue_height_m: float = 0.9
    ap_separation_m: float = 4.0
    reflectivity_walls: float = 0.8
    reflectivity_ceiling: float = 0.8
    reflectivity_floor: float = 0.3
    # AP / LED
    half_power_semiangle_deg: float = 45.0
    conversion_efficiency_w_per_a: float = 0.6
    i_dc_dbm: float | None = None
    i_dc_amp: float | None = None
    modulation_index: float = 0.33
    # UE / PD
    pd_area_cm2: float = 1.0
    responsivity_a_per_w: float = 0.58
    fov_deg: float = 60.0
    center_disk_radius_m: float = 0.5
    polar_mean_deg: float = 41.0
    polar_std_deg: float = 9.0
    # VLC link
    vlc_bandwidth_hz: float = 20e6
    noise_psd: float = 1e-21
    sigma_d: float = 1.0
    nlos_enabled: bool = True
    surface_resolution_m: float = 0.5
    # RF link
    rf_bandwidth_hz: float = 16e6
    rf_noise_psd: float = 1e-21
    nakagami_f: float = 1.0
    pathloss_exponent: float = 2.0
    fill_factor: float = 0.75
    thermal_voltage_v: float = 0.025
    dark_current_a: float = 1e-10
    # operating point
    p_elec_dbm: float = 9.5
    amplitude_policy: str = "clamp"      # clamp | error
    rate_threshold_nat_s: float = 10e6
    line_search_points: int = 1000
    # experiment
    schemes: tuple[str, ...] = SCHEMES
    objective: str = "sum"               # sum | min
    clustering: ClusteringSpec = field(default_factory=ClusteringSpec)
    zero_fill_infeasible: bool = True
    units: str = "nat"                   # nat | bit (display only)
    out_dir: str = "out"
    raw_records: bool = False
    threads: int = 1

    @property
    def i_dc_ampere(self) -> float:
        if self.i_dc_amp is not None:
            return self.i_dc_amp
        return dbm_to_amp(self.i_dc_dbm if self.i_dc_dbm is not None else 25.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sweep"] = {"variable": self.sweep.variable, "values": list(self.sweep.values)}
        d["clustering"] = {"enabled": self.clustering.enabled,
                           "n_per_role": self.clustering.n_per_role,
                           "policies": list(self.clustering.policies)}
        d["schemes"] = list(self.schemes)
        # exactly one bias-current key may appear
        for key in ("i_dc_dbm", "i_dc_amp"):
            if d[key] is None:
                del d[key]
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        errors: list[str] = []

        def fail(path, msg):
            errors.append(f"{path}: {msg}")

        if not isinstance(raw, dict):
            raise ConfigurationError("config root must be a JSON object")
        known = set(cls.__dataclass_fields__)
        for key in raw:
            if key not in known:
                fail(key, "unknown field")

        def number(path, default=None, lo=None, hi=None, kind=float,
                   lo_open=False, required=False):
            if path not in raw:
                if required:
                    fail(path, "required field is missing")
                    return None
                return default
            v = raw[path]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                fail(path, f"expected a number, got {v!r}")
                return default
            if kind is int and int(v) != v:
                fail(path, f"expected an integer, got {v!r}")
                return default
            v = kind(v)
            if lo is not None and (v <= lo if lo_open else v < lo):
                fail(path, f"must be {'>' if lo_open else '>='} {lo}, got {v}")
            if hi is not None and v > hi:
                fail(path, f"must be <= {hi}, got {v}")
            return v

        def flag(path, default):
            if path not in raw:
                return default
            v = raw[path]
            if not isinstance(v, bool):
                fail(path, f"expected true/false, got {v!r}")
                return default
            return v

        def choice(path, default, options):
            if path not in raw:
                return default
            v = raw[path]
            if v not in options:
                fail(path, f"must be one of {sorted(options)}, got {v!r}")
                return default
            return v

        kw: dict = {}
        kw["trials"] = number("trials", kind=int, lo=1, required=True)
        kw["master_seed"] = number("master_seed", kind=int, lo=0, required=True)

        sweep_raw = raw.get("sweep")
        if sweep_raw is None:
            fail("sweep", "required field is missing")
            kw["sweep"] = None
        elif not isinstance(sweep_raw, dict):
            fail("sweep", "expected an object with variable and values")
            kw["sweep"] = None
        else:
            var = sweep_raw.get("variable")
            if var not in SWEEP_VARIABLES:
                fail("sweep.variable", f"must be one of {list(SWEEP_VARIABLES)}, got {var!r}")
            values = sweep_raw.get("values")
            if (not isinstance(values, list) or not values
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                               and math.isfinite(v) for v in values)):
                fail("sweep.values", "must be a non-empty list of finite numbers")
                values = [0.0]
            kw["sweep"] = SweepSpec(variable=var if var in SWEEP_VARIABLES else "p_elec_dbm",
                                    values=tuple(float(v) for v in values))

        kw["length_m"] = number("length_m", 7.0, lo=0, lo_open=True)
        kw["width_m"] = number("width_m", 7.0, lo=0, lo_open=True)
        kw["ap_height_m"] = number("ap_height_m", 2.5, lo=0, lo_open=True)
        kw["ue_height_m"] = number("ue_height_m", 0.9, lo=0, lo_open=True)
        kw["ap_separation_m"] = number("ap_separation_m", 4.0, lo=0, lo_open=True)
        for name in ("reflectivity_walls", "reflectivity_ceiling", "reflectivity_floor"):
            kw[name] = number(name, getattr(cls, name), lo=0.0, hi=0.999)
        kw["half_power_semiangle_deg"] = number("half_power_semiangle_deg", 45.0,
                                                lo=0, hi=89.9, lo_open=True)
        kw["conversion_efficiency_w_per_a"] = number("conversion_efficiency_w_per_a",
                                                     0.6, lo=0, lo_open=True)
        kw["i_dc_dbm"] = number("i_dc_dbm", None)
        kw["i_dc_amp"] = number("i_dc_amp", None, lo=0, lo_open=True)
        if kw["i_dc_dbm"] is not None and kw["i_dc_amp"] is not None:
            fail("i_dc_dbm", "set exactly one of i_dc_dbm / i_dc_amp, not both")
        kw["modulation_index"] = number("modulation_index", 0.33, lo=0, hi=1.0, lo_open=True)
        kw["pd_area_cm2"] = number("pd_area_cm2", 1.0, lo=0, lo_open=True)
        kw["responsivity_a_per_w"] = number("responsivity_a_per_w", 0.58, lo=0, lo_open=True)
        kw["fov_deg"] = number("fov_deg", 60.0, lo=0, hi=90.0, lo_open=True)
        kw["center_disk_radius_m"] = number("center_disk_radius_m", 0.5, lo=0.0)
        kw["polar_mean_deg"] = number("polar_mean_deg", 41.0, lo=0.0, hi=90.0)
        kw["polar_std_deg"] = number("polar_std_deg", 9.0, lo=0.0)
        kw["vlc_bandwidth_hz"] = number("vlc_bandwidth_hz", 20e6, lo=0, lo_open=True)
        kw["noise_psd"] = number("noise_psd", 1e-21, lo=0, lo_open=True)
        kw["sigma_d"] = number("sigma_d", 1.0, lo=0, lo_open=True)
        kw["nlos_enabled"] = flag("nlos_enabled", True)
        kw["surface_resolution_m"] = number("surface_resolution_m", 0.5, lo=0, lo_open=True)
        kw["rf_bandwidth_hz"] = number("rf_bandwidth_hz", 16e6, lo=0, lo_open=True)
        kw["rf_noise_psd"] = number("rf_noise_psd", 1e-21, lo=0, lo_open=True)
        kw["nakagami_f"] = number("nakagami_f", 1.0, lo=0.5)
        kw["pathloss_exponent"] = number("pathloss_exponent", 2.0, lo=0.0)
        kw["fill_factor"] = number("fill_factor", 0.75, lo=0, hi=1.0, lo_open=True)
        kw["thermal_voltage_v"] = number("thermal_voltage_v", 0.025, lo=0, lo_open=True)
        kw["dark_current_a"] = number("dark_current_a", 1e-10, lo=0, lo_open=True)
        kw["p_elec_dbm"] = number("p_elec_dbm", 9.5)
        kw["amplitude_policy"] = choice("amplitude_policy", "clamp", ("clamp", "error"))
        kw["rate_threshold_nat_s"] = number("rate_threshold_nat_s", 10e6, lo=0.0)
        kw["line_search_points"] = number("line_search_points", 1000, kind=int, lo=2)
        kw["objective"] = choice("objective", "sum", ("sum", "min"))
        kw["zero_fill_infeasible"] = flag("zero_fill_infeasible", True)
        kw["units"] = choice("units", "nat", ("nat", "bit"))
        kw["raw_records"] = flag("raw_records", False)
        kw["threads"] = number("threads", 1, kind=int, lo=1)
        out_dir = raw.get("out_dir", "out")
        if not isinstance(out_dir, str) or not out_dir:
            fail("out_dir", f"expected a non-empty string, got {out_dir!r}")
            out_dir = "out"
        kw["out_dir"] = out_dir

        schemes = raw.get("schemes", list(SCHEMES))
        if (not isinstance(schemes, list) or not schemes
                or any(s not in SCHEMES for s in schemes)):
            fail("schemes", f"must be a non-empty subset of {list(SCHEMES)}, got {schemes!r}")
            schemes = list(SCHEMES)
        kw["schemes"] = tuple(schemes)

        cl_raw = raw.get("clustering", {})
        if not isinstance(cl_raw, dict):
            fail("clustering", "expected an object")
            cl_raw = {}
        enabled = cl_raw.get("enabled", False)
        if not isinstance(enabled, bool):
            fail("clustering.enabled", f"expected true/false, got {enabled!r}")
            enabled = False
        n_per_role = cl_raw.get("n_per_role", 2)
        if not isinstance(n_per_role, int) or isinstance(n_per_role, bool) or n_per_role < 1:
            fail("clustering.n_per_role", f"expected a positive integer, got {n_per_role!r}")
            n_per_role = 2
        policies = cl_raw.get("policies", ["optimal", "random"])
        if (not isinstance(policies, list) or not policies
                or any(p not in UC_POLICIES for p in policies)):
            fail("clustering.policies",
                 f"must be a non-empty subset of {list(UC_POLICIES)}, got {policies!r}")
            policies = ["optimal", "random"]
        kw["clustering"] = ClusteringSpec(enabled=enabled, n_per_role=n_per_role,
                                          policies=tuple(policies))
        if enabled:
            bad = [s for s in kw["schemes"] if s not in ("comp-noma", "comp-cnoma")]
            if bad:
                fail("schemes", f"clustering experiments support only the coordinated "
                                f"schemes, got {bad}")
            if kw["objective"] != "sum":
                fail("objective", "clustering experiments are defined for the sum objective")

        if kw["ue_height_m"] is not None and kw["ap_height_m"] is not None \
                and kw["ue_height_m"] >= kw["ap_height_m"]:
            fail("ue_height_m", "must be below ap_height_m")
        if kw["ap_separation_m"] is not None and kw["length_m"] is not None \
                and kw["ap_separation_m"] >= kw["length_m"]:
            fail("ap_separation_m", "must be smaller than length_m")

        if errors:
            raise ConfigurationError(
                "invalid configuration:\n  " + "\n  ".join(sorted(errors)))
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"config is not valid JSON: {e}") from None
        return cls.from_dict(raw)

    # builders -------------------------------------------------------------

    def room(self, ap_separation=None, ap_height=None) -> RoomConfig:
        return RoomConfig(length=self.length_m, width=self.width_m,
                          ap_height=ap_height if ap_height is not None else self.ap_height_m,
                          ue_height=self.ue_height_m,
                          ap_separation=(ap_separation if ap_separation is not None
                                         else self.ap_separation_m),
                          reflectivity_walls=self.reflectivity_walls,
                          reflectivity_ceiling=self.reflectivity_ceiling,
                          reflectivity_floor=self.reflectivity_floor)

    def placement_policy(self, pd_area_cm2=None) -> PlacementPolicy:
        area = (pd_area_cm2 if pd_area_cm2 is not None else self.pd_area_cm2) * 1e-4
        return PlacementPolicy(half_power_semiangle=math.radians(self.half_power_semiangle_deg),
                               center_disk_radius=self.center_disk_radius_m,
                               pd_area=area, responsivity=self.responsivity_a_per_w,
                               fov=math.radians(self.fov_deg))

    def orientation_model(self) -> OrientationModel:
        return OrientationModel(polar_mean=math.radians(self.polar_mean_deg),
                                polar_std=math.radians(self.polar_std_deg))

    def phy(self, p_elec_dbm=None) -> PhyParams:
        """Physical parameters with the amplitude constraint applied per policy."""
        dbm = p_elec_dbm if p_elec_dbm is not None else self.p_elec_dbm
        p_elec = dbm_to_watt(dbm)
        cap = (self.modulation_index * self.i_dc_ampere) ** 2 / 2.0
        if p_elec > cap:
            if self.amplitude_policy == "error":
                raise ConfigurationError(
                    f"p_elec {dbm} dBm exceeds the amplitude-constraint cap "
                    f"(nu*I_DC)^2/2 = {cap:.4g} W")
            p_elec = cap
        return PhyParams(p_elec=p_elec, vlc_bandwidth=self.vlc_bandwidth_hz,
                         vlc_noise_psd=self.noise_psd, sigma_d=self.sigma_d,
                         responsivity=self.responsivity_a_per_w,
                         conversion_efficiency=self.conversion_efficiency_w_per_a,
                         i_dc=self.i_dc_ampere, modulation_index=self.modulation_index,
                         rf_bandwidth=self.rf_bandwidth_hz, rf_noise_psd=self.rf_noise_psd,
                         fill_factor=self.fill_factor, thermal_voltage=self.thermal_voltage_v,
                         dark_current=self.dark_current_a, nakagami_f=self.nakagami_f,
                         pathloss_exponent=self.pathloss_exponent)
