"""Indoor room layout, AP/UE placement and link geometry.

Coordinate frame: room centered at the origin in x/y, floor at z = 0,
APs mounted on the ceiling plane z = ap_height facing straight down,
UEs on the horizontal plane z = ue_height. The two APs sit symmetrically
about the room center on the x axis at (+-ap_separation/2, 0, ap_height).

Every random draw flows through an explicit seed so that a (config, seed)
pair reproduces placements and orientations bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError

Vec3 = np.ndarray  # shape (3,), also used for unit direction vectors

ROLE_STRONG_1 = "strong-cell1"
ROLE_STRONG_2 = "strong-cell2"
ROLE_WEAK = "weak"

# UE placement rejection sampling cap; the acceptance region is a constant
# fraction of its bounding box, so hitting this indicates a broken config.
_MAX_REJECTION_DRAWS = 100_000


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=float)


def unit(v: Vec3) -> Vec3:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


@dataclass(frozen=True)
class RoomConfig:
    """Rectangular room with two ceiling APs and frozen surface reflectivities."""

    length: float = 7.0          # m, x extent
    width: float = 7.0           # m, y extent
    ap_height: float = 2.5       # m
    ue_height: float = 0.9       # m
    ap_separation: float = 4.0   # m
    reflectivity_walls: float = 0.8
    reflectivity_ceiling: float = 0.8
    reflectivity_floor: float = 0.3

    def __post_init__(self):
        if not (self.ap_separation < self.length):
            raise ConfigurationError(
                f"ap_separation={self.ap_separation} must be smaller than room length={self.length}")
        if not (0.0 < self.ue_height < self.ap_height):
            raise ConfigurationError(
                f"require 0 < ue_height < ap_height, got ue_height={self.ue_height}, "
                f"ap_height={self.ap_height}")
        for name in ("reflectivity_walls", "reflectivity_ceiling", "reflectivity_floor"):
            z = getattr(self, name)
            if not (0.0 <= z < 1.0):
                raise ConfigurationError(f"{name}={z} must lie in [0, 1)")

    @property
    def ap_positions(self) -> tuple[Vec3, Vec3]:
        half = self.ap_separation / 2.0
        return vec3(-half, 0.0, self.ap_height), vec3(half, 0.0, self.ap_height)


@dataclass(frozen=True)
class ApNode:
    """Ceiling-mounted LED access point, fixed vertically downward."""

    position: Vec3
    half_power_semiangle: float       # rad, in (0, pi/2)
    conversion_efficiency: float = 0.6  # W/A
    i_dc: float = 0.3162277660168379    # A
    modulation_index: float = 0.33
    orientation: Vec3 = field(default_factory=lambda: vec3(0.0, 0.0, -1.0))

    def __post_init__(self):
        if not (0.0 < self.half_power_semiangle < math.pi / 2):
            raise ConfigurationError(
                f"half_power_semiangle={self.half_power_semiangle} rad must be in (0, pi/2)")
        if not np.allclose(self.orientation, [0.0, 0.0, -1.0]):
            raise ConfigurationError("AP orientation is fixed vertically downward")

    @property
    def lambertian_order(self) -> float:
        # m = -1 / log2(cos(half-power semi-angle))
        return -1.0 / math.log2(math.cos(self.half_power_semiangle))


@dataclass(frozen=True)
class UeNode:
    """User terminal with a single photodiode of limited field of view."""

    position: Vec3
    normal: Vec3                 # unit PD normal
    pd_area: float               # m^2
    responsivity: float          # A/W
    fov: float                   # rad, acceptance half-angle, in (0, pi/2]
    role: str                    # ROLE_STRONG_1 | ROLE_STRONG_2 | ROLE_WEAK

    def __post_init__(self):
        n = float(np.linalg.norm(self.normal))
        if abs(n - 1.0) > 1e-9:
            raise ConfigurationError(f"UE normal must be unit length, got |n|={n}")
        if not (0.0 < self.fov <= math.pi / 2):
            raise ConfigurationError(f"fov={self.fov} rad must be in (0, pi/2]")
        if self.role not in (ROLE_STRONG_1, ROLE_STRONG_2, ROLE_WEAK):
            raise ConfigurationError(f"unknown UE role {self.role!r}")

    def with_normal(self, normal: Vec3) -> "UeNode":
        return replace(self, normal=np.asarray(normal, dtype=float))


@dataclass(frozen=True)
class PlacementPolicy:
    """Where UEs may land and which PD hardware they carry.

    Strong UEs are uniform in a disk of radius center_disk_radius around
    their AP's floor projection; the weak UE is uniform in the lens-shaped
    intersection of the two coverage disks of radius
    ap_height * tan(half_power_semiangle).
    """

    half_power_semiangle: float      # rad, sets the coverage radius
    center_disk_radius: float = 0.5  # m
    pd_area: float = 1e-4            # m^2
    responsivity: float = 0.58       # A/W
    fov: float = math.radians(60.0)  # rad


@dataclass(frozen=True)
class OrientationModel:
    """Gaussian polar tilt (rejection-clipped to [0, pi/2]) with uniform azimuth."""

    polar_mean: float = math.radians(41.0)  # rad
    polar_std: float = math.radians(9.0)    # rad

    def __post_init__(self):
        if not (0.0 <= self.polar_mean <= math.pi / 2):
            raise ConfigurationError("polar_mean must lie in [0, pi/2]")
        if self.polar_std < 0.0:
            raise ConfigurationError("polar_std must be non-negative")


def coverage_radius(room: RoomConfig, half_power_semiangle: float) -> float:
    """Cell radius R = ap_height * tan(half-power semi-angle)."""
    return room.ap_height * math.tan(half_power_semiangle)


def _sample_disk(rng: np.random.Generator, center_xy, radius: float):
    r = radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return center_xy[0] + r * math.cos(theta), center_xy[1] + r * math.sin(theta)


def _sample_lens(rng: np.random.Generator, c1_xy, c2_xy, radius: float, room: RoomConfig):
    # Rejection sampling inside the bounding box of the lens, clipped to the room.
    lo_x = max(c2_xy[0] - radius, -room.length / 2)
    hi_x = min(c1_xy[0] + radius, room.length / 2)
    half_d = abs(c2_xy[0] - c1_xy[0]) / 2.0
    h = math.sqrt(max(radius * radius - half_d * half_d, 0.0))
    lo_y = max(-h, -room.width / 2)
    hi_y = min(h, room.width / 2)
    for _ in range(_MAX_REJECTION_DRAWS):
        x = lo_x + (hi_x - lo_x) * rng.random()
        y = lo_y + (hi_y - lo_y) * rng.random()
        d1 = (x - c1_xy[0]) ** 2 + (y - c1_xy[1]) ** 2
        d2 = (x - c2_xy[0]) ** 2 + (y - c2_xy[1]) ** 2
        if d1 <= radius * radius and d2 <= radius * radius:
            return x, y
    raise ConfigurationError("lens sampling failed to converge; overlap region is degenerate")


def place_ues(room: RoomConfig, policy: PlacementPolicy, seed,
              n_strong_per_cell: int = 1, n_weak: int = 1) -> list[UeNode]:
    """Sample UE positions for one realization; PD normals start facing up.

    Returns strong-cell1 UEs, then strong-cell2, then weak, in that order.
    Raises ConfigurationError when the two coverage disks do not overlap.
    """
    radius = coverage_radius(room, policy.half_power_semiangle)
    p1, p2 = room.ap_positions
    if room.ap_separation >= 2.0 * radius:
        raise ConfigurationError(
            "cell overlap region is empty: ap_separation="
            f"{room.ap_separation} m >= 2 * R where R = ap_height * tan(half_power_semiangle) = "
            f"{radius:.4g} m (ap_height={room.ap_height}, "
            f"half_power_semiangle={math.degrees(policy.half_power_semiangle):.4g} deg)")

    rng = np.random.default_rng(seed)
    up = vec3(0.0, 0.0, 1.0)

    def make(x, y, role):
        return UeNode(position=vec3(x, y, room.ue_height), normal=up,
                      pd_area=policy.pd_area, responsivity=policy.responsivity,
                      fov=policy.fov, role=role)

    ues: list[UeNode] = []
    for center, role in (((p1[0], p1[1]), ROLE_STRONG_1), ((p2[0], p2[1]), ROLE_STRONG_2)):
        for _ in range(n_strong_per_cell):
            x, y = _sample_disk(rng, center, policy.center_disk_radius)
            x = min(max(x, -room.length / 2), room.length / 2)
            y = min(max(y, -room.width / 2), room.width / 2)
            ues.append(make(x, y, role))
    for _ in range(n_weak):
        x, y = _sample_lens(rng, (p1[0], p1[1]), (p2[0], p2[1]), radius, room)
        ues.append(make(x, y, ROLE_WEAK))
    return ues


def sample_orientation(model: OrientationModel, seed) -> Vec3:
    """One unit PD normal: polar angle Gaussian clipped to [0, pi/2], azimuth uniform."""
    rng = np.random.default_rng(seed)
    if model.polar_std == 0.0:
        theta = model.polar_mean
    else:
        while True:
            theta = rng.normal(model.polar_mean, model.polar_std)
            if 0.0 <= theta <= math.pi / 2:
                break
    omega = 2.0 * math.pi * rng.random()
    return vec3(math.sin(theta) * math.cos(omega),
                math.sin(theta) * math.sin(omega),
                math.cos(theta))


def link_angles(ap: ApNode, ue: UeNode) -> tuple[float, float, float]:
    """Distance, angle of radiance phi (at the AP) and angle of incidence psi (at the PD)."""
    delta = ue.position - ap.position
    d = float(np.linalg.norm(delta))
    if d == 0.0:
        raise ValueError("AP and UE positions coincide")
    down = delta / d
    cos_phi = float(np.clip(np.dot(down, ap.orientation), -1.0, 1.0))
    cos_psi = float(np.clip(np.dot(-down, ue.normal), -1.0, 1.0))
    return d, math.acos(cos_phi), math.acos(cos_psi)
