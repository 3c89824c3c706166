"""Lambertian LOS gain, frequency-domain NLOS gain and channel-state assembly.

The NLOS path models an unlimited number of diffuse reflections: the room
interior is tiled into Lambertian surface elements (order 1, 90 deg FOV) and
the stationary bounce cascade is resolved through the matrix inverse

    h_nlos = r^T G (I - E G)^(-1) t

with t the AP-to-element gains, E the element-to-element transfer matrix,
r the element-to-receiver gains and G = diag(reflectivities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from . import _kernels
from .errors import ConfigurationError, NumericalError
from .geometry import ApNode, RoomConfig, UeNode, Vec3, link_angles

# Surface elements act as Lambertian re-radiators of order 1 with a 90 deg FOV.
_ELEMENT_ORDER = 1.0
_ELEMENT_COS_FOV = 0.0
# Element pairs closer than this many patch sides get sub-patch quadrature.
_SUBDIV_SIDES = 2.5


@dataclass(frozen=True)
class SurfaceElement:
    position: Vec3
    normal: Vec3        # unit, pointing into the room
    area: float         # m^2
    reflectivity: float # in [0, 1)


@dataclass(frozen=True)
class ChannelState:
    """All VLC gains of one realization.

    h_ab rows are (strong-cell1, strong-cell2) and columns (AP1, AP2); h_w is
    ordered (AP1, AP2). The LOS/NLOS split is retained for diagnostics.
    """

    h_ab: np.ndarray       # 2x2 total gains
    h_w: np.ndarray        # 2-vector
    h_ab_los: np.ndarray
    h_ab_nlos: np.ndarray
    h_w_los: np.ndarray
    h_w_nlos: np.ndarray

    def __post_init__(self):
        for name in ("h_ab", "h_w", "h_ab_los", "h_ab_nlos", "h_w_los", "h_w_nlos"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise NumericalError(f"non-finite channel gain in {name}: {arr}")
            if np.any(arr < 0.0):
                raise NumericalError(f"negative channel gain in {name}: {arr}")

    def to_json_dict(self) -> dict:
        """Gains keyed h11..h22, h1w, h2w (hij = AP i to strong UE j, j=1 for a, 2 for b)."""
        out = {}
        for i in range(2):
            for j in range(2):
                key = f"h{i + 1}{j + 1}"
                out[key] = {"total": float(self.h_ab[j, i]),
                            "los": float(self.h_ab_los[j, i]),
                            "nlos": float(self.h_ab_nlos[j, i])}
        for i in range(2):
            out[f"h{i + 1}w"] = {"total": float(self.h_w[i]),
                                 "los": float(self.h_w_los[i]),
                                 "nlos": float(self.h_w_nlos[i])}
        return out


def los_gain(ap: ApNode, ue: UeNode) -> float:
    """LOS channel gain (m+1) A / (2 pi d^2) cos^m(phi) cos(psi) inside the FOV, else 0."""
    d, phi, psi = link_angles(ap, ue)
    if psi > ue.fov:
        return 0.0
    cos_phi = math.cos(phi)
    cos_psi = math.cos(psi)
    if cos_phi <= 0.0 or cos_psi <= 0.0:
        return 0.0
    m = ap.lambertian_order
    return (m + 1.0) * ue.pd_area / (2.0 * math.pi * d * d) * cos_phi ** m * cos_psi


def discretize_room(room: RoomConfig, resolution: float) -> list[SurfaceElement]:
    """Tile all six interior faces into square patches of side <= resolution."""
    if resolution <= 0.0:
        raise ConfigurationError(f"resolution={resolution} must be positive")
    smallest = min(room.length, room.width, room.ap_height)
    if resolution > smallest:
        raise ConfigurationError(
            f"resolution={resolution} m exceeds the smallest room dimension {smallest} m")

    lx, ly, lz = room.length, room.width, room.ap_height
    nx, ny, nz = (math.ceil(d / resolution) for d in (lx, ly, lz))

    def centers(extent, n, offset):
        step = extent / n
        return offset + step * (np.arange(n) + 0.5), step

    xs, dx = centers(lx, nx, -lx / 2)
    ys, dy = centers(ly, ny, -ly / 2)
    zs, dz = centers(lz, nz, 0.0)

    elements: list[SurfaceElement] = []

    def add_plane(u_vals, v_vals, area, builder, normal, zeta):
        nrm = np.array(normal, dtype=float)
        for u in u_vals:
            for v in v_vals:
                elements.append(SurfaceElement(position=builder(u, v), normal=nrm,
                                               area=area, reflectivity=zeta))

    add_plane(xs, ys, dx * dy, lambda x, y: np.array([x, y, 0.0]), (0, 0, 1),
              room.reflectivity_floor)
    add_plane(xs, ys, dx * dy, lambda x, y: np.array([x, y, lz]), (0, 0, -1),
              room.reflectivity_ceiling)
    add_plane(ys, zs, dy * dz, lambda y, z: np.array([-lx / 2, y, z]), (1, 0, 0),
              room.reflectivity_walls)
    add_plane(ys, zs, dy * dz, lambda y, z: np.array([lx / 2, y, z]), (-1, 0, 0),
              room.reflectivity_walls)
    add_plane(xs, zs, dx * dz, lambda x, z: np.array([x, -ly / 2, z]), (0, 1, 0),
              room.reflectivity_walls)
    add_plane(xs, zs, dx * dz, lambda x, z: np.array([x, ly / 2, z]), (0, -1, 0),
              room.reflectivity_walls)
    return elements


def element_arrays(elements: list[SurfaceElement]):
    pos = np.array([e.position for e in elements])
    nrm = np.array([e.normal for e in elements])
    area = np.array([e.area for e in elements])
    zeta = np.array([e.reflectivity for e in elements])
    return pos, nrm, area, zeta


class NlosSolver:
    """Shared, immutable bounce-cascade solver for one room discretization.

    The element transfer matrix and the LU factorization of (I - E G) are
    built once and reused read-only across trials; per-link t/r vectors are
    assembled per call.
    """

    def __init__(self, elements: list[SurfaceElement], cond_limit: float = 1e12):
        self.pos, self.nrm, self.area, self.zeta = element_arrays(elements)
        m = len(elements)
        subdiv_dist = _SUBDIV_SIDES * math.sqrt(float(np.max(self.area)))
        self.E = _kernels.element_transfer_matrix(self.pos, self.nrm, self.area,
                                                  subdiv_dist)
        a = np.eye(m) - self.E * self.zeta[None, :]
        anorm = np.linalg.norm(a, 1)
        self._lu = lu_factor(a)
        rcond, info = dgecon(self._lu[0], anorm, norm="1")
        if info != 0 or rcond == 0.0 or 1.0 / rcond > cond_limit:
            cond = math.inf if rcond == 0.0 else 1.0 / rcond
            raise NumericalError(
                f"(I - E G) condition estimate {cond:.3g} exceeds {cond_limit:.3g}; "
                "lower the surface reflectivity or refine the resolution")
        self._source_cache: dict[bytes, np.ndarray] = {}

    def _ap_to_elements(self, ap: ApNode) -> np.ndarray:
        return _kernels.los_gain_matrix(
            self.pos, self.nrm, self.area,
            ap.position[None, :], ap.orientation[None, :],
            ap.lambertian_order, _ELEMENT_COS_FOV)[:, 0]

    def _elements_to_ue(self, ue: UeNode) -> np.ndarray:
        return _kernels.los_gain_matrix(
            ue.position[None, :], ue.normal[None, :], np.array([ue.pd_area]),
            self.pos, self.nrm, _ELEMENT_ORDER, math.cos(ue.fov))[0, :]

    def _collected_radiosity(self, ap: ApNode) -> np.ndarray:
        # z = G (I - E G)^(-1) t, cached per AP: h_nlos is then just r . z
        key = ap.position.tobytes() + np.float64(ap.lambertian_order).tobytes()
        z = self._source_cache.get(key)
        if z is None:
            t = self._ap_to_elements(ap)
            z = self.zeta * lu_solve(self._lu, t)
            self._source_cache[key] = z
        return z

    def gain(self, ap: ApNode, ue: UeNode) -> float:
        value = float(self._elements_to_ue(ue) @ self._collected_radiosity(ap))
        if not math.isfinite(value):
            raise NumericalError("non-finite NLOS gain")
        return value

    def neumann_gain(self, ap: ApNode, ue: UeNode, terms: int = 51) -> float:
        """Truncated bounce sum sum_{k=0..terms-1} r^T G (E G)^k t (oracle for gain)."""
        t = self._ap_to_elements(ap)
        r = self._elements_to_ue(ue)
        v = t.copy()
        acc = self.zeta * v
        for _ in range(terms - 1):
            v = self.E @ (self.zeta * v)
            acc += self.zeta * v
        return float(r @ acc)


def nlos_gain(ap: ApNode, ue: UeNode, elements: list[SurfaceElement],
              cond_limit: float = 1e12) -> float:
    """One-shot NLOS gain; montecarlo reuses an NlosSolver instead."""
    return NlosSolver(elements, cond_limit=cond_limit).gain(ap, ue)


def build_channel_state(aps: tuple[ApNode, ApNode], ues: list[UeNode],
                        nlos: NlosSolver | None = None) -> ChannelState:
    """Assemble the 2x2 strong-UE matrix and the weak-UE vector for one cluster."""
    from .geometry import ROLE_STRONG_1, ROLE_STRONG_2, ROLE_WEAK

    if len(aps) != 2:
        raise ConfigurationError("exactly two APs required")
    by_role = {}
    for ue in ues:
        if ue.role in by_role:
            raise ConfigurationError(f"duplicate UE role {ue.role!r} in cluster")
        by_role[ue.role] = ue
    try:
        ordered = [by_role[ROLE_STRONG_1], by_role[ROLE_STRONG_2], by_role[ROLE_WEAK]]
    except KeyError as missing:
        raise ConfigurationError(f"cluster is missing UE role {missing}") from None

    los = np.array([[los_gain(ap, ue) for ap in aps] for ue in ordered])
    if nlos is not None:
        diffuse = np.array([[nlos.gain(ap, ue) for ap in aps] for ue in ordered])
    else:
        diffuse = np.zeros_like(los)
    total = los + diffuse
    return ChannelState(h_ab=total[:2], h_w=total[2],
                        h_ab_los=los[:2], h_ab_nlos=diffuse[:2],
                        h_w_los=los[2], h_w_nlos=diffuse[2])
