import math

import numpy as np
import pytest

from vlcomp.errors import ConfigurationError
from vlcomp.geometry import (ROLE_STRONG_1, ROLE_STRONG_2, ROLE_WEAK, ApNode,
                             RoomConfig, UeNode, vec3)
from vlcomp.vlc_channel import (NlosSolver, build_channel_state, discretize_room,
                                element_arrays, los_gain, nlos_gain)


def make_ap(pos=(0.0, 0.0, 2.5), semi=60.0):
    return ApNode(position=vec3(*pos), half_power_semiangle=math.radians(semi))


def make_ue(pos, normal=(0.0, 0.0, 1.0), fov=60.0, role=ROLE_WEAK, area=1e-4):
    return UeNode(position=vec3(*pos), normal=vec3(*normal), pd_area=area,
                  responsivity=0.58, fov=math.radians(fov), role=role)


def test_lambertian_order():
    assert make_ap(semi=45.0).lambertian_order == pytest.approx(2.0, rel=1e-12)
    assert make_ap(semi=60.0).lambertian_order == pytest.approx(1.0, rel=1e-12)


def test_los_gain_worked_example():
    # m=1, A=1e-4 m^2, d=1.6 m, phi=psi=0: h = 2e-4 / (2 pi 2.56)
    ap = make_ap(semi=60.0)
    ue = make_ue((0.0, 0.0, 0.9))
    assert los_gain(ap, ue) == pytest.approx(1.2433979929054323e-05, rel=1e-12)


def test_los_gain_fov_cutoff():
    ap = make_ap()
    # incidence 45 deg < fov 60: nonzero; tilt the PD so incidence exceeds the fov
    ue = make_ue((1.6, 0.0, 0.9))
    assert los_gain(ap, ue) > 0.0
    tilted = make_ue((1.6, 0.0, 0.9), normal=(math.sin(math.radians(80)), 0.0,
                                              math.cos(math.radians(80))))
    # geometry: psi = 80 + 45 deg > 60 deg fov
    assert los_gain(ap, tilted) == 0.0


def test_los_gain_back_side_zero():
    ap = make_ap()
    down = make_ue((1.0, 0.0, 0.9), normal=(0.0, 0.0, -1.0))
    assert los_gain(ap, down) == 0.0


def test_los_gain_monotone_in_distance():
    ap = make_ap()
    gains = [los_gain(ap, make_ue((0.0, 0.0, 2.5 - d))) for d in (0.5, 1.0, 1.5, 2.0)]
    assert all(a > b for a, b in zip(gains, gains[1:]))


def test_los_gain_continuous_up_to_fov_cutoff():
    # sweep the incidence angle by tilting the PD: smooth inside the FOV,
    # a single jump to zero right past it
    ap = make_ap(semi=45.0)
    angles = np.linspace(0.0, math.radians(75.0), 400)
    gains = np.array([los_gain(ap, make_ue((1.0, 0.0, 0.9),
                                           normal=(math.sin(t), 0.0, math.cos(t))))
                      for t in angles])
    inside = gains > 0.0
    steps = np.abs(np.diff(gains))
    smooth = steps[inside[:-1] & inside[1:]]
    assert smooth.max() < 0.05 * gains.max()
    # exactly one transition into the cutoff region
    assert np.sum(inside[:-1] & ~inside[1:]) == 1


def test_discretize_room_counts_and_area():
    room = RoomConfig()
    elements = discretize_room(room, 0.5)
    # 2*(14*14) floor+ceiling + 4*(14*5) walls
    assert len(elements) == 672
    total = sum(e.area for e in elements)
    interior = 2 * 7 * 7 + 4 * 7 * 2.5
    assert total == pytest.approx(interior, rel=1e-9)


def test_discretize_room_normals_point_inward():
    room = RoomConfig()
    for e in discretize_room(room, 0.7):
        probe = e.position + 1e-3 * e.normal
        assert -3.5 < probe[0] < 3.5 and -3.5 < probe[1] < 3.5 and 0 < probe[2] < 2.5


def test_discretize_room_resolution_error():
    with pytest.raises(ConfigurationError):
        discretize_room(RoomConfig(), 2.6)
    with pytest.raises(ConfigurationError):
        discretize_room(RoomConfig(), 0.0)


@pytest.fixture(scope="module")
def default_solver():
    return NlosSolver(discretize_room(RoomConfig(), 0.5))


def test_nlos_zero_reflectivity():
    room = RoomConfig(reflectivity_walls=0.0, reflectivity_ceiling=0.0,
                      reflectivity_floor=0.0)
    elements = discretize_room(room, 0.7)
    assert nlos_gain(make_ap((-2, 0, 2.5)), make_ue((1.0, 0.5, 0.9)), elements) == 0.0


def test_nlos_matches_truncated_bounce_sum(default_solver):
    ap = make_ap((-2.0, 0.0, 2.5), semi=45.0)
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10):
        ue = make_ue((rng.uniform(-3, 3), rng.uniform(-3, 3), 0.9))
        inv = default_solver.gain(ap, ue)
        neumann = default_solver.neumann_gain(ap, ue, terms=51)
        assert inv > 0.0
        worst = max(worst, abs(inv - neumann) / inv)
    assert worst <= 1e-8


def test_nlos_inverse_dominates_partial_sums(default_solver):
    # every bounce adds non-negative power, so partial sums stay below the inverse
    ap = make_ap((-2.0, 0.0, 2.5), semi=45.0)
    ue = make_ue((2.0, 1.0, 0.9))
    inv = default_solver.gain(ap, ue)
    last = 0.0
    for terms in (1, 3, 10, 30):
        part = default_solver.neumann_gain(ap, ue, terms=terms)
        assert part <= inv * (1 + 1e-12)
        assert part >= last
        last = part


def test_nlos_monotone_in_reflectivity():
    gains = []
    for zeta in (0.2, 0.5, 0.8):
        room = RoomConfig(reflectivity_walls=zeta, reflectivity_ceiling=zeta,
                          reflectivity_floor=zeta)
        solver = NlosSolver(discretize_room(room, 0.7))
        gains.append(solver.gain(make_ap((-2, 0, 2.5)), make_ue((1.5, 0.0, 0.9))))
    assert gains[0] < gains[1] < gains[2]


def test_nlos_monotone_in_each_single_reflectivity():
    # raising any one surface's reflectivity alone collects more power
    ap, ue = make_ap((-2, 0, 2.5)), make_ue((1.5, 0.0, 0.9))
    base = dict(reflectivity_walls=0.5, reflectivity_ceiling=0.5,
                reflectivity_floor=0.3)
    ref = NlosSolver(discretize_room(RoomConfig(**base), 0.7)).gain(ap, ue)
    for key in base:
        bumped = dict(base)
        bumped[key] = base[key] + 0.3
        solver = NlosSolver(discretize_room(RoomConfig(**bumped), 0.7))
        assert solver.gain(ap, ue) > ref


@pytest.mark.slow
def test_nlos_resolution_refinement(default_solver):
    # halving the default resolution moves the gain by less than 5 percent
    fine = NlosSolver(discretize_room(RoomConfig(), 0.25))
    ap = make_ap((-2.0, 0.0, 2.5), semi=45.0)
    for pos in ((1.5, 0.3, 0.9), (-1.0, -2.0, 0.9)):
        coarse_gain = default_solver.gain(ap, make_ue(pos))
        fine_gain = fine.gain(ap, make_ue(pos))
        assert abs(fine_gain - coarse_gain) / fine_gain < 0.05


def cluster_ues(positions, normals=None):
    normals = normals or [(0, 0, 1)] * 3
    roles = [ROLE_STRONG_1, ROLE_STRONG_2, ROLE_WEAK]
    return [make_ue(p, normal=n, role=r) for p, n, r in zip(positions, normals, roles)]


def test_channel_state_symmetry():
    room = RoomConfig()
    p1, p2 = room.ap_positions
    aps = (make_ap(tuple(p1), semi=45.0), make_ap(tuple(p2), semi=45.0))
    ues = cluster_ues([(-2.3, 0.4, 0.9), (2.3, 0.4, 0.9), (0.0, 1.0, 0.9)])
    state = build_channel_state(aps, ues)
    assert state.h_ab[0, 0] == pytest.approx(state.h_ab[1, 1], rel=1e-12)
    assert state.h_ab[0, 1] == pytest.approx(state.h_ab[1, 0], rel=1e-12)
    assert state.h_w[0] == pytest.approx(state.h_w[1], rel=1e-12)


def test_channel_state_without_nlos_equals_los(default_solver):
    room = RoomConfig()
    p1, p2 = room.ap_positions
    aps = (make_ap(tuple(p1), semi=45.0), make_ap(tuple(p2), semi=45.0))
    ues = cluster_ues([(-1.9, -0.2, 0.9), (2.2, 0.1, 0.9), (0.3, 0.8, 0.9)])
    plain = build_channel_state(aps, ues)
    assert np.all(plain.h_ab_nlos == 0.0)
    expected = np.array([[los_gain(ap, ue) for ap in aps] for ue in ues])
    assert np.allclose(plain.h_ab, expected[:2], rtol=1e-14)
    assert np.allclose(plain.h_w, expected[2], rtol=1e-14)
    with_nlos = build_channel_state(aps, ues, nlos=default_solver)
    assert np.all(with_nlos.h_ab >= plain.h_ab)


def test_channel_state_json_keys():
    room = RoomConfig()
    p1, p2 = room.ap_positions
    aps = (make_ap(tuple(p1)), make_ap(tuple(p2)))
    state = build_channel_state(aps, cluster_ues([(-2, 0, 0.9), (2, 0, 0.9), (0, 1, 0.9)]))
    d = state.to_json_dict()
    assert set(d) == {"h11", "h12", "h21", "h22", "h1w", "h2w"}
    for v in d.values():
        assert set(v) == {"total", "los", "nlos"}
        assert v["total"] == pytest.approx(v["los"] + v["nlos"], rel=1e-12)


def test_element_arrays_roundtrip():
    elements = discretize_room(RoomConfig(), 0.7)
    pos, nrm, area, zeta = element_arrays(elements)
    assert pos.shape == (len(elements), 3)
    assert np.all(area > 0) and np.all((zeta >= 0) & (zeta < 1))
