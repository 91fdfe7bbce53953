import math

import numpy as np
import pytest
from scipy.spatial import Delaunay

from umbra.errors import (
    DimensionMismatch,
    GeometryError,
    NonUnitDirection,
    PointInsideBody,
    UnsupportedDimension,
    ViewpointInsideBall,
)
from umbra.geom import (
    Ball,
    Configuration,
    ConvexBody,
    Mode,
    Topology,
    angle_between,
    line_hits_ball,
    miss_distances,
    occlusion_caps,
    ray_hits_ball,
    ray_hits_polytope,
    validate_configuration,
)

from oracles import perp_distance, ray_meets_hull_lp

O2 = np.zeros(2)
O3 = np.zeros(3)


def test_ball_rejects_nonpositive_radius():
    with pytest.raises(GeometryError):
        Ball([1, 0], 0.0)
    with pytest.raises(GeometryError):
        Ball([1, 0], -1)


def test_ball_center_is_read_only():
    b = Ball([1, 0], 0.5)
    with pytest.raises(ValueError):
        b.center[0] = 2.0


def test_configuration_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Configuration(3, [Ball([1, 0], 0.2)])
    with pytest.raises(DimensionMismatch):
        Configuration(1, [])


def test_pole_cap_is_open_hemisphere():
    (cap,) = occlusion_caps(Ball([0, 0, 1], 1.0), O3, Mode.RAY, Topology.OPEN)
    np.testing.assert_allclose(cap.axis, [0, 0, 1])
    assert cap.half_angle == pytest.approx(math.pi / 2, abs=1e-15)
    assert cap.boundary is Topology.OPEN


def test_pole_ball_closed_rejected():
    with pytest.raises(ViewpointInsideBall):
        occlusion_caps(Ball([0, 0, 1], 1.0), O3, Mode.RAY, Topology.CLOSED)


def test_viewpoint_strictly_inside():
    with pytest.raises(ViewpointInsideBall):
        occlusion_caps(Ball([0.1, 0, 0], 0.5), O3, Mode.LINE, Topology.OPEN)


def test_axis_ball_half_angle():
    (cap,) = occlusion_caps(Ball([1, 0, 0], math.sqrt(2) - 1), O3, Mode.RAY, Topology.CLOSED)
    assert cap.half_angle == pytest.approx(0.427079, abs=1e-6)


def test_line_mode_gives_antipodal_pair():
    caps = occlusion_caps(Ball([0, 0, 2], 1.0), O3, Mode.LINE, Topology.CLOSED)
    assert len(caps) == 2
    np.testing.assert_allclose(caps[0].axis, [0, 0, 1])
    np.testing.assert_allclose(caps[1].axis, [0, 0, -1])
    for c in caps:
        assert c.half_angle == pytest.approx(math.pi / 6, abs=1e-15)


def test_line_hits_ball_examples():
    b = Ball([1, 0], 0.5)
    assert not line_hits_ball([0, 1], O2, b, Topology.CLOSED)
    pole = Ball([0, 0, 1], 1.0)
    assert not line_hits_ball([0, 1, 0], O3, pole, Topology.OPEN)
    assert line_hits_ball([0, 1, 0], O3, pole, Topology.CLOSED)
    for t in Topology:
        assert line_hits_ball([1, 0], O2, Ball([1, 0], 0.3), t)


def test_ray_hits_ball_examples():
    b = Ball([1, 0], 0.5)
    assert not ray_hits_ball([-1, 0], O2, b, Topology.CLOSED)
    assert line_hits_ball([-1, 0], O2, b, Topology.CLOSED)
    assert ray_hits_ball([1, 0], O2, b, Topology.CLOSED)
    u = [math.cos(0.5), math.sin(0.5), 0]
    assert not ray_hits_ball(u, O3, Ball([1, 0, 0], math.sqrt(2) - 1), Topology.CLOSED)


def test_non_unit_direction():
    with pytest.raises(NonUnitDirection):
        line_hits_ball([2, 0], O2, Ball([1, 0], 0.5))
    # within tolerance is accepted
    line_hits_ball([1 + 5e-10, 0], O2, Ball([1, 0], 0.5))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("mode", [Mode.LINE, Mode.RAY])
def test_caps_agree_with_distance_oracle(n, mode):
    rng = np.random.default_rng(100 + n)
    mismatches = 0
    for _ in range(10_000):
        c = rng.normal(size=n)
        c *= rng.uniform(0.5, 2.0) / np.linalg.norm(c)
        r = rng.uniform(0.05, 0.95) * np.linalg.norm(c)
        topo = Topology.CLOSED if rng.random() < 0.5 else Topology.OPEN
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        caps = occlusion_caps(Ball(c, r), np.zeros(n), mode, topo)
        in_cap = any(cap.contains(u) for cap in caps)
        d = perp_distance(u, np.zeros(n), c, ray=mode is Mode.RAY)
        if abs(d - r) < 1e-8:
            continue
        if in_cap != (d < r):
            mismatches += 1
        hit = line_hits_ball(u, np.zeros(n), Ball(c, r), topo) if mode is Mode.LINE else \
            ray_hits_ball(u, np.zeros(n), Ball(c, r), topo)
        assert hit == (d < r)
    assert mismatches == 0


def test_closed_tangent_is_hit_open_tangent_is_miss():
    b = Ball([1, 1], 1.0)
    assert line_hits_ball([1, 0], O2, b, Topology.CLOSED)
    assert not line_hits_ball([1, 0], O2, b, Topology.OPEN)


def test_antipodal_symmetry_and_ray_subset():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        c = rng.normal(size=3) * 1.5
        r = rng.uniform(0.01, 0.99) * np.linalg.norm(c)
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        b = Ball(c, r)
        assert line_hits_ball(u, O3, b) == line_hits_ball(-u, O3, b)
        if ray_hits_ball(u, O3, b):
            assert line_hits_ball(u, O3, b)
        if np.dot(u, c) > 0:
            assert ray_hits_ball(u, O3, b) == line_hits_ball(u, O3, b)


def test_angle_between_small_and_large():
    u = np.array([1.0, 0, 0])
    v = np.array([math.cos(1e-9), math.sin(1e-9), 0])
    assert angle_between(u, v) == pytest.approx(1e-9, rel=1e-6)
    assert angle_between(u, -u) == pytest.approx(math.pi)


# ---------------------------------------------------------------------------
# polytopes

TRI = ConvexBody([[1, -1], [1, 1], [2, 0]])


def test_triangle_ray_examples():
    assert ray_hits_polytope([1, 0], O2, TRI)
    assert not ray_hits_polytope([0, 1], O2, TRI)
    assert not ray_hits_polytope([-1, 0], O2, TRI)


def test_tetrahedron_ray():
    T = ConvexBody([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])
    assert ray_hits_polytope(np.ones(3) / math.sqrt(3), O3, T)
    assert not ray_hits_polytope(-np.ones(3) / math.sqrt(3), O3, T)


def test_degenerate_bodies():
    seg = ConvexBody([[1, -1], [1, 1]])
    assert seg.affine_dim == 1
    assert ray_hits_polytope([1, 0], O2, seg)
    assert not ray_hits_polytope([0, 1], O2, seg)
    pt = ConvexBody([[2, 0, 0]])
    assert ray_hits_polytope([1, 0, 0], O3, pt)
    assert not ray_hits_polytope([0, 1, 0], O3, pt)
    flat = ConvexBody([[1, -1, -1], [1, 1, -1], [1, 0, 1]])
    assert flat.affine_dim == 2
    assert ray_hits_polytope([1, 0, 0], O3, flat)
    assert not ray_hits_polytope([0, 0, 1], O3, flat)
    # segment along the ray itself
    on = ConvexBody([[1, 0], [2, 0]])
    assert ray_hits_polytope([1, 0], O2, on)
    assert not ray_hits_polytope([-1, 0], O2, on)


def test_open_topology_excludes_touching():
    seg = ConvexBody([[1, 0], [1, 1]])
    assert ray_hits_polytope([1, 0], O2, seg, Topology.CLOSED)
    assert not ray_hits_polytope([1, 0], O2, seg, Topology.OPEN)


def test_viewpoint_in_body():
    with pytest.raises(PointInsideBody):
        ray_hits_polytope([1, 0], [1.5, 0], TRI)


def test_unsupported_dimension():
    with pytest.raises(UnsupportedDimension):
        ConvexBody(np.eye(4))


@pytest.mark.parametrize("n", [2, 3])
def test_polytope_matches_lp_oracle(n):
    rng = np.random.default_rng(40 + n)
    checked = 0
    for _ in range(1000):
        k = int(rng.integers(1, 7))
        centre = rng.normal(size=n) * 2
        V = centre + rng.normal(size=(k, n)) * rng.uniform(0.05, 0.8)
        body = ConvexBody(V)
        if body.contains(O2 if n == 2 else O3):
            continue
        u = rng.normal(size=n)
        # aim roughly at the body half the time
        if rng.random() < 0.5:
            u = centre + rng.normal(size=n) * 0.3
        u /= np.linalg.norm(u)
        exact = ray_hits_polytope(u, np.zeros(n), body)
        oracle = ray_meets_hull_lp(u, np.zeros(n), V)
        assert exact == oracle
        checked += 1
    assert checked > 800


@pytest.mark.parametrize("n", [2, 3])
def test_dense_segment_oracle(n):
    """Sampled points along the ray, tested by Delaunay point location, agree with clipping."""
    rng = np.random.default_rng(3 + n)
    origin = np.zeros(n)
    checked = 0
    for _ in range(500):
        V = rng.normal(size=(n + 3, n)) * 0.5 + rng.normal(size=n) * 2
        body = ConvexBody(V)
        if body.contains(origin):
            continue
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        tmax = 10 * np.abs(V).max()
        ts = np.linspace(0, tmax, 20001)
        sampled = bool((Delaunay(V).find_simplex(ts[:, None] * u) >= 0).any())
        exact = ray_hits_polytope(u, origin, body)
        if sampled:
            assert exact
        iv = body.ray_interval(u, origin)
        if exact and iv[1] - iv[0] > 2 * tmax / 20000:
            assert sampled
        checked += 1
    assert checked > 400


# ---------------------------------------------------------------------------
# validation


def test_validate_antipodal_pair():
    cfg = Configuration(2, [Ball([1, 0], 0.3), Ball([-1, 0], 0.3)])
    v = validate_configuration(cfg)
    assert v.disjoint and v.ok


def test_validate_closed_unit_radius_flagged():
    cfg = Configuration(3, [Ball([0, 0, 1], 1.0)], topology=Topology.CLOSED)
    v = validate_configuration(cfg)
    assert not v.radii_ok and v.bad_radii == [0]
    assert validate_configuration(cfg.with_(topology=Topology.OPEN)).radii_ok


def test_validate_off_sphere_and_overlap():
    cfg = Configuration(2, [Ball([1.1, 0], 0.3), Ball([math.cos(0.1), math.sin(0.1)], 0.3)])
    v = validate_configuration(cfg)
    assert v.off_sphere == [0]
    assert v.overlapping == [(0, 1)]
    free = validate_configuration(cfg.with_(centers_free=True))
    assert free.centers_on_sphere


def test_tangent_pair_open_vs_closed():
    h = math.sqrt(2) / 2
    cfg = Configuration(2, [Ball([1, 0], 1.0), Ball([-1, 0], 1.0)], topology=Topology.OPEN)
    v = validate_configuration(cfg)
    assert v.tangent_pairs == [(0, 1)] and v.disjoint
    cfg = Configuration(2, [Ball([h, h], 0.5), Ball([h, -h], math.sqrt(2) - 0.5)])
    v = validate_configuration(cfg)
    assert v.tangent_pairs == [(0, 1)] and not v.disjoint


def test_miss_distances():
    cfg = Configuration(2, [Ball([1, 0], 0.5)])
    assert miss_distances(cfg, [0, 1]) == [pytest.approx(0.5)]
