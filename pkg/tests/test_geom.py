import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_inside
from qtomo.errors import DegenerateRegion, EmptyRegion, UnboundedRegion
from qtomo.geom import (Halfplane, RegionKind, UnitDirection, convex_hull,
                        distance_to_region, hausdorff_distance,
                        intersect_halfplanes, intersect_normals, kappa,
                        polyline_self_intersects, region_from_vertices,
                        reintersect, support_function)

AXES = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])


def square(lo=0.0, hi=1.0):
    return intersect_normals(AXES, [lo, lo, -hi, -hi])


def test_unit_direction_validates_norm():
    with pytest.raises(ValueError):
        UnitDirection(1.0, 1.0)
    d = UnitDirection.from_angle(3 * math.pi / 2)
    assert d.angle == pytest.approx(3 * math.pi / 2)
    assert UnitDirection.from_vector([3, 4]) == UnitDirection(0.6, 0.8)


def test_unit_square():
    r = square()
    assert r.kind is RegionKind.POLYGON
    want = {(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}
    assert {tuple(np.round(v, 12) + 0.0) for v in r.vertices} == want
    assert r.area() == pytest.approx(1.0)
    assert sorted(r.active.tolist()) == [0, 1, 2, 3]


def test_redundant_constraint_is_not_active():
    normals = np.vstack([AXES, [[math.sqrt(0.5), math.sqrt(0.5)]]])
    r = intersect_normals(normals, [0, 0, -1, -1, -5])
    assert r.area() == pytest.approx(1.0)
    assert 4 not in r.active


def test_cutting_constraint_is_active():
    c = math.sqrt(0.5)
    normals = np.vstack([AXES, [[-c, -c]]])
    r = intersect_normals(normals, [0, 0, -1, -1, -1.5 * c])
    # the cut x + y <= 1.5 removes a corner triangle of area 1/8
    assert r.area() == pytest.approx(1 - 0.125)
    assert len(r) == 5
    assert 4 in r.active


def test_halfplane_objects():
    hs = [Halfplane(UnitDirection(*s), q) for s, q in zip(AXES, [0, 0, -2, -3])]
    r = intersect_halfplanes(hs)
    assert r.area() == pytest.approx(6.0)
    assert hs[0].contains((0.5, 0.5))


def test_empty_intersection():
    r = intersect_normals(AXES, [0, 0, 1, -1])  # x >= 0 and x <= -1
    assert r.is_empty
    with pytest.raises(EmptyRegion):
        r.centroid()


def test_point_and_segment():
    p = intersect_normals(AXES, [0.5, 0.5, -0.5, -0.5])
    assert p.kind is RegionKind.POINT
    np.testing.assert_allclose(p.vertices, [[0.5, 0.5]])
    s = intersect_normals(AXES, [0.0, 0.5, -1.0, -0.5])
    assert s.kind is RegionKind.SEGMENT
    np.testing.assert_allclose(sorted(s.vertices[:, 0]), [0.0, 1.0])
    np.testing.assert_allclose(s.vertices[:, 1], [0.5, 0.5])


def test_unbounded():
    with pytest.raises(UnboundedRegion):
        intersect_normals(AXES[:3], [0, 0, -1])


def test_hausdorff_nested_squares():
    # farthest point of [0,2]^2 from [0,1]^2 is (2,2), at distance sqrt(2)
    assert hausdorff_distance(square(0, 1), square(0, 2)) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_hausdorff_point_and_segment():
    p = region_from_vertices([[0.0, 1.0]])
    s = region_from_vertices([[-1.0, 0.0], [1.0, 0.0]])
    # the segment end (1,0) is sqrt(2) from the point
    assert hausdorff_distance(p, s) == pytest.approx(math.sqrt(2))


def test_kappa():
    assert kappa(square()) == pytest.approx(math.sqrt(2))
    tri = region_from_vertices([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    # 60 degree corners: normal cone of 120 degrees, 1/cos(60) = 2
    assert kappa(tri) == pytest.approx(2.0)
    t = 2 * np.pi * np.arange(720) / 720
    assert kappa(region_from_vertices(np.column_stack([np.cos(t), np.sin(t)]))) < 1.0001
    with pytest.raises(DegenerateRegion):
        kappa(region_from_vertices([[0, 0], [1, 0]]))


def test_support_function():
    assert support_function(square(), [math.sqrt(0.5), math.sqrt(0.5)]) == pytest.approx(math.sqrt(2))
    assert support_function(square(), UnitDirection(-1.0, 0.0)) == pytest.approx(0.0)


def test_self_intersection():
    bowtie = [[0, 0], [1, 1], [1, 0], [0, 1]]
    assert polyline_self_intersects(bowtie, closed=True)
    assert not polyline_self_intersects([[0, 0], [1, 0], [1, 1], [0, 1]], closed=True)
    assert not polyline_self_intersects([[0, 0], [1, 0], [1, 1]])


def test_convex_hull_and_contains():
    pts = np.array([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1], [1, 0]], float)
    h = convex_hull(pts)
    assert h.kind is RegionKind.POLYGON and len(h) == 4
    assert h.area() == pytest.approx(4.0)
    assert h.contains(pts).all()
    assert not h.contains([2.1, 1.0])
    assert h.contains([2.0 + 1e-12, 1.0])
    assert convex_hull([[1, 1], [1, 1]]).kind is RegionKind.POINT
    assert convex_hull([[0, 0], [1, 1], [2, 2]]).kind is RegionKind.SEGMENT


def test_distance_to_region():
    d = distance_to_region([[0.5, 0.5], [3.0, 1.0], [2.0, 2.0]], square())
    np.testing.assert_allclose(d, [0.0, 2.0, math.sqrt(2)])


def test_region_is_immutable():
    r = square()
    with pytest.raises(ValueError):
        r.vertices[0, 0] = 5.0


def test_collinear_micro_edges_are_merged():
    # many constraints through one corner must not leave a cluster of
    # nearly equal vertices there
    t = np.linspace(0.01, math.pi / 2 - 0.01, 400)
    normals = np.vstack([AXES, -np.column_stack([np.cos(t), np.sin(t)])])
    offsets = np.concatenate([[0, 0, -1, -1], -(np.cos(t) + np.sin(t))])
    r = intersect_normals(normals, offsets)
    np.testing.assert_allclose(r.area(), 1.0, atol=1e-12)
    v = r.vertices
    gaps = np.hypot(*(np.roll(v, -1, 0) - v).T)
    assert gaps.min() > 1e-6


@st.composite
def convex_polygons(draw):
    k = draw(st.integers(3, 12))
    raw = draw(st.lists(st.floats(0, 2 * math.pi, allow_nan=False), min_size=k, max_size=k, unique=True))
    t = np.sort(np.asarray(raw))
    gaps = np.diff(np.concatenate([t, [t[0] + 2 * math.pi]]))
    if gaps.max() > math.pi - 0.05 or gaps.min() < 1e-3:
        t = np.sort(np.mod(np.arange(k) * 2 * math.pi / k + 0.3 * np.asarray(raw[:1] * k), 2 * math.pi))
    rad = draw(st.floats(0.5, 3.0))
    c = draw(st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
    return np.asarray(c) + rad * np.column_stack([np.cos(t), np.sin(t)])


@given(convex_polygons(), st.integers(0, 10**6))
def test_edge_constraints_rebuild_polygon(vertices, seed):
    rng = np.random.default_rng(seed)
    poly = region_from_vertices(vertices)
    e = np.roll(vertices, -1, axis=0) - vertices
    normals = np.column_stack([-e[:, 1], e[:, 0]])
    normals /= np.hypot(normals[:, 0], normals[:, 1])[:, None]
    offsets = np.einsum("ij,ij->i", normals, vertices)
    # add loose constraints that never touch the polygon
    extra = rng.normal(size=(5, 2))
    extra /= np.hypot(extra[:, 0], extra[:, 1])[:, None]
    slack = (vertices @ extra.T).min(axis=0) - rng.uniform(0.1, 1.0, 5)
    allN = np.vstack([normals, extra])
    allQ = np.concatenate([offsets, slack])
    perm = rng.permutation(len(allQ))
    r = intersect_normals(allN[perm], allQ[perm])
    assert r.kind is RegionKind.POLYGON
    assert hausdorff_distance(r, poly) < 1e-9
    assert set(perm[r.active].tolist()) <= set(range(len(offsets)))
    probes = rng.uniform(vertices.min(0) - 1, vertices.max(0) + 1, (300, 2))
    inside = r.contains(probes, tol=0.0)
    brute = brute_inside(allN, allQ, probes, tol=0.0)
    near = distance_to_region(probes, r) < 1e-9
    assert np.all((inside == brute) | near)


@given(st.integers(0, 10**6), st.integers(3, 60))
def test_random_halfplanes_match_brute_membership(seed, m):
    rng = np.random.default_rng(seed)
    t = np.sort(rng.uniform(0, 2 * math.pi, m))
    t = np.concatenate([t, [0, math.pi / 2, math.pi, 3 * math.pi / 2]])
    normals = np.column_stack([np.cos(t), np.sin(t)])
    offsets = rng.uniform(-2.0, 0.5, t.size)
    r = intersect_normals(normals, offsets)
    probes = rng.uniform(-3, 3, (400, 2))
    brute = brute_inside(normals, offsets, probes, tol=0.0)
    if r.is_empty:
        assert not brute.any()
        return
    inside = r.contains(probes, tol=0.0)
    near = distance_to_region(probes, r) < 1e-8
    assert np.all((inside == brute) | near)
    # every vertex satisfies every constraint
    assert brute_inside(normals, offsets, r.vertices, tol=1e-9).all()


@given(convex_polygons())
def test_reintersect_round_trip(vertices):
    poly = region_from_vertices(vertices)
    assert hausdorff_distance(reintersect(poly), poly) < 1e-12 * (1 + np.abs(vertices).max())


@given(convex_polygons(), convex_polygons())
def test_hausdorff_is_a_symmetric_metric(a, b):
    ra, rb = region_from_vertices(a), region_from_vertices(b)
    assert hausdorff_distance(ra, rb) == pytest.approx(hausdorff_distance(rb, ra))
    assert hausdorff_distance(ra, ra) == 0.0
    # dense sampling of the boundary of b gives a lower bound
    t = np.linspace(0, 1, 50)[:, None]
    edge_pts = (b[:, None, :] * (1 - t[None]) + np.roll(b, -1, 0)[:, None, :] * t[None]).reshape(-1, 2)
    assert distance_to_region(edge_pts, ra).max() <= hausdorff_distance(ra, rb) + 1e-12


def test_million_presorted_constraints_timing():
    m = 1_000_000
    t = 2 * np.pi * np.arange(m) / m
    normals = np.column_stack([np.cos(t), np.sin(t)])
    offsets = -1.0 - 0.01 * np.random.default_rng(0).random(m)
    intersect_normals(normals[::1000], offsets[::1000])
    t0 = time.perf_counter()
    r = intersect_normals(normals, offsets)
    elapsed = time.perf_counter() - t0
    assert r.kind is RegionKind.POLYGON
    assert elapsed < 0.2
