import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtomo.depth import depth_counts, depth_regions_oracle, tukey_median
from qtomo.envelope import (DirectionSet, biplot_curve, build_envelope,
                            build_envelopes, check_level, coordinate_median,
                            coverage_search, critical_directions,
                            enclosed_count, rank_envelope, resolve_origin,
                            uniform_directions)
from qtomo.errors import (ConfigError, InvalidP, NoEnvelope,
                          TooFewDirections)
from qtomo.estimators import EmpiricalEstimator
from qtomo.geom import (RegionKind, hausdorff_distance, kappa,
                        polyline_self_intersects, region_from_vertices)

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


def test_uniform_directions():
    A = uniform_directions(8)
    assert len(A) == 8
    assert A.max_gap() == pytest.approx(math.pi / 4)
    np.testing.assert_allclose(A[2].to_array(), [0.0, 1.0], atol=1e-15)
    with pytest.raises(TooFewDirections):
        uniform_directions(2)


def test_direction_set_validation():
    with pytest.raises(ConfigError):
        DirectionSet([[1.0, 1.0]])
    with pytest.raises(ConfigError):
        DirectionSet([[0.0, 1.0], [1.0, 0.0]], sorted_by_angle=True)
    A = DirectionSet.from_vectors([[0.0, 2.0], [3.0, 0.0], [-1.0, -1.0]])
    assert np.all(np.diff(A.angles) > 0)
    B = DirectionSet.from_angles([0.0, 2.0, 4.0, 2.0 + 2 * math.pi])
    assert len(B) == 3


def test_critical_directions_of_square():
    A = critical_directions(SQUARE)
    # pair lines have directions 0, 90, 45 and 135 degrees, giving eight
    # normals which already include the axes
    assert len(A) == 8
    np.testing.assert_allclose(np.sort(A.angles), np.arange(8) * math.pi / 4, atol=1e-15)


def test_check_level():
    assert check_level(0.5) == 0.5
    for bad in (0.0, 0.51, -0.1, 1.0):
        with pytest.raises(InvalidP):
            check_level(bad)


def test_square_envelopes():
    A = critical_directions(SQUARE)
    e = build_envelope(SQUARE, 0.5, A)
    assert e.region.kind is RegionKind.POINT
    np.testing.assert_allclose(e.region.vertices, [[0.5, 0.5]], atol=1e-15)
    e = build_envelope(SQUARE, 0.25, A)
    assert e.region.area() == pytest.approx(1.0)
    assert len(e.halfplanes) == len(A)
    assert set(e.active.tolist()) <= set(range(len(A)))


def test_uniform_direction_envelope_of_square():
    # along each axis the second smallest of four projections is the
    # lower side of the square, so the axes alone cut nothing away; the
    # diagonal directions are what pin the deepest point
    e = build_envelope(SQUARE, 0.5, uniform_directions(4))
    assert e.region.area() == pytest.approx(1.0)


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(5, 18), st.booleans())
def test_critical_envelopes_equal_depth_regions(seed, n, lattice):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, 2))
    if lattice:
        pts = np.round(pts * 2) / 2
    A = critical_directions(pts)
    ks = range(1, n // 2 + 1)
    envs = build_envelopes(pts, [k / n for k in ks], A)
    oracle = depth_regions_oracle(pts, [k / n for k in ks])
    probes = rng.uniform(pts.min(0) - 0.3, pts.max(0) + 0.3, (200, 2))
    depth = depth_counts(pts, probes)
    for k, e, o in zip(ks, envs, oracle):
        assert e.region.is_empty == o.is_empty
        if o.is_empty:
            continue
        assert hausdorff_distance(e.region, o) < 1e-9
        inside = e.region.contains(probes, tol=1e-9)
        assert np.array_equal(inside, depth >= k)


@given(st.integers(0, 10**6), st.integers(2, 60))
def test_rank_envelope_matches_levels(seed, n):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, 2))
    A = uniform_directions(37)
    k = int(rng.integers(1, n // 2 + 1)) if n >= 2 else 1
    r = rank_envelope(pts, k, A)
    for p in (k / n, (k - 0.5) / n):
        if p > 0:
            e = build_envelope(pts, p, A)
            np.testing.assert_array_equal(e.offsets, r.offsets)


@given(st.integers(0, 10**6), st.integers(3, 200))
def test_centerpoint_level_nonempty(seed, n):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, 2)) @ rng.normal(size=(2, 2))
    e = build_envelope(pts, max(n // 3, 1) / n, critical_directions(pts) if n <= 60 else 360)
    assert not e.region.is_empty


def test_envelopes_are_nested(rng):
    pts = rng.standard_normal((500, 2))
    envs = build_envelopes(pts, [0.05, 0.1, 0.2, 0.4], 180)
    for outer, inner in zip(envs, envs[1:]):
        assert outer.region.contains(inner.region.vertices, tol=1e-9).all()


@given(st.integers(0, 10**6))
def test_affine_equivariance(seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((int(rng.integers(20, 200)), 2))
    B = rng.normal(size=(2, 2))
    if np.linalg.cond(B) > 100:
        B = np.eye(2) + 0.1 * B
    b = rng.uniform(-10, 10, 2)
    A = uniform_directions(72)
    p = 0.2
    base = build_envelope(pts, p, A)
    if base.region.is_empty:
        return
    # directions transform with the inverse transpose
    S = A.vectors @ np.linalg.inv(B)
    S /= np.hypot(S[:, 0], S[:, 1])[:, None]
    moved = build_envelope(pts @ B.T + b, p, S)
    want = base.region.vertices @ B.T + b
    if np.linalg.det(B) < 0:
        want = want[::-1]
    h = hausdorff_distance(moved.region, region_from_vertices(want))
    assert h <= 1e-9 * max(1.0, moved.region.diameter())


def test_enclosed_count_and_coverage():
    pts = np.random.default_rng(3).standard_normal((200, 2))
    A = uniform_directions(90)
    p, env = coverage_search(pts, 0.5, A)
    k = round(p * 200)
    assert enclosed_count(env.region, pts) >= 100
    above = build_envelope(pts, (k + 1) / 200, A)
    assert above.region.is_empty or enclosed_count(above.region, pts) < 100
    with pytest.raises(ConfigError):
        coverage_search(pts, 1.5, A)


def test_coverage_full_mass_is_hull():
    pts = np.random.default_rng(4).standard_normal((50, 2))
    p, env = coverage_search(pts, 1.0, critical_directions(pts))
    assert p == 1 / 50
    assert enclosed_count(env.region, pts) == 50


def test_coverage_impossible():
    with pytest.raises(NoEnvelope):
        coverage_search(np.array([[0.0, 0.0]]), 0.5)


def test_coordinate_median_and_origin():
    pts = np.array([[0.0, 0.0], [1.0, 10.0], [2.0, 4.0], [10.0, 1.0]])
    np.testing.assert_allclose(coordinate_median(pts), [1.5, 2.5])
    np.testing.assert_allclose(resolve_origin(pts, (3, 4)), [3.0, 4.0])
    with pytest.raises(ConfigError):
        resolve_origin(pts, "mean")
    with pytest.raises(ConfigError):
        resolve_origin(pts, (1.0, 2.0, 3.0))


def test_biplot_curve_shape_and_translation(rng):
    pts = rng.standard_normal((300, 2))
    A = uniform_directions(120)
    c = biplot_curve(pts, 0.1, "median", A)
    assert c.shape == (120, 2)
    moved = biplot_curve(pts + [5.0, -2.0], 0.1, "median", A)
    np.testing.assert_allclose(moved, c + [5.0, -2.0], atol=1e-12)
    assert not polyline_self_intersects(c, closed=True)


def test_biplot_tukey_origin(rng):
    pts = rng.standard_normal((80, 2))
    c = biplot_curve(pts, 0.2, "tukey", 60)
    o = tukey_median(pts)[1].centroid()
    # the curve point for direction s lies on the ray from the origin
    A = uniform_directions(60)
    r = np.einsum("ij,ij->i", c - o, A.vectors)
    np.testing.assert_allclose(c, o + r[:, None] * A.vectors, atol=1e-12)


def test_biplot_requires_sorted_directions(rng):
    pts = rng.standard_normal((30, 2))
    A = DirectionSet.from_vectors([[0, 1], [1, 0], [-1, -1]], sort=False)
    with pytest.raises(ConfigError):
        biplot_curve(pts, 0.2, "median", A)


def test_kappa_of_empirical_envelope_is_finite(rng):
    e = build_envelope(rng.standard_normal((1000, 2)), 0.1, 200)
    assert 1.0 <= kappa(e.region) < 1.2


def test_r7_envelope_estimator(rng):
    pts = rng.standard_normal((101, 2))
    e1 = build_envelope(pts, 0.1, 60, EmpiricalEstimator("r7"))
    e2 = build_envelope(pts, 0.1, 60)
    # R7 at (n-1)p = 10 is exactly the 11th order statistic, type 1 the 11th too
    np.testing.assert_array_equal(e1.offsets, e2.offsets)
