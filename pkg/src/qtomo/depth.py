"""Halfspace depth of planar samples.

The depth of a point is the smallest number of sample points in a closed
halfplane containing it. Besides the exact depth this module has a
brute-force depth region that does not go through directional quantiles,
the mass of tangent halfplanes, the largest mass carried by one line, and
the deepest envelope.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .envelope import critical_directions, rank_envelope, resolve_directions
from .geom import ConvexRegion, RegionKind
from .quantile import as_sample2, inf_rank

#: angular tolerance of the exact depth sweep, radians
DEPTH_ATOL = 1e-12

#: angular tolerance used by the brute-force region, whose candidate
#: vertices are computed line intersections
ORACLE_ATOL = 1e-9

#: collinearity tolerance of the hyperplane mass, radians
LINE_ATOL = 1e-9

#: above this many points the deepest envelope uses equally spaced
#: directions, since the critical set grows quadratically
CRITICAL_MAX = 400
MEDIAN_DIRECTIONS = 1009


@dataclass(frozen=True)
class DepthValue:
    count: int
    n: int

    @property
    def value(self):
        return self.count / self.n

    def __float__(self):
        return self.value


def depth_counts(points, probes, atol=DEPTH_ATOL):
    """Integer depth counts for an array of probe points."""
    x = as_sample2(points)
    q = np.asarray(probes, dtype=float).reshape(-1, 2)
    return _kernels.depth_counts(np.ascontiguousarray(x[:, 0]), np.ascontiguousarray(x[:, 1]),
                                 np.ascontiguousarray(q[:, 0]), np.ascontiguousarray(q[:, 1]),
                                 float(atol))


def halfspace_depth(points, probe, atol=DEPTH_ATOL):
    """Exact depth of one point, O(n log n)."""
    x = as_sample2(points)
    count = int(depth_counts(x, np.asarray(probe, float).reshape(1, 2), atol)[0])
    return DepthValue(count, x.shape[0])


def _pair_line_crossings(x):
    """Data points plus all intersections of lines through two data points."""
    pts = np.unique(x, axis=0)
    i, j = np.triu_indices(pts.shape[0], k=1)
    a = pts[i]
    d = pts[j] - a
    m = a.shape[0]
    out = [pts]
    # split the O(m^2) line pairs into blocks to bound memory
    for lo in range(0, m, 256):
        u = np.arange(lo, min(lo + 256, m))[:, None]
        v = np.arange(m)[None, :]
        keep = v > u
        uu = np.broadcast_to(u, keep.shape)[keep]
        vv = np.broadcast_to(v, keep.shape)[keep]
        det = d[uu, 0] * d[vv, 1] - d[uu, 1] * d[vv, 0]
        scale = np.hypot(d[uu, 0], d[uu, 1]) * np.hypot(d[vv, 0], d[vv, 1])
        ok = np.abs(det) > 1e-12 * scale
        uu, vv, det = uu[ok], vv[ok], det[ok]
        w = a[vv] - a[uu]
        s = (w[:, 0] * d[vv, 1] - w[:, 1] * d[vv, 0]) / det
        out.append(a[uu] + s[:, None] * d[uu])
    cand = np.concatenate(out)
    lo_box = x.min(axis=0)
    hi_box = x.max(axis=0)
    pad = 1e-9 * (1.0 + np.abs(x).max())
    inside = np.all((cand >= lo_box - pad) & (cand <= hi_box + pad), axis=1)
    return cand[inside]


def _hull_region(c):
    """Hull of candidates already sorted by (x, y) without duplicates."""
    if c.shape[0] == 0:
        return ConvexRegion.empty()
    idx = _kernels.hull_indices(np.ascontiguousarray(c[:, 0]), np.ascontiguousarray(c[:, 1]))
    v = c[idx]
    if v.shape[0] == 1:
        return ConvexRegion(RegionKind.POINT, v)
    if v.shape[0] == 2:
        return ConvexRegion(RegionKind.SEGMENT, v)
    return ConvexRegion(RegionKind.POLYGON, v)


def depth_regions_oracle(points, ps, atol=ORACLE_ATOL):
    """Brute-force depth regions ``{x : depth(x) >= p}`` for several levels.

    Every vertex of a depth region is a data point or a crossing of two
    lines through data points, so each region is the convex hull of those
    candidates whose depth reaches the level. Candidate depths are found
    by the sweep; no directional quantile is involved. Cost is O(n^5 log n);
    meant for n up to a few dozen.
    """
    x = as_sample2(points)
    n = x.shape[0]
    # sorted and deduplicated once; every subset below stays that way
    cand = np.unique(_pair_line_crossings(x), axis=0)
    counts = depth_counts(x, cand, atol)
    regions = []
    for p in np.atleast_1d(ps):
        need = inf_rank(float(p), n) if p < 1 else n
        regions.append(_hull_region(cand[counts >= need]))
    return regions


def depth_region_oracle(points, p, atol=ORACLE_ATOL):
    return depth_regions_oracle(points, [p], atol)[0]


def tangent_count(points, halfplane, tol=0.0):
    """Number of points with ``s.x <= q + tol`` for ``{x : s.x >= q}``."""
    x = as_sample2(points)
    s = halfplane.s
    proj = x[:, 0] * s.sx + x[:, 1] * s.sy
    return int(np.count_nonzero(proj <= halfplane.q + tol))


def tangent_mass(points, halfplane, tol=0.0):
    """Fraction of the sample in the closed side away from the halfplane.

    Projections are computed exactly as the quantile kernels compute them,
    so a halfplane at a sample quantile counts its boundary points without
    any tolerance.
    """
    x = as_sample2(points)
    return tangent_count(x, halfplane, tol) / x.shape[0]


def max_line_count(points, atol=LINE_ATOL):
    """Largest number of sample points on one line (or one point)."""
    x = as_sample2(points)
    n = x.shape[0]
    best = 1
    for i in range(n):
        d = x - x[i]
        same = (d[:, 0] == 0.0) & (d[:, 1] == 0.0)
        k0 = int(same.sum())
        if k0 == n:
            return n
        dd = d[~same]
        ang = np.sort(np.mod(np.arctan2(dd[:, 1], dd[:, 0]), math.pi))
        # clusters of nearly equal angles mod pi are lines through point i
        brk = np.flatnonzero(np.diff(ang) > atol)
        sizes = np.diff(np.concatenate([[0], brk + 1, [ang.size]]))
        if sizes.size > 1 and ang[0] + math.pi - ang[-1] <= atol:
            sizes[0] += sizes[-1]
            sizes = sizes[:-1]
        best = max(best, k0 + int(sizes.max()))
    return best


def max_hyperplane_mass(points, atol=LINE_ATOL):
    """Largest fraction of the sample lying on a single line."""
    x = as_sample2(points)
    return max_line_count(x, atol) / x.shape[0]


def tukey_median(points, A=None):
    """Deepest nonempty envelope.

    Returns ``(p_max, region)`` with ``p_max = k/n`` for the largest ``k``
    whose rank-``k`` envelope is nonempty, found by binary search. By
    default the critical directions are used, which makes the region the
    exact deepest depth region; above ``CRITICAL_MAX`` points ``A``
    defaults to ``MEDIAN_DIRECTIONS`` equally spaced directions, giving an
    envelope that contains the exact one. Use ``region.centroid()`` when
    a single point is wanted.
    """
    x = as_sample2(points)
    n = x.shape[0]
    if A is None:
        A = critical_directions(x) if n <= CRITICAL_MAX else resolve_directions(MEDIAN_DIRECTIONS)
    else:
        A = resolve_directions(A)
    lo, hi = 1, n
    best = rank_envelope(x, 1, A).region
    while lo < hi:
        mid = (lo + hi + 1) // 2
        region = rank_envelope(x, mid, A).region
        if region.is_empty:
            hi = mid - 1
        else:
            lo, best = mid, region
    return lo / n, best
