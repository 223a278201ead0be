"""Planar convex geometry.

Halfplanes are stored as ``{x : s.x >= q}`` with a unit normal ``s``.
Regions produced by intersecting them are :class:`ConvexRegion` values,
classified as empty, a point, a segment or a counter-clockwise polygon.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .errors import DegenerateRegion, EmptyRegion, UnboundedRegion

TWO_PI = 2.0 * math.pi

#: default geometric tolerance, in data units
TOL = 1e-9

#: normals whose angles differ by less than this are merged
PARALLEL_ANGLE = 1e-10


@dataclass(frozen=True)
class UnitDirection:
    """A point on the unit circle."""

    sx: float
    sy: float

    def __post_init__(self):
        norm2 = self.sx * self.sx + self.sy * self.sy
        if not abs(norm2 - 1.0) <= 2e-12:
            raise ValueError(f"not a unit vector: ({self.sx}, {self.sy})")

    @classmethod
    def from_angle(cls, theta):
        return cls(math.cos(theta), math.sin(theta))

    @classmethod
    def from_vector(cls, v):
        vx, vy = float(v[0]), float(v[1])
        norm = math.hypot(vx, vy)
        if norm == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(vx / norm, vy / norm)

    @property
    def angle(self):
        """Angle in [0, 2*pi)."""
        theta = math.atan2(self.sy, self.sx)
        return theta + TWO_PI if theta < 0 else theta

    def to_array(self):
        return np.array([self.sx, self.sy])

    def __neg__(self):
        return UnitDirection(-self.sx, -self.sy)


@dataclass(frozen=True)
class Halfplane:
    """The closed halfplane ``{x : s.x >= q}``."""

    s: UnitDirection
    q: float

    def contains(self, point):
        return self.s.sx * point[0] + self.s.sy * point[1] >= self.q


class RegionKind(str, Enum):
    EMPTY = "empty"
    POINT = "point"
    SEGMENT = "segment"
    POLYGON = "polygon"


_KIND_CODES = {
    _kernels.POINT: RegionKind.POINT,
    _kernels.SEGMENT: RegionKind.SEGMENT,
    _kernels.POLYGON: RegionKind.POLYGON,
}


def _frozen(a, dtype=float, shape=None):
    a = np.array(a, dtype=dtype)
    if shape is not None:
        a = a.reshape(shape)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    """Result of a halfplane intersection.

    ``vertices`` is a ``(k, 2)`` array: counter-clockwise for polygons, two
    endpoints for segments, one row for a point, no rows when empty.
    ``active`` holds indices into the intersected constraint list: the
    constraints carrying a boundary edge, or for collapsed regions the
    witnesses that force the collapse.
    """

    kind: RegionKind
    vertices: np.ndarray
    active: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    def __post_init__(self):
        object.__setattr__(self, "kind", RegionKind(self.kind))
        object.__setattr__(self, "vertices", _frozen(self.vertices, shape=(-1, 2)))
        object.__setattr__(self, "active", _frozen(self.active, np.int64, (-1,)))

    @classmethod
    def empty(cls, witnesses=()):
        return cls(RegionKind.EMPTY, np.empty((0, 2)), witnesses)

    @property
    def is_empty(self):
        return self.kind is RegionKind.EMPTY

    def __len__(self):
        return self.vertices.shape[0]

    def centroid(self):
        """Mean of the vertices."""
        if self.is_empty:
            raise EmptyRegion("empty region has no centroid")
        return self.vertices.mean(axis=0)

    def diameter(self):
        if self.is_empty:
            raise EmptyRegion("empty region has no diameter")
        v = self.vertices
        d = np.sqrt(((v[:, None, :] - v[None, :, :]) ** 2).sum(-1))
        return float(d.max())

    def area(self):
        if self.kind is not RegionKind.POLYGON:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def contains(self, points, tol=TOL):
        """Closed membership test, ``tol`` in data units."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = pts.reshape(-1, 2)
        if self.is_empty:
            out = np.zeros(len(pts), bool)
        elif self.kind is RegionKind.POLYGON:
            out = np.empty(len(pts), bool)
            normals, offsets = _edge_halfplanes(self.vertices)
            for lo in range(0, len(pts), 4096):
                chunk = pts[lo:lo + 4096]
                slack = chunk @ normals.T - offsets
                out[lo:lo + 4096] = (slack >= -tol).all(axis=1)
        else:
            out = _distance_to_segments(pts, self.vertices, closed=False) <= tol
        return bool(out[0]) if single else out


def _edge_halfplanes(vertices):
    """Inward unit normals and offsets of a CCW polygon's edges."""
    v = np.asarray(vertices, float)
    e = np.roll(v, -1, axis=0) - v
    normals = np.column_stack([-e[:, 1], e[:, 0]])
    normals /= np.hypot(normals[:, 0], normals[:, 1])[:, None]
    offsets = np.einsum("ij,ij->i", normals, v)
    return normals, offsets


def _angles(normals):
    theta = np.arctan2(normals[:, 1], normals[:, 0])
    return np.where(theta < 0.0, theta + TWO_PI, theta)


def max_angular_gap(angles):
    """Largest gap between consecutive angles on the circle (sorted input)."""
    a = np.asarray(angles, float)
    if a.size == 0:
        return TWO_PI
    gaps = np.diff(a)
    wrap = a[0] + TWO_PI - a[-1]
    return float(max(wrap, gaps.max() if gaps.size else 0.0))


def intersect_normals(normals, offsets, tol=TOL):
    """Intersect ``{x : normals[i].x >= offsets[i]}`` over all ``i``.

    ``normals`` must be unit vectors. Input already sorted by angle in
    [0, 2*pi) skips the sort, leaving a single linear pass. Raises
    :class:`UnboundedRegion` when the normals fit in a closed half circle.
    """
    normals = np.ascontiguousarray(normals, dtype=float).reshape(-1, 2)
    offsets = np.ascontiguousarray(offsets, dtype=float).reshape(-1)
    n = normals.shape[0]
    if n == 0:
        raise ValueError("need at least one halfplane")
    if offsets.shape[0] != n:
        raise ValueError("normals and offsets differ in length")
    ang = _angles(normals)
    if n > 1 and np.any(ang[1:] < ang[:-1]):
        order = np.argsort(ang, kind="stable")
        ang = ang[order]
    else:
        order = np.arange(n)
    if max_angular_gap(ang) >= math.pi - 1e-12:
        raise UnboundedRegion("directions lie in a closed half circle")

    q = offsets[order]
    starts = np.ones(n, bool)
    starts[1:] = np.diff(ang) >= PARALLEL_ANGLE
    wrap = n > 1 and ang[0] + TWO_PI - ang[-1] < PARALLEL_ANGLE
    if starts.all() and not wrap:
        keep = np.arange(n)
    else:
        group = np.cumsum(starts) - 1
        if wrap and group[-1] > 0:
            group[group == group[-1]] = 0
        pos = np.arange(n)
        ranked = np.lexsort((pos, -q, group))
        first = np.ones(n, bool)
        first[1:] = group[ranked[1:]] != group[ranked[:-1]]
        keep = np.sort(ranked[first])
    src = order[keep]
    nx = np.ascontiguousarray(normals[src, 0])
    ny = np.ascontiguousarray(normals[src, 1])
    qq = np.ascontiguousarray(offsets[src])

    ok, lines = _kernels.halfplane_chain(nx, ny, qq, tol)
    if not ok:
        return ConvexRegion.empty(src[lines])
    worst, where = _kernels.max_violation(nx, ny, qq, lines)
    if worst > 4.0 * tol:
        return ConvexRegion.empty(np.append(src[lines], src[where]))
    kind, verts, act = _kernels.finalize_chain(nx, ny, qq, lines, tol)
    return ConvexRegion(_KIND_CODES[kind], verts, src[act])


def intersect_halfplanes(hs, tol=TOL):
    """Intersect a sequence of :class:`Halfplane`; see :func:`intersect_normals`."""
    hs = list(hs)
    if not hs:
        raise ValueError("need at least one halfplane")
    normals = np.array([[h.s.sx, h.s.sy] for h in hs])
    offsets = np.array([h.q for h in hs], dtype=float)
    return intersect_normals(normals, offsets, tol=tol)


def _distance_to_segments(points, vertices, closed=True):
    """Distance from each point to the polyline through ``vertices``."""
    p = np.asarray(points, float).reshape(-1, 2)
    a = np.asarray(vertices, float).reshape(-1, 2)
    if a.shape[0] == 1:
        return np.hypot(p[:, 0] - a[0, 0], p[:, 1] - a[0, 1])
    b = np.roll(a, -1, axis=0) if closed else a[1:]
    a = a if closed else a[:-1]
    d = b - a
    len2 = (d ** 2).sum(axis=1)
    len2 = np.where(len2 > 0.0, len2, 1.0)
    out = np.empty(p.shape[0])
    for lo in range(0, p.shape[0], 2048):
        chunk = p[lo:lo + 2048]
        rel = chunk[:, None, :] - a[None, :, :]
        t = np.clip((rel * d[None]).sum(-1) / len2, 0.0, 1.0)
        diff = rel - t[..., None] * d[None]
        out[lo:lo + 2048] = np.sqrt((diff ** 2).sum(-1)).min(axis=1)
    return out


def distance_to_region(points, region):
    """Euclidean distance from points to a nonempty closed convex region."""
    if region.is_empty:
        raise EmptyRegion("distance to an empty region")
    pts = np.asarray(points, float).reshape(-1, 2)
    if region.kind is RegionKind.POLYGON:
        dist = _distance_to_segments(pts, region.vertices, closed=True)
        return np.where(region.contains(pts, tol=0.0), 0.0, dist)
    return _distance_to_segments(pts, region.vertices, closed=False)


def hausdorff_distance(a, b):
    """Pompeiu-Hausdorff distance between two nonempty convex regions.

    The distance to a convex set is a convex function, so each one-sided
    supremum is attained at a vertex; the result is exact up to rounding.
    """
    if a.is_empty or b.is_empty:
        raise EmptyRegion("Hausdorff distance needs nonempty regions")
    ab = distance_to_region(a.vertices, b).max()
    ba = distance_to_region(b.vertices, a).max()
    return float(max(ab, ba))


def kappa(region):
    """Largest reciprocal cosine of half the normal-cone angle at a vertex.

    Equals 1 for smooth bodies and grows without bound as a vertex
    sharpens; undefined (raises) for regions without interior.
    """
    if region.kind is not RegionKind.POLYGON:
        raise DegenerateRegion(f"kappa is infinite for a {region.kind.value} region")
    v = region.vertices
    e = np.roll(v, -1, axis=0) - v
    e /= np.hypot(e[:, 0], e[:, 1])[:, None]
    # consecutive edge directions meet at the same angle as their normals
    c = np.einsum("ij,ij->i", e, np.roll(e, -1, axis=0))
    c = np.clip(c, -1.0, 1.0)
    return float(np.sqrt(2.0 / (1.0 + c)).max())


def support_function(region, u):
    """sup over the region of u.x."""
    if region.is_empty:
        raise EmptyRegion("support function of an empty region")
    if isinstance(u, UnitDirection):
        u = u.to_array()
    return float((region.vertices @ np.asarray(u, float)).max())


def polyline_self_intersects(points, closed=False):
    """True iff two non-adjacent segments of the polyline touch or cross."""
    p = np.asarray(points, float).reshape(-1, 2)
    if closed:
        a, b = p, np.roll(p, -1, axis=0)
    else:
        a, b = p[:-1], p[1:]
    m = a.shape[0]
    if m < 3:
        return False
    i, j = np.triu_indices(m, k=2)
    if closed:
        adjacent = (i == 0) & (j == m - 1)
        i, j = i[~adjacent], j[~adjacent]
    for lo in range(0, i.size, 1 << 20):
        if _segments_meet(a[i[lo:lo + (1 << 20)]], b[i[lo:lo + (1 << 20)]],
                          a[j[lo:lo + (1 << 20)]], b[j[lo:lo + (1 << 20)]]).any():
            return True
    return False


def _orient(a, b, c):
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def _on_box(a, b, c):
    return ((np.minimum(a[:, 0], b[:, 0]) <= c[:, 0]) & (c[:, 0] <= np.maximum(a[:, 0], b[:, 0]))
            & (np.minimum(a[:, 1], b[:, 1]) <= c[:, 1]) & (c[:, 1] <= np.maximum(a[:, 1], b[:, 1])))


def _segments_meet(a, b, c, d):
    d1 = _orient(c, d, a)
    d2 = _orient(c, d, b)
    d3 = _orient(a, b, c)
    d4 = _orient(a, b, d)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = (((d1 == 0) & _on_box(c, d, a)) | ((d2 == 0) & _on_box(c, d, b))
             | ((d3 == 0) & _on_box(a, b, c)) | ((d4 == 0) & _on_box(a, b, d)))
    return proper | touch


def convex_hull(points):
    """Convex hull as a :class:`ConvexRegion` (monotone chain)."""
    p = np.unique(np.asarray(points, float).reshape(-1, 2), axis=0)
    if p.shape[0] == 0:
        return ConvexRegion.empty()
    if p.shape[0] == 1:
        return ConvexRegion(RegionKind.POINT, p)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    pts = [tuple(r) for r in p]
    lower, upper = [], []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    for pt in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2:
        return ConvexRegion(RegionKind.SEGMENT, np.array(sorted(hull)))
    return ConvexRegion(RegionKind.POLYGON, np.array(hull))


def region_from_vertices(vertices):
    """Wrap a CCW convex vertex list (1, 2 or more rows) as a region."""
    v = np.asarray(vertices, float).reshape(-1, 2)
    kinds = {0: RegionKind.EMPTY, 1: RegionKind.POINT, 2: RegionKind.SEGMENT}
    return ConvexRegion(kinds.get(v.shape[0], RegionKind.POLYGON), v)


def reintersect(region, tol=TOL):
    """Rebuild a polygon by intersecting its edge halfplanes."""
    if region.kind is not RegionKind.POLYGON:
        return region
    normals, offsets = _edge_halfplanes(region.vertices)
    return intersect_normals(normals, offsets, tol=tol)
