"""Directional quantile envelopes.

An envelope at level ``p`` over a direction set ``A`` is the intersection
of the halfplanes ``{x : s.x >= Q(p, s)}`` for ``s`` in ``A``. With
empirical type-1 quantiles and the critical direction set of the sample
it coincides with the halfspace depth region ``{x : depth(x) >= p}``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidP, NoEnvelope, TooFewDirections
from .geom import (TWO_PI, ConvexRegion, Halfplane, UnitDirection, _angles,
                   intersect_normals, max_angular_gap)
from .quantile import QuantileVersion, as_sample2, order_statistics, quantile

DEFAULT_DIRECTIONS = 360

# critical normals closer than this (radians) are merged
CRITICAL_ANGLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Unit directions, stored as an ``(m, 2)`` array."""

    vectors: np.ndarray
    sorted_by_angle: bool = True
    angles: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float).reshape(-1, 2)
        if v.shape[0] == 0:
            raise TooFewDirections("direction set is empty")
        norms = np.hypot(v[:, 0], v[:, 1])
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ConfigError("directions must be unit vectors")
        ang = _angles(v)
        if self.sorted_by_angle and np.any(np.diff(ang) <= 0.0):
            raise ConfigError("directions flagged as sorted must have increasing angles")
        v.setflags(write=False)
        ang.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "angles", ang)

    def __len__(self):
        return self.vectors.shape[0]

    def __getitem__(self, i):
        return UnitDirection(*self.vectors[i])

    @property
    def dirs(self):
        return [UnitDirection(*row) for row in self.vectors]

    def as_array(self):
        return self.vectors

    def max_gap(self):
        """Largest angular gap, in radians; bounded envelopes need < pi."""
        return max_angular_gap(np.sort(self.angles))

    @classmethod
    def from_angles(cls, angles):
        a = np.mod(np.asarray(angles, dtype=float).reshape(-1), TWO_PI)
        a = np.unique(a)
        return cls(np.column_stack([np.cos(a), np.sin(a)]), True)

    @classmethod
    def from_vectors(cls, vectors, sort=True):
        v = np.asarray(vectors, dtype=float).reshape(-1, 2)
        v = v / np.hypot(v[:, 0], v[:, 1])[:, None]
        if sort:
            v = v[np.argsort(_angles(v), kind="stable")]
        return cls(v, sort)


def uniform_directions(n):
    """``n`` equally spaced directions starting at angle 0."""
    if int(n) != n or n < 3:
        raise TooFewDirections(f"need at least 3 directions, got {n}")
    n = int(n)
    theta = TWO_PI * np.arange(n) / n
    return DirectionSet(np.column_stack([np.cos(theta), np.sin(theta)]), True)


def critical_directions(points, tol=CRITICAL_ANGLE_TOL):
    """Normals of all lines through two sample points, both orientations.

    The four axis directions are always included. Between two consecutive
    directions of this set the order of the projections does not change,
    so envelopes over it are exact for empirical quantiles. The set has
    O(n^2) members.
    """
    x = as_sample2(points)
    i, j = np.triu_indices(x.shape[0], k=1)
    d = x[j] - x[i]
    keep = (d[:, 0] != 0.0) | (d[:, 1] != 0.0)
    d = d[keep]
    normals = np.column_stack([-d[:, 1], d[:, 0]])
    normals /= np.hypot(normals[:, 0], normals[:, 1])[:, None]
    axes = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    allv = np.concatenate([normals, -normals, axes])
    ang = _angles(allv)
    order = np.argsort(ang, kind="stable")
    ang = ang[order]
    allv = allv[order]
    keep = np.ones(ang.size, bool)
    keep[1:] = np.diff(ang) > tol
    if ang.size > 1 and ang[0] + TWO_PI - ang[-1] <= tol:
        keep[-1] = False
    return DirectionSet(allv[keep], True)


def resolve_directions(A):
    if A is None:
        return uniform_directions(DEFAULT_DIRECTIONS)
    if isinstance(A, DirectionSet):
        return A
    if isinstance(A, (int, np.integer)):
        return uniform_directions(A)
    return DirectionSet.from_vectors(A)


def check_level(p):
    """Envelope levels live in (0, 1/2]."""
    p = float(p)
    if not 0.0 < p <= 0.5:
        raise InvalidP(f"envelope level must lie in (0, 0.5], got {p!r}")
    return p


@dataclass(frozen=True, eq=False)
class Envelope:
    """Envelope at level ``p``: region plus the halfplanes that define it.

    ``active`` indexes ``directions``/``offsets`` and names the halfplanes
    carrying a boundary edge of ``region``.
    """

    p: float
    region: ConvexRegion
    directions: DirectionSet
    offsets: np.ndarray

    @property
    def active(self):
        return self.region.active

    @property
    def normals(self):
        return self.directions.vectors

    @property
    def halfplanes(self):
        return [Halfplane(UnitDirection(*s), float(q))
                for s, q in zip(self.directions.vectors, self.offsets)]


def _make(p, A, offsets):
    offsets = np.array(offsets, dtype=float)
    offsets.setflags(write=False)
    region = intersect_normals(A.vectors, offsets)
    return Envelope(p, region, A, offsets)


def _default_estimator(est):
    if est is None:
        from .estimators import EmpiricalEstimator

        return EmpiricalEstimator(QuantileVersion.INF_TYPE1)
    return est


def build_envelopes(points, ps, A=None, est=None):
    """Envelopes for several levels sharing one pass over the data."""
    x = as_sample2(points)
    ps = [check_level(p) for p in np.atleast_1d(ps)]
    A = resolve_directions(A)
    est = _default_estimator(est)
    q = np.asarray(est.evaluate_levels(x, A, ps), dtype=float)
    return [_make(p, A, q[:, i]) for i, p in enumerate(ps)]


def build_envelope(points, p, A=None, est=None):
    """Envelope at a single level; an empty region is a valid result."""
    return build_envelopes(points, [p], A, est)[0]


def rank_envelope(points, k, A):
    """Envelope with offsets at the ``k``-th order statistic (1-based).

    Equals the empirical type-1 envelope at any ``p`` in ``((k-1)/n, k/n]``
    and is defined for every ``k`` up to ``n``.
    """
    x = as_sample2(points)
    q = order_statistics(x, A, [k - 1])[:, 0]
    return _make(k / x.shape[0], A, q)


def enclosed_count(region, points, tol=1e-9):
    """Number of points in the closed region."""
    return int(np.count_nonzero(region.contains(points, tol=tol)))


def coverage_search(points, target_mass, A=None, est=None):
    """Largest level ``k/n`` whose envelope holds at least ``target_mass``.

    Coverage shrinks as the level grows, so a binary search over
    ``k = 1 .. floor(n/2)`` suffices. Boundary points count as enclosed.
    Returns ``(p, envelope)``.
    """
    x = as_sample2(points)
    target = float(target_mass)
    if not 0.0 < target <= 1.0:
        raise ConfigError(f"target mass must lie in (0, 1], got {target_mass!r}")
    n = x.shape[0]
    A = resolve_directions(A)
    est = _default_estimator(est)
    need = math.ceil(target * n - 1e-9 * target * n)
    cache = {}

    def envelope_at(k):
        if k not in cache:
            cache[k] = build_envelope(x, k / n, A, est)
        return cache[k]

    def enough(k):
        return enclosed_count(envelope_at(k).region, x) >= need

    if n < 2 or not enough(1):
        raise NoEnvelope(f"no envelope encloses a fraction {target} of the sample")
    lo, hi = 1, n // 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if enough(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo / n, envelope_at(lo)


def coordinate_median(points):
    x = as_sample2(points)
    return np.array([quantile(x[:, 0], 0.5, QuantileVersion.R7),
                     quantile(x[:, 1], 0.5, QuantileVersion.R7)])


def resolve_origin(points, origin):
    if origin is None or (isinstance(origin, str) and origin == "median"):
        return coordinate_median(points)
    if isinstance(origin, str) and origin == "tukey":
        from .depth import tukey_median

        return tukey_median(points)[1].centroid()
    if isinstance(origin, str):
        raise ConfigError(f"unknown origin {origin!r}")
    o = np.asarray(origin, dtype=float).reshape(-1)
    if o.size != 2 or not np.isfinite(o).all():
        raise ConfigError(f"origin must be a finite 2-D point, got {origin!r}")
    return o


def biplot_curve(points, p, origin="median", A=None, est=None):
    """Points ``origin + Q(p, s; X - origin) s`` in angular order of ``A``.

    ``origin`` is a 2-D point, ``"median"`` (coordinatewise) or
    ``"tukey"`` (vertex centroid of the deepest envelope).
    """
    x = as_sample2(points)
    p = check_level(p)
    A = resolve_directions(A)
    if not A.sorted_by_angle:
        raise ConfigError("biplot directions must be sorted by angle")
    est = _default_estimator(est)
    o = resolve_origin(x, origin)
    q = np.asarray(est.evaluate_levels(x - o, A, [p]), dtype=float)[:, 0]
    return o + q[:, None] * A.vectors
