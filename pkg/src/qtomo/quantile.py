"""Univariate and directional quantiles of finite samples.

Two versions are available. ``INF_TYPE1`` is the left-continuous inverse
of the empirical distribution function, ``inf{u : F(u) >= p}``, i.e. the
``ceil(p n)``-th order statistic. ``R7`` interpolates linearly at rank
``1 + (n - 1) p`` and is the usual default of statistical packages.

Directional quantiles are quantiles of the projections ``s.x_i``; the
vectorized entry point :func:`directional_quantiles` evaluates many
directions and levels in one compiled pass.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numba
import numpy as np

from . import _kernels
from .errors import DataError, EmptySample, InvalidP, NonFiniteValue

# relative guard used when comparing p*n against an integer rank
RANK_NUDGE = 1e-9

# samples up to this size are sorted outright in every direction
_PILOT_SIZE = 4096


class QuantileVersion(str, Enum):
    INF_TYPE1 = "inftype1"
    R7 = "r7"


@dataclass(frozen=True)
class QuantileSet:
    """Closed interval of minimizers of the check loss."""

    lo: float
    hi: float

    @property
    def ambiguous(self):
        return self.hi > self.lo


def as_sample1(values):
    x = np.asarray(values, dtype=float).reshape(-1)
    if x.size == 0:
        raise EmptySample("sample has no values")
    if not np.isfinite(x).all():
        raise NonFiniteValue("sample contains NaN or infinite values")
    return x


def as_sample2(points):
    """Validate a point cloud as a C-contiguous ``(n, 2)`` float array."""
    x = np.asarray(points, dtype=float)
    if x.size == 0:
        raise EmptySample("sample has no points")
    if x.ndim != 2 or x.shape[1] != 2:
        if x.ndim == 1 and x.size == 2:
            x = x.reshape(1, 2)
        else:
            raise DataError(f"expected an (n, 2) array, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise NonFiniteValue("sample contains NaN or infinite coordinates")
    return np.ascontiguousarray(x)


def check_p(p):
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidP(f"p must lie in (0, 1), got {p!r}")
    return p


def inf_rank(p, n):
    """1-based rank ``ceil(p n)`` with a guard against p*n rounding up."""
    pn = p * n
    k = math.ceil(pn - RANK_NUDGE * pn)
    return min(max(k, 1), n)


def _r7_position(p, n):
    """0-based position ``(n - 1) p`` split into floor and fraction."""
    h = (n - 1) * p
    j = round(h)
    if abs(h - j) <= RANK_NUDGE * max(h, 1.0):
        return int(j), 0.0
    j = math.floor(h)
    return int(j), h - j


def _lerp(a, b, f):
    return a + f * (b - a)


def quantile(values, p, version=QuantileVersion.INF_TYPE1):
    x = np.sort(as_sample1(values))
    p = check_p(p)
    n = x.size
    if QuantileVersion(version) is QuantileVersion.INF_TYPE1:
        return float(x[inf_rank(p, n) - 1])
    j, f = _r7_position(p, n)
    if f == 0.0 or j + 1 >= n:
        return float(x[j])
    return float(_lerp(x[j], x[j + 1], f))


def quantile_set(values, p):
    """All minimizers of the check loss, ``[lo, hi]``.

    ``hi > lo`` happens only when ``p n`` is an integer ``k`` and the
    ``k``-th and ``(k + 1)``-th order statistics differ.
    """
    x = np.sort(as_sample1(values))
    p = check_p(p)
    n = x.size
    k = inf_rank(p, n)
    lo = float(x[k - 1])
    pn = p * n
    if k < n and abs(pn - k) <= RANK_NUDGE * pn:
        return QuantileSet(lo, float(x[k]))
    return QuantileSet(lo, lo)


def check_loss(values, u, p):
    """Mean check loss ``(1/n) sum (x_i - u)(p - 1[x_i < u])``."""
    r = as_sample1(values) - float(u)
    p = check_p(p)
    return float(np.mean(r * (p - (r < 0.0))))


def _direction_array(dirs):
    from .geom import UnitDirection

    if isinstance(dirs, UnitDirection):
        return np.array([[dirs.sx, dirs.sy]])
    if hasattr(dirs, "as_array"):
        return np.asarray(dirs.as_array(), dtype=float)
    a = np.asarray(
        [[d.sx, d.sy] if isinstance(d, UnitDirection) else d for d in dirs]
        if isinstance(dirs, (list, tuple)) else dirs, dtype=float)
    return a.reshape(-1, 2)


def _pilot(n):
    if n <= 4 * _PILOT_SIZE:
        return np.empty(0, np.int64)
    rng = np.random.default_rng(0x5eed)
    return np.sort(rng.choice(n, _PILOT_SIZE, replace=False)).astype(np.int64)


def _chunks(m):
    # few long runs keep the warm start effective; enough for every thread
    return max(1, min(m // 16, 4 * numba.get_num_threads()))


def order_statistics(points, dirs, ranks):
    """0-based order statistics of projections, shape ``(m, len(ranks))``.

    ``dirs`` need not be normalized. The result is exact and independent
    of the number of worker threads.
    """
    x = as_sample2(points)
    d = _direction_array(dirs)
    ranks = np.ascontiguousarray(ranks, dtype=np.int64)
    if ranks.size and (ranks.min() < 0 or ranks.max() >= x.shape[0]):
        raise ValueError("rank out of range")
    return _kernels.directional_order_stats(
        np.ascontiguousarray(x[:, 0]), np.ascontiguousarray(x[:, 1]),
        np.ascontiguousarray(d[:, 0]), np.ascontiguousarray(d[:, 1]),
        ranks, _pilot(x.shape[0]), _chunks(d.shape[0]))


def directional_quantiles(points, dirs, ps, version=QuantileVersion.INF_TYPE1):
    """Quantiles of ``s.x_i`` for every direction and level.

    Returns an ``(m, L)`` array for ``m`` directions and ``L`` levels.
    """
    x = as_sample2(points)
    n = x.shape[0]
    ps = [check_p(p) for p in np.atleast_1d(ps)]
    version = QuantileVersion(version)
    if version is QuantileVersion.INF_TYPE1:
        want = [(inf_rank(p, n) - 1, inf_rank(p, n) - 1, 0.0) for p in ps]
    else:
        want = []
        for p in ps:
            j, f = _r7_position(p, n)
            want.append((j, min(j + 1, n - 1), f))
    ranks = sorted({r for j, k, _ in want for r in (j, k)})
    col = {r: i for i, r in enumerate(ranks)}
    stats = order_statistics(x, dirs, ranks)
    out = np.empty((stats.shape[0], len(ps)))
    for i, (j, k, f) in enumerate(want):
        a = stats[:, col[j]]
        out[:, i] = a if f == 0.0 else _lerp(a, stats[:, col[k]], f)
    return out


def directional_quantile(points, direction, p, version=QuantileVersion.INF_TYPE1):
    """The ``p``-quantile of the projections onto ``direction``."""
    return float(directional_quantiles(points, direction, [p], version)[0, 0])


def project(points, direction):
    """Projections ``s.x_i`` computed the same way as the compiled kernels."""
    x = as_sample2(points)
    s = _direction_array(direction)[0]
    return x[:, 0] * s[0] + x[:, 1] * s[1]
