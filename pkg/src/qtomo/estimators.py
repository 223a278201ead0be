"""Directional quantile estimators.

An estimator maps a sample, a set of directions and a list of levels to a
matrix of quantiles of the projections, one row per direction. Three are
provided: plain empirical quantiles, a peaks-over-threshold tail model for
levels below the data, and linear quantile regression on a covariate for
conditional envelopes.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .envelope import _make, check_level, resolve_directions
from .errors import (DataError, DegenerateCovariate, DegenerateTail,
                     ExtrapolationRefused, OutOfRegime, TooFewExceedances)
from .quantile import (QuantileVersion, as_sample1, as_sample2, check_p,
                       directional_quantiles, inf_rank)

MIN_TAIL_SAMPLE = 50
MIN_EXCEEDANCES = 20

# |xi| below this uses the exponential limit of the tail quantile
XI_ZERO = 1e-8


class DirectionalQuantileEstimator(ABC):
    """Maps (sample, directions, levels) to quantiles of projections.

    Implementations must be translation and scale equivariant: shifting
    the sample by ``b`` shifts the value for direction ``s`` by ``s.b``,
    and scaling by ``c > 0`` scales it by ``c``.
    """

    @abstractmethod
    def evaluate_levels(self, points, dirs, ps):
        """``(m, L)`` array of quantiles for ``m`` directions, ``L`` levels."""

    def evaluate(self, points, dirs, p):
        """Quantiles at one level; a scalar for a single direction."""
        from .geom import UnitDirection

        out = np.asarray(self.evaluate_levels(points, dirs, [p]))[:, 0]
        if isinstance(dirs, UnitDirection):
            return float(out[0])
        return out


class EmpiricalEstimator(DirectionalQuantileEstimator):
    """Plug-in quantiles of the projected sample."""

    def __init__(self, version=QuantileVersion.INF_TYPE1):
        self.version = QuantileVersion(version)

    def evaluate_levels(self, points, dirs, ps):
        return directional_quantiles(points, dirs, ps, self.version)

    def __repr__(self):
        return f"EmpiricalEstimator({self.version.value!r})"


def empirical_estimator(version=QuantileVersion.INF_TYPE1):
    return EmpiricalEstimator(version)


# ---------------------------------------------------------------- tails


@dataclass(frozen=True)
class TailModel:
    """Generalized Pareto model of the lower tail of a sample.

    The tail is described on the reflected values ``z = -x``: ``u`` is the
    threshold, ``zeta_u`` the fraction of ``z`` strictly above it, and the
    excesses ``z - u`` are modelled as GPD(``xi``, ``sigma``).
    """

    threshold_fraction: float
    xi: float
    sigma: float
    u: float
    zeta_u: float
    n_exceed: int


def _pwm_fit(excess):
    """Shape and scale from the first two probability weighted moments."""
    e = np.sort(excess)
    m = e.size
    spread = e[-1] - e[0]
    if not spread > 1e-12 * max(abs(e[-1]), abs(e[0]), 1e-300):
        raise DegenerateTail("tail excesses have no spread")
    m0 = e.mean()
    plotting = (np.arange(1, m + 1) - 0.35) / m
    m1 = np.mean((1.0 - plotting) * e)
    denom = m0 - 2.0 * m1
    if not denom > 0.0:
        raise DegenerateTail("probability weighted moments give m0 - 2 m1 <= 0")
    sigma = 2.0 * m0 * m1 / denom
    xi = 2.0 - m0 / denom
    if not sigma > 0.0:
        raise DegenerateTail("non-positive tail scale")
    return xi, sigma


def _fit_sorted_z(z, threshold_fraction):
    """Tail fit from reflected values sorted ascending."""
    n = z.size
    if n < MIN_TAIL_SAMPLE:
        raise TooFewExceedances(f"tail fit needs n >= {MIN_TAIL_SAMPLE}, got {n}")
    u = z[inf_rank(1.0 - threshold_fraction, n) - 1]
    first = np.searchsorted(z, u, side="right")
    excess = z[first:] - u
    if excess.size < MIN_EXCEEDANCES:
        raise TooFewExceedances(
            f"{excess.size} exceedances above the threshold, need {MIN_EXCEEDANCES}")
    xi, sigma = _pwm_fit(excess)
    return TailModel(threshold_fraction, float(xi), float(sigma), float(u),
                     excess.size / n, int(excess.size))


def fit_gpd_tail(proj, threshold_fraction):
    """Fit a GPD to the lower ``threshold_fraction`` of ``proj``."""
    x = as_sample1(proj)
    tf = check_p(threshold_fraction)
    return _fit_sorted_z(np.sort(-x), tf)


def gpd_quantile(m, p):
    """Level exceeded by the reflected values with probability ``p``.

    Equals minus the lower ``p``-quantile of the original sample; valid
    for ``p <= zeta_u``, the fraction of the data the tail model covers.
    """
    p = check_p(p)
    if p > m.zeta_u:
        raise OutOfRegime(f"p = {p} lies above the tail fraction {m.zeta_u}")
    ratio = p / m.zeta_u
    if abs(m.xi) < XI_ZERO:
        return m.u - m.sigma * math.log(ratio)
    return m.u + m.sigma / m.xi * (ratio ** (-m.xi) - 1.0)


def tail_lower_quantile(m, p):
    """Lower ``p``-quantile of the modelled sample."""
    return -gpd_quantile(m, p)


class ExtremeEstimator(DirectionalQuantileEstimator):
    """Tail-model quantiles below ``threshold_fraction``, empirical above.

    For each direction the lower ``threshold_fraction`` of the projections
    is fitted by a generalized Pareto law. Levels at or above the
    threshold fraction (or above the fitted exceedance fraction, which can
    be smaller under ties) use the empirical type-1 quantile, so the two
    regimes agree exactly on the data range. ``per_direction`` maps
    direction indices to their own threshold fraction.
    """

    def __init__(self, threshold_fraction=0.1, per_direction=None):
        self.threshold_fraction = check_p(threshold_fraction)
        self.per_direction = {int(k): check_p(v) for k, v in (per_direction or {}).items()}

    def fraction_for(self, j):
        return self.per_direction.get(j, self.threshold_fraction)

    def tail_models(self, points, dirs):
        """Fitted :class:`TailModel` per direction."""
        from .quantile import _direction_array

        x = as_sample2(points)
        d = _direction_array(dirs)
        return [_fit_sorted_z(np.sort(-(x[:, 0] * a + x[:, 1] * b)), self.fraction_for(j))
                for j, (a, b) in enumerate(d)]

    def evaluate_levels(self, points, dirs, ps):
        from .quantile import _direction_array

        x = as_sample2(points)
        d = _direction_array(dirs)
        ps = [check_p(p) for p in np.atleast_1d(ps)]
        out = directional_quantiles(x, d, ps, QuantileVersion.INF_TYPE1)
        for j, (a, b) in enumerate(d):
            tf = self.fraction_for(j)
            low = [i for i, p in enumerate(ps) if p < tf]
            if not low:
                continue
            model = _fit_sorted_z(np.sort(-(x[:, 0] * a + x[:, 1] * b)), tf)
            for i in low:
                if ps[i] <= model.zeta_u:
                    out[j, i] = tail_lower_quantile(model, ps[i])
        return out

    def __repr__(self):
        return f"ExtremeEstimator(threshold_fraction={self.threshold_fraction})"


def extreme_estimator(threshold_fraction=0.1, per_direction=None):
    return ExtremeEstimator(threshold_fraction, per_direction)


# ---------------------------------------------------- quantile regression


@dataclass(frozen=True)
class LinearQRFit:
    """Line ``intercept + slope * t`` minimizing the mean check loss.

    ``support`` holds the indices of two sample points the line passes
    through.
    """

    intercept: float
    slope: float
    support: tuple = ()

    def __call__(self, t):
        return self.intercept + self.slope * np.asarray(t, dtype=float)


def pinball_loss(t, y, intercept, slope, p):
    """Mean check loss of the residuals ``y - intercept - slope * t``."""
    r = np.asarray(y, float) - (intercept + slope * np.asarray(t, float))
    return float(np.mean(r * (p - (r < 0.0))))


def _pair_line(t, y, i, j):
    """Line through points i and j, computed the same way for either order."""
    if j < i:
        i, j = j, i
    slope = (y[j] - y[i]) / (t[j] - t[i])
    return float(y[i] - slope * t[i]), float(slope)


def _regression_input(t, y):
    t = as_sample1(t)
    y = as_sample1(y)
    if t.size != y.size:
        raise DataError("covariate and response differ in length")
    if t.size < 2:
        raise DataError("quantile regression needs at least two points")
    if np.all(t == t[0]):
        raise DegenerateCovariate("all covariate values are equal")
    return t, y


def _enumerate(t, y, p):
    i, j = np.triu_indices(t.size, k=1)
    ok = t[i] != t[j]
    i, j = i[ok], j[ok]
    slope = (y[j] - y[i]) / (t[j] - t[i])
    intercept = y[i] - slope * t[i]
    loss = np.empty(i.size)
    for lo in range(0, i.size, 4096):
        r = y[None, :] - (intercept[lo:lo + 4096, None] + slope[lo:lo + 4096, None] * t[None, :])
        loss[lo:lo + 4096] = np.mean(r * (p - (r < 0.0)), axis=1)
    best = np.lexsort((intercept, np.abs(slope), loss))[0]
    return LinearQRFit(float(intercept[best]), float(slope[best]),
                       (int(i[best]), int(j[best])))


def _rotate(t, y, k, p):
    """Best line through point k: returns the index of its second point.

    The loss along lines through k is convex piecewise linear in the
    slope, with a kink where the line meets each other point; the optimum
    is the first kink at which the right derivative turns nonnegative.
    """
    d = t - t[k]
    move = np.flatnonzero(d != 0.0)
    dd = d[move]
    c = (y[move] - y[k]) / dd
    order = np.argsort(c, kind="stable")
    w = np.abs(dd[order])
    start = -(p * dd[dd > 0.0].sum() + (1.0 - p) * (-dd[dd < 0.0]).sum())
    slope = start + np.cumsum(w)
    first = int(np.argmax(slope >= 0.0))
    return int(move[order[first]])


def _pivot(t, y, p, start=None):
    n = t.size
    if start is None or t[start[0]] == t[start[1]]:
        k = int(np.argsort(y, kind="stable")[inf_rank(p, n) - 1])
        j = _rotate(t, y, k, p)
    else:
        k, j = start
    a, b = _pair_line(t, y, k, j)
    best = pinball_loss(t, y, a, b, p)
    scale = np.abs(y).max() + np.abs(t).max() * abs(b) + 1e-300
    for _ in range(20 * n + 100):
        r = y - (a + b * t)
        on_line = set(np.flatnonzero(np.abs(r) <= 1e-12 * scale).tolist()) | {k, j}
        moved = False
        for z in sorted(on_line):
            j2 = _rotate(t, y, z, p)
            a2, b2 = _pair_line(t, y, z, j2)
            loss = pinball_loss(t, y, a2, b2, p)
            if loss < best - 1e-13 * abs(best):
                k, j, a, b, best = z, j2, a2, b2, loss
                moved = True
                break
        if not moved:
            break
    return LinearQRFit(a, b, (min(k, j), max(k, j)))


#: samples up to this size are solved by enumerating all pair lines
ENUMERATE_MAX = 150


def linear_qr(t, y, p, method="auto", start=None):
    """Exact linear quantile regression of ``y`` on ``t`` at level ``p``.

    ``method="enumerate"`` scores every line through two sample points
    and breaks exact ties by smaller ``|slope|``, then smaller intercept.
    ``method="pivot"`` walks from line to line, each time rotating about a
    point on the current line to the best position; it stops when no
    rotation lowers the loss, which certifies optimality because the loss
    is linear on each cell cut out by the lines through those points.
    ``"auto"`` enumerates small samples. ``start`` is an optional pair of
    indices to begin the walk from.
    """
    t, y = _regression_input(t, y)
    p = check_p(p)
    if method == "auto":
        method = "enumerate" if t.size <= ENUMERATE_MAX else "pivot"
    if method == "enumerate":
        return _enumerate(t, y, p)
    if method == "pivot":
        return _pivot(t, y, p, start)
    raise ValueError(f"unknown method {method!r}")


class QuantileRegressionEstimator(DirectionalQuantileEstimator):
    """Conditional quantiles at covariate ``t0`` by linear quantile regression.

    For each direction the projections are regressed on the covariate and
    the fitted line is evaluated at ``t0``. Only interpolation within the
    observed covariate range is allowed.
    """

    def __init__(self, covariate, t0, method="auto"):
        t = as_sample1(covariate)
        if np.all(t == t[0]):
            raise DegenerateCovariate("all covariate values are equal")
        t0 = float(t0)
        if not t.min() <= t0 <= t.max():
            raise ExtrapolationRefused(
                f"t0 = {t0} outside the covariate range [{t.min()}, {t.max()}]")
        self.covariate = t
        self.t0 = t0
        self.method = method

    def evaluate_levels(self, points, dirs, ps):
        from .quantile import _direction_array

        x = as_sample2(points)
        if x.shape[0] != self.covariate.size:
            raise DataError("covariate and sample differ in length")
        d = _direction_array(dirs)
        ps = [check_p(p) for p in np.atleast_1d(ps)]
        out = np.empty((d.shape[0], len(ps)))
        starts = [None] * len(ps)
        for j, (a, b) in enumerate(d):
            proj = x[:, 0] * a + x[:, 1] * b
            for i, p in enumerate(ps):
                fit = linear_qr(self.covariate, proj, p, self.method, starts[i])
                starts[i] = fit.support
                out[j, i] = fit.intercept + fit.slope * self.t0
        return out


def conditional_envelope(points, covariate, t0, p, A=None, method="auto"):
    """Envelope of the conditional distribution at covariate value ``t0``."""
    x = as_sample2(points)
    p = check_level(p)
    A = resolve_directions(A)
    est = QuantileRegressionEstimator(covariate, t0, method)
    q = est.evaluate_levels(x, A, [p])[:, 0]
    return _make(p, A, q)
