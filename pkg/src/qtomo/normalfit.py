"""Bivariate normal fits and their contours.

A normal contour can be indexed by the mass it encloses, which follows
the Rayleigh law of the standardized radius, or by the mass of its
tangent halfplanes, which matches the univariate quantiles of every
projection. Only the second indexing lines up with directional quantile
envelopes.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidP, SingularCovariance
from .geom import ConvexRegion, RegionKind
from .quantile import as_sample2

DEFAULT_VERTICES = 256
MIN_VERTICES = 16

# covariance is singular when its eigenvalues spread more than this
EIGEN_RATIO = 1e-12

# rational approximation of the normal quantile, refined by one Halley step
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _lower_normal_quantile(p):
    """Quantile for p in (0, 1/2]."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    # for x <= 0 the complementary error function is evaluated at a
    # nonnegative argument, where it keeps full relative accuracy
    e = normal_cdf(x) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def inverse_normal_cdf(p):
    """Standard normal quantile, absolute error well below 1e-9."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidP(f"p must lie in (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return _lower_normal_quantile(p)
    return -_lower_normal_quantile(1.0 - p)


@dataclass(frozen=True)
class IndexingMode:
    """How a contour level is indexed; use the two subclasses."""

    def radius(self):
        raise NotImplementedError


@dataclass(frozen=True)
class EnclosedMass(IndexingMode):
    """Contour enclosing mass ``m`` of the normal model."""

    m: float

    def __post_init__(self):
        if not 0.0 < float(self.m) < 1.0:
            raise InvalidP(f"enclosed mass must lie in (0, 1), got {self.m!r}")

    def radius(self):
        # the standardized radius is Rayleigh: P(R <= r) = 1 - exp(-r^2/2)
        return math.sqrt(-2.0 * math.log1p(-float(self.m)))


@dataclass(frozen=True)
class TangentMass(IndexingMode):
    """Contour whose tangent halfplanes carry mass ``p``."""

    p: float

    def __post_init__(self):
        if not 0.0 < float(self.p) <= 0.5:
            raise InvalidP(f"tangent mass must lie in (0, 0.5], got {self.p!r}")

    def radius(self):
        return inverse_normal_cdf(1.0 - float(self.p))


@dataclass(frozen=True, eq=False)
class NormalFit:
    mean: np.ndarray
    cov: np.ndarray
    chol: np.ndarray

    @classmethod
    def from_params(cls, mean, cov):
        """Model with given parameters; checks symmetry and definiteness."""
        mu = np.array(mean, dtype=float).reshape(2)
        c = np.array(cov, dtype=float).reshape(2, 2)
        if abs(c[0, 1] - c[1, 0]) > 1e-12 * max(1.0, np.abs(c).max()):
            raise ConfigError("covariance must be symmetric")
        c = 0.5 * (c + c.T)
        ev = np.linalg.eigvalsh(c)
        if not np.isfinite(ev).all() or ev[1] <= 0.0 or ev[0] < EIGEN_RATIO * ev[1]:
            raise SingularCovariance(f"covariance eigenvalues {ev[0]:.3g}, {ev[1]:.3g}")
        L = np.linalg.cholesky(c)
        for a in (mu, c, L):
            a.setflags(write=False)
        return cls(mu, c, L)

    def tangent_mass(self, normal, offset):
        """Model mass of ``{x : s.x <= q}`` for unit or non-unit ``s``."""
        s = np.asarray(normal, dtype=float).reshape(2)
        z = (float(offset) - s @ self.mean) / math.sqrt(s @ self.cov @ s)
        return normal_cdf(z)

    def enclosed_mass(self, points):
        """Model mass inside the contour through each point."""
        d = np.asarray(points, float).reshape(-1, 2) - self.mean
        z = np.linalg.solve(self.chol, d.T)
        return -np.expm1(-0.5 * (z * z).sum(axis=0))


def fit_normal(points):
    """Sample mean and unbiased covariance (divisor ``n - 1``)."""
    x = as_sample2(points)
    n = x.shape[0]
    if n < 3:
        raise SingularCovariance(f"need at least 3 points, got {n}")
    mu = x.mean(axis=0)
    d = x - mu
    cov = d.T @ d / (n - 1)
    return NormalFit.from_params(mu, cov)


def normal_contour(fit, mode, n_vertices=DEFAULT_VERTICES):
    """Ellipse ``mean + L (r u)`` over ``n_vertices`` equally spaced ``u``.

    Vertices are counter-clockwise starting from the image of angle 0. A
    radius of zero gives a point at the mean.
    """
    if int(n_vertices) != n_vertices or n_vertices < MIN_VERTICES:
        raise ConfigError(f"need at least {MIN_VERTICES} vertices, got {n_vertices}")
    if not isinstance(mode, IndexingMode):
        raise ConfigError(f"unknown indexing mode {mode!r}")
    r = mode.radius()
    if r == 0.0:
        return ConvexRegion(RegionKind.POINT, fit.mean.reshape(1, 2))
    theta = 2.0 * math.pi * np.arange(int(n_vertices)) / int(n_vertices)
    circle = r * np.column_stack([np.cos(theta), np.sin(theta)])
    return ConvexRegion(RegionKind.POLYGON, fit.mean + circle @ fit.chol.T)
