import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtomo.envelope import build_envelope, uniform_directions
from qtomo.errors import (DegenerateCovariate, DegenerateTail,
                          ExtrapolationRefused, OutOfRegime,
                          TooFewExceedances)
from qtomo.estimators import (EmpiricalEstimator, ExtremeEstimator,
                              QuantileRegressionEstimator, TailModel,
                              _pwm_fit, conditional_envelope,
                              empirical_estimator, extreme_estimator,
                              fit_gpd_tail, gpd_quantile, linear_qr,
                              pinball_loss, tail_lower_quantile)
from qtomo.geom import UnitDirection, hausdorff_distance
from qtomo.quantile import directional_quantiles


def pair_line_losses(t, y, p):
    """Loss of every line through two points with distinct covariates."""
    out = []
    n = len(t)
    for i in range(n):
        for j in range(i + 1, n):
            if t[i] != t[j]:
                b = (y[j] - y[i]) / (t[j] - t[i])
                a = y[i] - b * t[i]
                out.append(sum((yy - a - b * tt) * (p - (yy - a - b * tt < 0)) for tt, yy in zip(t, y)) / n)
    return np.array(out)


# ------------------------------------------------------------ empirical


def test_empirical_delegates(rng):
    pts = rng.standard_normal((77, 2))
    A = uniform_directions(30)
    est = empirical_estimator()
    np.testing.assert_array_equal(est.evaluate(pts, A, 0.2),
                                  directional_quantiles(pts, A, [0.2])[:, 0])
    s = UnitDirection.from_angle(0.7)
    assert isinstance(est.evaluate(pts, s, 0.2), float)


ESTIMATORS = [
    lambda t: EmpiricalEstimator("inftype1"),
    lambda t: EmpiricalEstimator("r7"),
    lambda t: ExtremeEstimator(0.1),
    lambda t: QuantileRegressionEstimator(t, 0.3),
]


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.integers(0, len(ESTIMATORS) - 1))
def test_equivariance(seed, which):
    rng = np.random.default_rng(seed)
    # the tail fit needs 20 exceedances at threshold fraction 0.1
    n = int(rng.integers(250, 400))
    pts = rng.standard_t(4, (n, 2))
    t = rng.uniform(0, 1, n)
    est = ESTIMATORS[which](t)
    A = uniform_directions(24)
    ps = [0.001, 0.05, 0.3] if which == 2 else [0.05, 0.3]
    base = est.evaluate_levels(pts, A, ps)
    b = rng.uniform(-50, 50, 2)
    c = rng.uniform(0.1, 10)
    shifted = est.evaluate_levels(pts + b, A, ps)
    scaled = est.evaluate_levels(c * pts, A, ps)
    scale = 1 + np.abs(base).max() + np.abs(b).max()
    np.testing.assert_allclose(shifted, base + (A.vectors @ b)[:, None], atol=1e-9 * scale)
    np.testing.assert_allclose(scaled, c * base, atol=1e-9 * c * scale)


# ----------------------------------------------------------------- tails


def test_pwm_hand_computed():
    # e = 1..4: plotting positions (i - 0.35)/4, m0 = 2.5, m1 = 0.84375,
    # sigma = 2 m0 m1 / (m0 - 2 m1) = 4.21875 / 0.8125, xi = 2 - 2.5 / 0.8125
    xi, sigma = _pwm_fit(np.array([4.0, 2.0, 1.0, 3.0]))
    assert sigma == pytest.approx(5.1923076923076925, rel=1e-14)
    assert xi == pytest.approx(-1.0769230769230769, rel=1e-14)


def test_degenerate_tail():
    # the lowest 30 values coincide, so every excess equals 5
    x = np.concatenate([np.full(30, -5.0), np.linspace(0.0, 1.0, 70)])
    with pytest.raises(DegenerateTail):
        fit_gpd_tail(x, 0.3)


def test_too_few():
    with pytest.raises(TooFewExceedances):
        fit_gpd_tail(np.arange(40.0), 0.5)
    with pytest.raises(TooFewExceedances):
        fit_gpd_tail(np.arange(100.0), 0.1)


def test_exponential_shape_near_zero():
    x = np.random.default_rng(1).exponential(size=10_000)
    m = fit_gpd_tail(-x, 0.1)
    assert abs(m.xi) < 0.1
    assert m.zeta_u == pytest.approx(0.1, abs=1e-3)


def test_uniform_shape_near_minus_one():
    x = np.random.default_rng(2).uniform(size=10_000)
    m = fit_gpd_tail(-x, 0.1)
    assert abs(m.xi + 1) < 0.2


def test_exponential_extreme_quantile():
    x = np.random.default_rng(3).exponential(size=10_000)
    m = fit_gpd_tail(-x, 0.1)
    assert gpd_quantile(m, 0.001) == pytest.approx(-math.log(0.001), rel=0.1)
    assert tail_lower_quantile(m, 0.001) == -gpd_quantile(m, 0.001)


def test_gpd_quantile_boundary_and_regime():
    m = TailModel(0.1, 0.2, 1.5, 3.0, 0.1, 100)
    assert gpd_quantile(m, 0.1) == 3.0
    with pytest.raises(OutOfRegime):
        gpd_quantile(m, 0.2)


@given(st.floats(-0.9, 0.9), st.floats(1e-7, 0.099), st.floats(1e-7, 0.099))
def test_gpd_quantile_monotone(xi, p1, p2):
    m = TailModel(0.1, xi, 2.0, 1.0, 0.1, 100)
    lo, hi = sorted([p1, p2])
    assert gpd_quantile(m, lo) >= gpd_quantile(m, hi)


@given(st.floats(1e-6, 0.099))
def test_gpd_quantile_continuous_at_zero_shape(p):
    q0 = gpd_quantile(TailModel(0.1, 0.0, 2.0, 1.0, 0.1, 100), p)
    for xi in (1e-9, -1e-9, 2e-8, -2e-8):
        q = gpd_quantile(TailModel(0.1, xi, 2.0, 1.0, 0.1, 100), p)
        assert abs(q - q0) <= 1e-6 * abs(q0)


def test_extreme_matches_empirical_in_data_range(rng):
    pts = rng.standard_t(3, (2000, 2))
    A = uniform_directions(50)
    ext = extreme_estimator(0.1).evaluate_levels(pts, A, [0.1, 0.2, 0.5])
    emp = directional_quantiles(pts, A, [0.1, 0.2, 0.5])
    np.testing.assert_array_equal(ext, emp)


def test_extreme_extrapolates_beyond_data(rng):
    # even the true 1e-4 quantile lies below the minimum of 300 points only
    # with probability (1 - 1e-4)^300, about 0.97, per direction
    below = 0
    for seed in range(20):
        pts = np.random.default_rng(seed).standard_t(3, (300, 2))
        A = uniform_directions(40)
        q = extreme_estimator(0.1).evaluate(pts, A, 1e-4)
        below += np.count_nonzero(q < (pts @ A.vectors.T).min(axis=0))
    assert below >= 0.9 * 20 * 40


def test_empirical_at_tiny_level_is_minimum(rng):
    pts = rng.standard_normal((4291, 2))
    A = uniform_directions(20)
    q = EmpiricalEstimator().evaluate(pts, A, 1 / 4291)
    proj = pts[:, :1] * A.vectors[:, 0] + pts[:, 1:] * A.vectors[:, 1]
    np.testing.assert_array_equal(q, proj.min(axis=0))


def test_per_direction_threshold(rng):
    pts = rng.standard_normal((3000, 2))
    A = uniform_directions(8)
    plain = ExtremeEstimator(0.1)
    custom = ExtremeEstimator(0.1, {3: 0.05})
    a = plain.evaluate(pts, A, 0.001)
    b = custom.evaluate(pts, A, 0.001)
    assert np.array_equal(np.delete(a, 3), np.delete(b, 3))
    assert a[3] != b[3]
    assert custom.tail_models(pts, A)[3].threshold_fraction == 0.05


# ------------------------------------------------------------ regression


def test_two_points():
    f = linear_qr([0.0, 2.0], [1.0, 5.0], 0.3)
    assert (f.intercept, f.slope) == (1.0, 2.0)
    assert pinball_loss([0, 2], [1, 5], f.intercept, f.slope, 0.3) == 0.0


def test_collinear():
    f = linear_qr([0.0, 1.0, 2.0], [1.0, 3.0, 5.0], 0.5)
    assert (f.intercept, f.slope) == (1.0, 2.0)


def test_outlier_example():
    f = linear_qr([0.0, 1.0, 2.0, 1.0], [0.0, 1.0, 2.0, 100.0], 0.5)
    assert f.slope == pytest.approx(1.0) and f.intercept == pytest.approx(0.0)
    assert f(3.0) == pytest.approx(3.0)


def test_degenerate_covariate():
    with pytest.raises(DegenerateCovariate):
        linear_qr([1.0, 1.0, 1.0], [0.0, 1.0, 2.0], 0.5)


@given(st.integers(0, 10**6), st.integers(2, 30), st.floats(0.02, 0.98))
def test_enumeration_certificate(seed, n, p):
    rng = np.random.default_rng(seed)
    t = rng.integers(0, 6, n).astype(float) if seed % 2 else rng.normal(size=n)
    if np.all(t == t[0]):
        t[0] += 1.0
    y = rng.normal(size=n)
    f = linear_qr(t, y, p, method="enumerate")
    loss = pinball_loss(t, y, f.intercept, f.slope, p)
    assert loss <= pair_line_losses(t, y, p).min() + 1e-12


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.integers(3, 120), st.floats(0.02, 0.98))
def test_pivot_matches_enumeration(seed, n, p):
    rng = np.random.default_rng(seed)
    t = rng.normal(size=n)
    y = 2 * t + rng.standard_t(2, n)
    if seed % 3 == 0:
        t = np.round(t)
    if np.all(t == t[0]):
        t[0] += 1.0
    a = linear_qr(t, y, p, method="enumerate")
    b = linear_qr(t, y, p, method="pivot")
    la = pinball_loss(t, y, a.intercept, a.slope, p)
    lb = pinball_loss(t, y, b.intercept, b.slope, p)
    assert lb == pytest.approx(la, rel=1e-12, abs=1e-14)


def test_regression_refuses_extrapolation(rng):
    t = rng.uniform(0, 1, 50)
    with pytest.raises(ExtrapolationRefused):
        QuantileRegressionEstimator(t, 1.5)
    with pytest.raises(DegenerateCovariate):
        QuantileRegressionEstimator(np.ones(10), 1.0)


def test_linear_shift_is_recovered(rng):
    # X(t) = X0 + t v with the same X0 at every covariate value
    x0 = rng.standard_normal((20, 2))
    v = np.array([1.5, -0.5])
    ts = np.linspace(0.0, 2.0, 5)
    pts = np.vstack([x0 + t * v for t in ts])
    cov = np.repeat(ts, len(x0))
    A = uniform_directions(60)
    # 0.23 * 20 is not an integer, so each group has a unique quantile and
    # the shifted quantile line is the only optimal fit
    e = conditional_envelope(pts, cov, 1.3, 0.23, A)
    want = build_envelope(x0 + 1.3 * v, 0.23, A)
    assert hausdorff_distance(e.region, want.region) <= 1e-6


def test_independent_covariate_matches_unconditional():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((2000, 2))
    t = rng.uniform(0, 1, 2000)
    A = uniform_directions(60)
    e = conditional_envelope(x, t, 0.5, 0.1, A)
    u = build_envelope(x, 0.1, A)
    assert hausdorff_distance(e.region, u.region) < 0.05 * u.region.diameter()
