import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_inside(normals, offsets, points, tol=1e-9):
    """Membership in an intersection of halfplanes, one constraint at a time."""
    pts = np.asarray(points, float).reshape(-1, 2)
    ok = np.ones(len(pts), bool)
    for s, q in zip(np.asarray(normals, float), np.asarray(offsets, float)):
        ok &= pts @ s >= q - tol
    return ok


def brute_depth(points, probe):
    """Depth count by trying every halfplane boundary through the probe.

    The minimum of the closed-halfplane count is attained for a normal
    perpendicular to the direction of some data point from the probe, or
    just to either side of it; checking normals at the critical angles and
    at midpoints between them covers every combinatorial case.
    """
    x = np.asarray(points, float) - np.asarray(probe, float)
    ang = np.arctan2(x[:, 1], x[:, 0])
    crit = np.concatenate([ang + np.pi / 2, ang - np.pi / 2])
    crit = np.sort(np.mod(crit, 2 * np.pi))
    mids = (crit + np.roll(crit, -1) + np.where(np.arange(crit.size) == crit.size - 1, 2 * np.pi, 0)) / 2
    best = len(x)
    for t in np.concatenate([crit, mids]):
        u = np.array([np.cos(t), np.sin(t)])
        best = min(best, int(np.count_nonzero(x @ u >= -1e-12)))
    return best
