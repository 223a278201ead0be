"""Exact depth regions, the deepest point, and quantile biplots.

Run ``python demos/depth_and_biplot.py [outdir]``; writes depth_regions.png
and biplots.png.
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qtomo import (biplot_curve, build_envelopes, critical_directions,
                   depth_regions_oracle, halfspace_depth, hausdorff_distance,
                   polyline_self_intersects, tukey_median)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demos/out")
out.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(8)
x = rng.standard_normal((25, 2)) * [2.0, 1.0]
n = len(x)

# %% with the critical directions the envelopes are the depth regions;
# compare against a construction that never looks at quantiles
A = critical_directions(x)
ks = range(1, n // 2 + 1)
envs = build_envelopes(x, [k / n for k in ks], A)
oracle = depth_regions_oracle(x, [k / n for k in ks])
for k, e, o in zip(ks, envs, oracle):
    if e.region.is_empty:
        print(f"depth {k:2d}: empty")
        break
    print(f"depth {k:2d}: {e.region.kind.value:8s} distance to brute force "
          f"{hausdorff_distance(e.region, o):.1e}")

p, med = tukey_median(x)
c = med.centroid()
print(f"deepest level {p:.3f}, median {c.round(3)}, depth there {halfspace_depth(x, c).count}/{n}")

fig, ax = plt.subplots(figsize=(7, 5))
ax.plot(*x.T, "k.")
for e in envs:
    if not e.region.is_empty:
        v = np.vstack([e.region.vertices, e.region.vertices[:1]])
        ax.plot(*v.T, lw=1)
ax.plot(*c, "r*", ms=12)
ax.set_aspect("equal")
fig.savefig(out / "depth_regions.png", dpi=120)

# %% biplots: origin inside the deep region gives a simple closed curve,
# an origin far away does not
y = rng.standard_t(4, (2000, 2))
fig, axes = plt.subplots(1, 2, figsize=(10, 5))
for ax, origin in zip(axes, ["tukey", (6.0, 0.0)]):
    curve = biplot_curve(y, 0.1, origin, 360)
    loop = np.vstack([curve, curve[:1]])
    ax.scatter(*y.T, s=1, c="0.7")
    ax.plot(*loop.T, c="tab:green")
    ax.set_title(f"origin {origin}: self-intersects = {polyline_self_intersects(curve, closed=True)}")
    ax.set_aspect("equal")
fig.savefig(out / "biplots.png", dpi=120)
