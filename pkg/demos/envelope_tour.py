"""Envelopes of a heavy-tailed sample next to a fitted normal.

Run ``python demos/envelope_tour.py [outdir]``; writes envelope_tour.png.
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qtomo import (TangentMass, build_envelopes, fit_normal, hausdorff_distance,
                   kappa, normal_contour)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demos/out")
out.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(3)
# t with 3 degrees of freedom, sheared so the axes are not special
x = rng.standard_t(3, (20_000, 2)) @ np.array([[1.0, 0.0], [0.6, 0.5]]).T

# %% a geometric ladder of levels, each halving the one above
levels = [0.00625, 0.0125, 0.025, 0.05, 0.1, 0.2, 0.4]
envs = build_envelopes(x, levels, 1009)
fit = fit_normal(x)

for e in envs:
    print(f"p={e.p:<8} vertices={len(e.region):4d}  area={e.region.area():8.3f}  "
          f"kappa={kappa(e.region):.3f}")

# %% the normal model with the same tangent indexing; the heavy tails show
# up as envelopes reaching further out than the ellipses at small p
fig, ax = plt.subplots(figsize=(7, 7))
ax.scatter(*x.T, s=1, c="0.75", rasterized=True)
for e in envs:
    v = np.vstack([e.region.vertices, e.region.vertices[:1]])
    ax.plot(*v.T, lw=1.2, c="tab:blue")
    c = normal_contour(fit, TangentMass(e.p))
    if len(c) > 1:
        w = np.vstack([c.vertices, c.vertices[:1]])
        ax.plot(*w.T, lw=0.8, ls="--", c="tab:red")
    print(f"p={e.p:<8} distance to normal contour {hausdorff_distance(e.region, c):.3f}")
ax.set_xlim(-12, 12)
ax.set_ylim(-10, 10)
ax.set_aspect("equal")
ax.set_title("empirical envelopes (solid) and normal tangent contours (dashed)")
fig.savefig(out / "envelope_tour.png", dpi=120)

# %% how many directions are enough
ref = envs[4].region
for m in (25, 50, 100, 200, 400):
    r = build_envelopes(x, [0.1], m)[0].region
    print(f"{m:4d} directions: distance to 1009-direction envelope "
          f"{hausdorff_distance(r, ref) / ref.diameter():.2%} of its diameter")
