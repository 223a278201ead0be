"""Envelopes below the data resolution with a tail model.

An empirical envelope at p below 1/n is just the convex hull, which
describes the sample rather than the distribution. Fitting a generalized
Pareto law to the lower tail of every projection gives a model-based
envelope at such levels instead.

Run ``python demos/extreme_tails.py [outdir]``; writes extreme_tails.png.
"""
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qtomo import (build_envelopes, convex_hull, extreme_estimator,
                   fit_gpd_tail, gpd_quantile)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demos/out")
out.mkdir(parents=True, exist_ok=True)

# %% one dimension first: the 0.999 quantile of unit exponentials
x = np.random.default_rng(0).exponential(size=10_000)
m = fit_gpd_tail(-x, 0.1)
print(f"shape {m.xi:+.3f}, scale {m.sigma:.3f}, threshold {m.u:.3f}")
print(f"0.999 quantile: tail model {gpd_quantile(m, 1e-3):.3f}, "
      f"empirical {np.quantile(x, 0.999):.3f}, exact {-math.log(1e-3):.3f}")

# %% two dimensions
y = np.random.default_rng(1).standard_t(4, (5000, 2))
levels = [1e-4, 1e-3, 1e-2, 0.1]
ext = build_envelopes(y, levels, 360, extreme_estimator(0.1))
emp = build_envelopes(y, levels, 360)
hull = convex_hull(y)

fig, ax = plt.subplots(figsize=(7, 7))
ax.scatter(*y.T, s=1, c="0.7")
h = np.vstack([hull.vertices, hull.vertices[:1]])
ax.plot(*h.T, c="k", lw=0.8, label="convex hull")
for a, b in zip(ext, emp):
    print(f"p={a.p:<7} area: tail model {a.region.area():8.2f}, empirical {b.region.area():8.2f}")
    v = np.vstack([a.region.vertices, a.region.vertices[:1]])
    ax.plot(*v.T, lw=1.2, label=f"p={a.p:g}")
ax.set_aspect("equal")
ax.legend(loc="upper right")
fig.savefig(out / "extreme_tails.png", dpi=120)
