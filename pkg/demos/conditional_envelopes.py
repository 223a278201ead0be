"""Envelopes of a distribution that drifts with a covariate.

Each directional quantile is modelled as linear in the covariate, so one
fit per direction gives the envelope at any covariate value inside the
observed range.

Run ``python demos/conditional_envelopes.py [outdir]``; writes
conditional_envelopes.png.
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qtomo import conditional_envelope, uniform_directions

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demos/out")
out.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(4)
n = 3000
t = rng.uniform(0.0, 1.0, n)
# location moves right and the spread grows with t
x = rng.standard_normal((n, 2)) * (0.5 + t)[:, None] + np.column_stack([4 * t, np.zeros(n)])

A = uniform_directions(120)
fig, ax = plt.subplots(figsize=(9, 5))
sc = ax.scatter(*x.T, s=2, c=t, cmap="viridis")
for t0 in (0.1, 0.5, 0.9):
    e = conditional_envelope(x, t, t0, 0.1, A)
    v = np.vstack([e.region.vertices, e.region.vertices[:1]])
    ax.plot(*v.T, c=plt.cm.viridis(t0), lw=2)
    print(f"t={t0}: centroid {e.region.centroid().round(2)}, area {e.region.area():.2f}")
fig.colorbar(sc, label="covariate")
ax.set_aspect("equal")
fig.savefig(out / "conditional_envelopes.png", dpi=120)
