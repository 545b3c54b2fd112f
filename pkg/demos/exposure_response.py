"""
Reading an exposure-response surface
====================================

With h known in closed form (Friedman), the univariate curves and the
bivariate surface from the posterior can be set against the truth.
"""

import numpy as np

from fastbkmr.posterior import bivariate_surface, univariate_response
from fastbkmr.sampler import run_chain
from fastbkmr.simulation import SimulationSpec, friedman_h, generate_dataset

train, _ = generate_dataset(SimulationSpec(n=400, M=5, h_source="friedman", seed=5))
samples = run_chain(train, 40, 1000, seed=2)

# x4 enters linearly with slope 2, so its curve should be roughly a line
curve = univariate_response(samples, train.X, 3, grid_size=8, window=20)
profile = np.median(train.X, axis=0)
for x, e in zip(curve.grid, curve.estimates):
    xt = profile.copy()
    xt[3] = x
    x0 = profile.copy()
    x0[3] = curve.grid[0]
    truth = friedman_h(xt[None])[0] - friedman_h(x0[None])[0]
    print(f"x4={x:+.2f}  est {e.point:+.3f}  ({e.lower:+.3f}, {e.upper:+.3f})  truth {truth:+.3f}")

# x1 and x2 interact through sin(pi x1 x2)
surf = bivariate_surface(samples, train.X, 0, 1, grid_size=5)
print("\nposterior mean contrast over the (x1, x2) grid, reference at the corner")
print(np.round(surf.point, 2))
