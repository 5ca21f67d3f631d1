"""Three routes to the same number.

For g = diag(t, 1/t) the average of log||gx|| over the unit circle has
a closed form, log((t + 1/t)/2).  This script computes it three ways:
the closed form, the moment series, and plain Monte Carlo, and shows
how the series tail bound tracks the true error.
"""

import math

import numpy as np

import projlyap as pl

t = 2.0
g = np.diag([t, 1.0 / t])
exact = math.log((t + 1.0 / t) / 2.0)

res = pl.r_uniform(pl.singular_spectrum(g),
                   pl.SeriesParams(tolerance=1e-12, max_order=20000))
est = pl.mc_r_nu(g, pl.ProjectiveMeasure.uniform(2), 10**6, pl.RngConfig(seed=1))

print(f"g = diag({t}, {1/t})")
print(f"closed form      {exact:.15f}")
print(f"moment series    {res.value:.15f}  ({res.orders_used} orders, "
      f"tail bound {res.tail_bound:.1e})")
print(f"monte carlo      {est.mean:.15f}  (1e6 samples, se {est.std_error:.1e})")
print()
print(f"series error     {abs(res.value - exact):.1e}  "
      f"(bound promised {res.tail_bound:.1e})")
print(f"mc error         {abs(est.mean - exact):.1e}  "
      f"({abs(est.mean - exact) / est.std_error:.2f} standard errors)")

# The series converges geometrically in alpha; watch the order count
# react as the spectrum flattens toward the identity.
print()
print("t      alpha     orders  value")
for ti in (1.1, 1.5, 2.0, 4.0, 8.0):
    gi = np.diag([ti, 1.0 / ti])
    ri = pl.r_uniform(pl.singular_spectrum(gi),
                      pl.SeriesParams(tolerance=1e-12, max_order=20000))
    print(f"{ti:<6} {ri.alpha:<9.4f} {ri.orders_used:<7} {ri.value:.12f}")
