"""Stationary measures on projective space and their momenta.

For an ensemble with a Haar factor the stationary measure is the
uniform one, so the degree-2 momenta are known exactly.  Dropping the
Haar factor leaves a genuinely non-uniform stationary measure that we
can only reach empirically; the momenta quantify how far it sits from
uniform.
"""

import numpy as np

import projlyap as pl

d = 3
rng = np.random.default_rng(11)
g = rng.normal(size=(d, d)) + 0.4 * np.eye(d)
g /= abs(np.linalg.det(g)) ** (1.0 / d)

uniform = pl.ProjectiveMeasure.uniform(d)
print("uniform degree-2 momenta (exact):")
for c, v in pl.momenta(uniform, 2).items():
    print(f"  {c}: {v:.6f}")

ens = pl.MatrixEnsemble.rotation_averaged(g)
cloud = pl.empirical_stationary(ens, burn_in=2000, n_samples=20000,
                                rng=pl.RngConfig(seed=5))
resid = pl.stationarity_residual(ens, cloud, 2, 20000,
                                 pl.RngConfig(seed=6, stream=1))
print()
print(f"rotation averaged: stationarity residual {resid:.4f} "
      "(uniform is stationary, so momenta match the table)")
for c, v in pl.momenta(cloud, 2).items():
    print(f"  {c}: {v:.6f}")

bare = pl.MatrixEnsemble(d, left_atoms=[(1.0, g)], haar_middle=False)
cloud2 = pl.empirical_stationary(bare, burn_in=2000, n_samples=20000,
                                 rng=pl.RngConfig(seed=7))
resid2 = pl.stationarity_residual(bare, cloud2, 2, 20000,
                                  pl.RngConfig(seed=8, stream=1))
print()
print(f"single matrix, no rotation: residual {resid2:.4f}, "
      "momenta drift toward the dominant direction")
for c, v in pl.momenta(cloud2, 2).items():
    print(f"  {c}: {v:.6f}")
