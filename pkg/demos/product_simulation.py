# Furstenberg-Kesten simulation against the series, for ensembles
# whose law is a rotation sandwich.  The ensemble g1 K g2 with Haar K
# has an exponent computable exactly from the singular values of the
# products g2 g1; the simulation estimates the same number from long
# matrix products and should agree to a few standard errors.

import numpy as np

import projlyap as pl

rng = np.random.default_rng(7)


def random_sl(d):
    g = rng.normal(size=(d, d)) + 0.5 * np.eye(d)
    det = np.linalg.det(g)
    return g / abs(det) ** (1.0 / d)


g = random_sl(3)

series = pl.r_uniform(pl.singular_spectrum(g),
                      pl.SeriesParams(tolerance=1e-12, max_order=5000))
sim = pl.fk_simulate(pl.MatrixEnsemble.rotation_averaged(g), 10**5,
                     pl.RngConfig(seed=70), repeats=6, burn_in=1000)

print("single matrix, rotation averaged:")
print(f"  series      {series.value:.8f}")
print(f"  simulation  {sim.mean:.8f} +- {sim.std_error:.1e}")
print(f"  gap         {abs(sim.mean - series.value) / sim.std_error:.2f} se")

# A matrix paired with its inverse gives a compact group closure:
# the exponent vanishes no matter how expanding g is alone.
pair = pl.fk_simulate(pl.MatrixEnsemble.pair(np.linalg.inv(g), g), 10**5,
                      pl.RngConfig(seed=71), repeats=6, burn_in=1000)
print()
print("g^{-1} (Haar) g pair:")
print(f"  simulation  {pair.mean:.2e} +- {pair.std_error:.1e}  (exact value 0)")

# Weighted atoms on both sides: the exponent is the weighted average
# of the one-matrix values over right-times-left products.
g2 = random_sl(3)
mu = [(0.5, g), (0.5, g2)]
prod = pl.lambda_product(mu, mu)
sim2 = pl.fk_simulate(
    pl.MatrixEnsemble(3, left_atoms=mu, haar_middle=True, right_atoms=mu),
    10**5, pl.RngConfig(seed=72), repeats=6, burn_in=1000)
print()
print("two weighted atoms on each side:")
print(f"  series      {prod:.8f}")
print(f"  simulation  {sim2.mean:.8f} +- {sim2.std_error:.1e}")
print(f"  gap         {abs(sim2.mean - prod) / sim2.std_error:.2f} se")
