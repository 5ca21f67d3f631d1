# Numerical probe of the rotation-averaging inequality: averaging the
# log-norm functional over a Haar rotation inserted inside the matrix
# should not beat the plain functional.  The margin (sampled left side
# minus series right side) is reported per matrix; a margin several
# standard errors below zero would be a counterexample candidate.

import numpy as np

import projlyap as pl

rng = np.random.default_rng(3)

print("dim  margin        se         margin/se")
negatives = 0
for d in (3, 4):
    for i in range(8):
        g = rng.normal(size=(d, d)) + 0.5 * np.eye(d)
        g /= abs(np.linalg.det(g)) ** (1.0 / d)
        probe = pl.conjecture_probe(g, 10**4, pl.RngConfig(seed=100 * d + i))
        z = probe.margin / probe.lhs.std_error
        flag = "  <-- negative" if probe.margin < 0 else ""
        print(f"{d}    {probe.margin:+.6f}   {probe.lhs.std_error:.1e}   "
              f"{z:+7.2f}{flag}")
        if probe.margin < -3 * probe.lhs.std_error:
            negatives += 1

print()
if negatives:
    print(f"{negatives} probes sit more than 3 se below zero; "
          "worth rerunning at higher sample counts")
else:
    print("no probe sits more than 3 se below zero")
