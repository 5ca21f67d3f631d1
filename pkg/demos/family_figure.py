"""Exponent growth with dimension for the diagonal family.

Reproduces the data behind the d-vs-limit figure: lambda_{2d}(t) for
d = 1..4 on a t grid, against the d -> infinity limit curve.  Writes
the CSV that the plotviz package can render and prints a few rows.
"""

import numpy as np

import projlyap as pl

header, rows = pl.figure1_data(pl.figure_grid(1.0, 6.0, steps=200))

out = "family_figure.csv"
with open(out, "w") as fh:
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(f"{x:.12g}" for x in row) + "\n")
print(f"wrote {out} ({len(rows)} rows)")

print()
print("  ".join(f"{h:>10}" for h in header))
for i in (0, 40, 100, 199):
    print("  ".join(f"{x:10.6f}" for x in rows[i]))

# At any fixed t the exponents increase with d and stay below the
# limit; the gap to the limit shrinks like 1/d.
t = 3.0
print()
print(f"gap to the limit at t = {t}:")
limit = pl.lambda_family_limit(t)
for d in range(1, 9):
    lam = pl.lambda_family_t(d, t).value
    print(f"  d = {d}: {limit - lam:.6f}  (d * gap = {d * (limit - lam):.4f})")
