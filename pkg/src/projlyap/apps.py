"""Closed-form families and composite Lyapunov applications.

The block-diagonal family g_t = diag(t, ..., t, 1/t, ..., 1/t) in
dimension 2d, averaged over rotations, has top Lyapunov exponent

    lambda_2d(t) = log t - sum_{r >= 1} (1/2r) * rho_r * x^r,
    rho_r = prod_{j=0}^{r-1} (d + 2j) / (2d + 2j),   x = 1 - t^-4.

The ratio factors rho_r decrease with r, which yields the tail majorant
rho_(R+1) x^(R+1) / (2 (R+1) (1 - x)) used for truncation; they also
decrease toward 2^-r as d grows, giving the monotone-in-d limit
g(t) = log t + (1/2) log((1 + t^4) / (2 t^4)).  For d = 1 the series
sums in closed form to log((t + 1/t) / 2), which pins the orientation
of the ratio (the same value falls out of the general singular-value
series for diag(t, 1/t), an independent computation).

Also here: the product formula for ensembles mu_1 * haar * mu_2, whose
exponent is the doubly weighted sum of average log-norms of the pair
products, and the CSV table behind the family figure.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, series
from .errors import BudgetExceeded, InputError

__all__ = [
    "FamilyPoint",
    "lambda_family_t",
    "lambda_family_limit",
    "lambda_product",
    "figure1_data",
    "figure_grid",
    "write_figure_csv",
]

_BLOCK = 8192


@dataclass(frozen=True)
class FamilyPoint:
    """One evaluated point of the rotation-averaged family.

    value is the top Lyapunov exponent at parameter t and half-dimension
    half_dim; tail_bound caps the truncation error of the series.
    """

    t: float
    half_dim: int
    value: float
    tail_bound: float


def lambda_family_t(half_dim, t, tolerance=1e-12, max_order=10_000_000):
    """Top Lyapunov exponent of the family at parameter t, half-dim d.

    Sums the ratio series blockwise with multiplicative factor updates
    until the tail majorant drops below tolerance.  t = 1 short-circuits
    to 0.  The series converges for every t >= 1; max_order only guards
    against pathological parameters (x extremely close to 1), raising
    BudgetExceeded when hit.
    """
    d = int(half_dim)
    if d < 1:
        raise InputError(f"half-dimension must be positive, got {half_dim}")
    t = float(t)
    if not (t >= 1.0):
        raise InputError(f"parameter must satisfy t >= 1, got {t}")
    if t == 1.0:
        return FamilyPoint(t, d, 0.0, 0.0)
    x = 1.0 - t**-4
    block_sums = []
    ratio_carry = 1.0
    xpow_carry = 1.0
    summed = 0
    while True:
        count = min(_BLOCK, max_order - summed)
        if count <= 0:
            raise BudgetExceeded(
                f"family series at t = {t} still above tolerance "
                f"after {max_order} orders"
            )
        r = summed + np.arange(1, count + 1, dtype=float)
        factors = (d + 2.0 * (r - 1.0)) / (2.0 * d + 2.0 * (r - 1.0))
        ratios = ratio_carry * np.cumprod(factors)
        xpows = xpow_carry * np.cumprod(np.full(count, x))
        terms = ratios * xpows / (2.0 * r)
        block_sums.append(math.fsum(terms.tolist()))
        ratio_carry = float(ratios[-1])
        xpow_carry = float(xpows[-1])
        summed += count
        next_ratio = ratio_carry * (d + 2.0 * summed) / (2.0 * d + 2.0 * summed)
        tail = next_ratio * xpow_carry * x / (2.0 * (summed + 1) * (1.0 - x))
        if tail <= tolerance:
            break
    value = math.log(t) - math.fsum(block_sums)
    return FamilyPoint(t, d, value, tail)


def lambda_family_limit(t):
    """Large-dimension limit of the family exponents.

    Closed form log t + (1/2) log((1 + t^4) / (2 t^4)), evaluated
    through log1p for accuracy at large t.
    """
    t = float(t)
    if not (t >= 1.0):
        raise InputError(f"parameter must satisfy t >= 1, got {t}")
    return math.log(t) + 0.5 * (math.log1p(t**-4) - math.log(2.0))


def _check_weighted_matrices(mu, what):
    if not mu:
        raise InputError(f"{what}: empty support")
    weights = np.asarray([w for w, _ in mu], dtype=float)
    if np.any(weights <= 0.0):
        raise InputError(f"{what}: weights must be positive")
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-12:
        raise InputError(f"{what}: weights sum to {total!r}, not 1")
    mats = [linalg.as_square_matrix(g) for _, g in mu]
    dims = {g.shape[0] for g in mats}
    if len(dims) != 1:
        raise InputError(f"{what}: mixed dimensions {sorted(dims)}")
    return weights / total, mats


def lambda_product(mu1, mu2, params=None):
    """Lyapunov exponent of mu_1 * haar * mu_2 by the product formula.

    mu1 and mu2 are weighted matrix lists [(w, g), ...] with matching
    dimensions.  The exponent is sum_ij w_i w_j avg log||g2_j g1_i x||
    with each term evaluated by the uniform series: the repeated block
    in the matrix product (g1 k g2)(g1 k g2)... is k (g2 g1), so the
    right factor multiplies the left one.  A term whose series fails to
    converge raises BudgetExceeded naming the pair.
    """
    w1, mats1 = _check_weighted_matrices(mu1, "left measure")
    w2, mats2 = _check_weighted_matrices(mu2, "right measure")
    if mats1[0].shape != mats2[0].shape:
        raise InputError(
            f"dimension mismatch: left is {mats1[0].shape[0]}, "
            f"right is {mats2[0].shape[0]}"
        )
    if params is None:
        # Products of the atoms can have much wider spectra than the
        # atoms themselves, so the per-term order budget is generous.
        params = series.SeriesParams(tolerance=1e-12, max_order=200_000)
    terms = []
    for i, g1 in enumerate(mats1):
        for j, g2 in enumerate(mats2):
            result = series.r_uniform(linalg.singular_spectrum(g2 @ g1), params)
            if not result.converged:
                raise BudgetExceeded(
                    f"series for product term (left {i}, right {j}) stopped "
                    f"at tail bound {result.tail_bound:.3e}",
                    result=result,
                )
            terms.append(w1[i] * w2[j] * result.value)
    return math.fsum(terms)


def figure_grid(t_min=1.0, t_max=6.0, steps=200):
    """Uniform parameter grid for the family figure."""
    if steps < 1:
        raise InputError(f"need at least one grid point, got {steps}")
    if not (1.0 <= t_min <= t_max):
        raise InputError(
            f"need 1 <= t_min <= t_max, got t_min = {t_min}, t_max = {t_max}"
        )
    if steps == 1:
        return np.array([t_min])
    return np.linspace(t_min, t_max, steps)


def figure1_data(t_grid, half_dims=(1, 2, 3, 4), tolerance=1e-12):
    """Family exponents on a grid: header plus one row per parameter.

    Returns (header, rows) where header is
    ["t", "lambda_d1", ..., "limit"] for the requested half-dimensions
    and rows[i] = (t, values..., limit) in grid order.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise InputError("t grid must be a nonempty 1-d array")
    if np.any(np.diff(t_grid) < 0.0):
        raise InputError("t grid must be ascending")
    if np.any(t_grid < 1.0):
        raise InputError("t grid must stay in t >= 1")
    half_dims = tuple(int(d) for d in half_dims)
    header = ["t"] + [f"lambda_d{d}" for d in half_dims] + ["limit"]
    rows = np.empty((len(t_grid), len(half_dims) + 2))
    for i, t in enumerate(t_grid):
        rows[i, 0] = t
        for j, d in enumerate(half_dims):
            rows[i, 1 + j] = lambda_family_t(d, t, tolerance=tolerance).value
        rows[i, -1] = lambda_family_limit(t)
    return header, rows


def write_figure_csv(path, header, rows):
    """Write the figure table as CSV with 12 significant digits."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.12g}" for x in row) + "\n")
