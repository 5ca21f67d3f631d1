"""Compositions of integers and moment coefficients on the sphere.

A composition of r into d parts is a tuple (r_1, ..., r_d) of
nonnegative integers summing to r.  All enumeration in the package uses
colexicographic order: the last part varies slowest, the first part
fastest, so for r = 2, d = 2 the order is (2,0), (1,1), (0,2).

The moment coefficients are exact rationals built on two facts: the
integral of the monomial prod x_i^(2 r_i) over the uniform measure on
the unit sphere S^(d-1) equals prod (2 r_i - 1)!! divided by
d (d+2) ... (d+2r-2), and the coefficient attached to a composition is
that integral times the multinomial coefficient r! / prod r_i!.
"""

import math
from fractions import Fraction

import numpy as np

from .errors import InputError, UnsupportedMeasure
from .specfun import double_factorial, rising_even_product

__all__ = [
    "compositions",
    "composition_count",
    "composition_array",
    "multinomial",
    "monomial_integral",
    "theta_uniform",
    "theta_measure",
]

# Hard ceiling on the rows of a materialized composition array; beyond
# this the caller should switch to a streaming or recurrence scheme.
_MAX_ARRAY_ROWS = 200_000_000


def compositions(r, d):
    """Yield all compositions of r into d parts in colexicographic order."""
    if r < 0 or d < 1:
        raise InputError(f"need r >= 0 and d >= 1, got r = {r}, d = {d}")
    if d == 1:
        yield (r,)
        return
    for last in range(r + 1):
        for head in compositions(r - last, d - 1):
            yield head + (last,)


def composition_count(r, d):
    """Number of compositions of r into d parts: C(r + d - 1, d - 1)."""
    if r < 0 or d < 1:
        raise InputError(f"need r >= 0 and d >= 1, got r = {r}, d = {d}")
    return math.comb(r + d - 1, d - 1)


def composition_array(r, d, dtype=np.int64):
    """All compositions of r into d parts as an array, colex row order.

    Row k is the k-th composition in the order produced by
    compositions(r, d).
    """
    n = composition_count(r, d)
    if n > _MAX_ARRAY_ROWS:
        raise InputError(
            f"composition array for r = {r}, d = {d} would hold {n} rows"
        )
    if d == 1:
        return np.array([[r]], dtype=dtype)
    if d == 2:
        first = np.arange(r, -1, -1, dtype=dtype)
        return np.column_stack([first, r - first])
    # Stack over the last part: rows with r_d = j are the compositions of
    # r - j into d - 1 parts, already in colex order.
    blocks = []
    for j in range(r + 1):
        head = composition_array(r - j, d - 1, dtype=dtype)
        tail = np.full((head.shape[0], 1), j, dtype=dtype)
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)


def multinomial(c):
    """Exact multinomial coefficient (sum c)! / prod c_i!."""
    r = 0
    out = 1
    for ci in c:
        if ci < 0:
            raise InputError(f"negative part in composition {tuple(c)}")
        r += ci
        out *= math.comb(r, ci)
    return out


def _validate_composition(d, c):
    c = tuple(int(x) for x in c)
    if len(c) != d:
        raise InputError(f"composition {c} does not have {d} parts")
    if any(x < 0 for x in c):
        raise InputError(f"negative part in composition {c}")
    return c


def monomial_integral(d, c):
    """Integral of prod x_i^(2 c_i) over the uniform measure on S^(d-1).

    Exact rational: prod (2 c_i - 1)!! / (d (d+2) ... (d+2r-2)) where
    r = sum c_i.  For example d = 3, c = (1, 1, 0) gives 1/15.
    """
    if d < 1:
        raise InputError(f"dimension must be positive, got {d}")
    c = _validate_composition(d, c)
    r = sum(c)
    num = 1
    for ci in c:
        num *= double_factorial(2 * ci - 1)
    return Fraction(num, rising_even_product(d, r))


def theta_uniform(d, c):
    """Moment coefficient of the uniform measure for composition c.

    Exact rational, multinomial(c) * monomial_integral(d, c).  Over all
    compositions of fixed order r the coefficients sum to 1, and the
    value is invariant under permuting the parts of c.
    """
    c = _validate_composition(d, c)
    return multinomial(c) * monomial_integral(d, c)


def theta_measure(d, c, rotation, nu):
    """Moment coefficient of the measure nu viewed through a rotation.

    Returns multinomial(c) times the nu-average of
    prod (rotation @ x)_i^(2 c_i), as a float.  For the uniform measure
    this reduces to theta_uniform regardless of the rotation.  Finitely
    supported measures (atomic or empirical) are averaged directly over
    their support.
    """
    c = _validate_composition(d, c)
    kind = getattr(nu, "kind", None)
    if kind == "uniform":
        return float(theta_uniform(d, c))
    if kind not in ("atomic", "empirical"):
        raise UnsupportedMeasure(f"cannot integrate measure of kind {kind!r}")
    points = np.asarray(nu.points, dtype=float)
    weights = np.asarray(nu.weights, dtype=float)
    if points.shape[1] != d:
        raise InputError(
            f"measure lives in dimension {points.shape[1]}, expected {d}"
        )
    if rotation is None:
        y = points
    else:
        rotation = np.asarray(rotation, dtype=float)
        y = points @ rotation.T
    u = y**2
    prods = np.ones(len(points))
    for i, ci in enumerate(c):
        if ci:
            prods = prods * u[:, i] ** ci
    return float(multinomial(c)) * float(weights @ prods)
