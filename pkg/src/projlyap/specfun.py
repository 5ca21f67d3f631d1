"""Exact integer and half-integer special-function primitives.

Everything here is arbitrary-precision integer or rational arithmetic;
floats appear only at the boundary (volumes and areas).  The Gamma
function is never evaluated generically: the two families that actually
occur, Gamma(n) = (n-1)! and Gamma(n + 1/2) = (2n-1)!! / 2^n * sqrt(pi),
are closed forms over the double factorial.
"""

import math
from fractions import Fraction

from .errors import InputError

__all__ = [
    "double_factorial",
    "rising_even_product",
    "gamma_half_integer",
    "ball_volume",
    "sphere_area",
]


def double_factorial(n):
    """Return n!! as an exact integer, with 0!! = (-1)!! = 1.

    Defined for integers n >= -1.  Odd n multiply the odd numbers down
    to 1, even n the even numbers down to 2.
    """
    if n < -1:
        raise InputError(f"double factorial undefined for n = {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def rising_even_product(d, r):
    """Return d * (d + 2) * ... * (d + 2r - 2) as an exact integer.

    The empty product (r = 0) is 1.  This is the normalizing constant of
    the order-r moments of the uniform measure on the unit sphere in
    dimension d.
    """
    if d < 1:
        raise InputError(f"dimension must be positive, got {d}")
    if r < 0:
        raise InputError(f"order must be nonnegative, got {r}")
    out = 1
    for j in range(r):
        out *= d + 2 * j
    return out


def gamma_half_integer(n):
    """Return Gamma(n + 1/2) as (rational, power of sqrt(pi)) folded to float.

    Valid for integers n >= 0; Gamma(1/2) = sqrt(pi).
    """
    if n < 0:
        raise InputError(f"need n >= 0, got {n}")
    return (
        float(Fraction(double_factorial(2 * n - 1), 2**n)) * math.sqrt(math.pi)
    )


def ball_volume(d):
    """Volume of the unit ball in R^d, d >= 0.

    Computed from pi^(d/2) / Gamma(1 + d/2) with the Gamma value taken
    from the exact integer or half-integer family, so no generic Gamma
    evaluation is involved.  ball_volume(0) = 1 by convention.
    """
    if d < 0:
        raise InputError(f"dimension must be nonnegative, got {d}")
    if d % 2 == 0:
        m = d // 2
        return math.pi**m / math.factorial(m)
    m = (d - 1) // 2
    # pi^(m + 1/2) / Gamma(m + 3/2) with Gamma(m + 3/2) = (2m+1)!!/2^(m+1) sqrt(pi)
    return math.pi**m * 2 ** (m + 1) / double_factorial(2 * m + 1)


def sphere_area(n):
    """Surface measure of the unit sphere S^n embedded in R^(n+1).

    sphere_area(0) = 2 (two points), sphere_area(1) = 2 pi.  Related to
    the ball by A_n = (n + 1) * V_(n+1).
    """
    if n < 0:
        raise InputError(f"sphere dimension must be nonnegative, got {n}")
    return (n + 1) * ball_volume(n + 1)
