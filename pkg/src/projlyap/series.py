"""Convergent series for the average of log||g x|| over projective space.

For an invertible g with singular values lambda_1 <= ... <= lambda_d,
an aligning rotation k, and a normalization scale ls chosen so that
every beta_i = 1 - lambda_i^2 / ls^2 satisfies |beta_i| < 1,

    avg log||g x||  =  log ls - sum_{r >= 1} (1/2r) * S_r,
    S_r = sum_{|c| = r} Theta_c(k, nu) * prod_i beta_i^{c_i},

where the sum runs over compositions c of r into d parts and Theta_c
are the order-r moment coefficients of the measure nu.  The series is
geometric with ratio alpha = max |beta_i|, and the truncation error
after order R is at most alpha^(R+1) / (2 (R+1) (1 - alpha)).

Two evaluation methods compute the same inner sums S_r:

* "enumerate" walks every composition, multiplying coefficient factors
  from precomputed per-part tables (kept scaled so no intermediate can
  overflow) and adding terms with exactly rounded summation;
* "recurrence" uses the closed recursion of the Gaussian-moment
  identity: spherical averages of even monomials are radial moments of
  a standard normal vector, which turns S_r for the uniform measure
  into a convolution of power sums of beta.  For finitely supported
  measures it reduces to exact powers of the per-atom contraction
  q_j = sum_i beta_i (k x_j)_i^2.

The default picks enumeration when the composition count is small and
the dimension at most 4, and the recurrence otherwise.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import combin
from .errors import (
    BudgetExceeded,
    InputError,
    InvalidLambdaStar,
    NotSymmetric,
    UnsupportedMeasure,
)
from . import linalg

__all__ = [
    "SeriesParams",
    "SeriesResult",
    "choose_lambda_star",
    "r_uniform",
    "r_measure",
    "quadratic_form_moment",
]

_ENUM_AUTO_BUDGET = 5_000_000
_ENUM_HARD_CAP = 200_000_000
_ENUM_ATOM_BUDGET = 4096


@dataclass(frozen=True)
class SeriesParams:
    """Knobs for the series evaluation.

    lambda_star None means the balanced default sqrt((l_1^2 + l_d^2)/2);
    an explicit value must keep every |1 - l_i^2 / ls^2| below 1.
    method is "auto", "enumerate", or "recurrence".
    """

    lambda_star: float | None = None
    tolerance: float = 1e-12
    max_order: int = 200
    method: str = "auto"

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise InputError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_order < 1:
            raise InputError(f"max_order must be at least 1, got {self.max_order}")
        if self.method not in ("auto", "enumerate", "recurrence"):
            raise InputError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class SeriesResult:
    """Evaluated series with its convergence certificate.

    tail_bound caps the truncation error after orders_used orders;
    converged records whether it met the requested tolerance.
    """

    value: float
    orders_used: int
    alpha: float
    tail_bound: float
    lambda_star: float
    converged: bool


def choose_lambda_star(values):
    """Balanced normalization scale sqrt((l_min^2 + l_max^2) / 2).

    Midpoint of the valid scale window; it equalizes the contraction of
    the extreme singular values and keeps alpha < 1 whenever
    l_max / l_min is finite.
    """
    values = np.asarray(values, dtype=float)
    return math.sqrt((values[0] ** 2 + values[-1] ** 2) / 2.0)


def _spectrum_values(spec):
    """Accept a SingularSpectrum or a bare ascending value array."""
    if isinstance(spec, linalg.SingularSpectrum):
        return np.asarray(spec.values, dtype=float)
    values = np.asarray(spec, dtype=float)
    if values.ndim != 1 or len(values) == 0:
        raise InputError(f"expected singular values, got shape {values.shape}")
    return values


def _setup_scale(values, params):
    if np.any(values <= 0.0) or not np.all(np.isfinite(values)):
        raise InputError("singular values must be positive and finite")
    if np.any(np.diff(values) < 0.0):
        raise InputError("singular values must be ascending")
    ls = params.lambda_star
    if ls is None:
        ls = choose_lambda_star(values)
    if not (ls > 0.0) or not math.isfinite(ls):
        raise InvalidLambdaStar(f"scale must be positive, got {ls}")
    beta = 1.0 - (values / ls) ** 2
    alpha = float(np.abs(beta).max())
    if alpha >= 1.0:
        raise InvalidLambdaStar(
            f"scale {ls} gives contraction {alpha:.6g} >= 1; "
            f"it must exceed {values[-1] / math.sqrt(2.0):.6g}"
        )
    return float(ls), beta, alpha


def _tail_bound(alpha, r):
    """Geometric majorant of the dropped orders: sum_{s>r} alpha^s / 2s."""
    if alpha == 0.0:
        return 0.0
    log_tail = (r + 1) * math.log(alpha) - math.log(2.0 * (r + 1) * (1.0 - alpha))
    if log_tail < -745.0:
        return 0.0
    return math.exp(log_tail)


def _orders_for_tolerance(alpha, tolerance, max_order):
    """Smallest order whose tail bound meets the tolerance, capped.

    The bound decreases in r, so a bisection finds the first admissible
    order; if even max_order is not enough the cap is returned and the
    caller reports converged = False.
    """
    if alpha == 0.0:
        return 0
    if _tail_bound(alpha, max_order) > tolerance:
        return max_order
    lo, hi = 1, max_order
    while lo < hi:
        mid = (lo + hi) // 2
        if _tail_bound(alpha, mid) <= tolerance:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _enumeration_work(d, orders):
    """Total composition count over orders 1..R: C(R + d, d) - 1."""
    return math.comb(orders + d, d) - 1


# Cached composition heads: _heads(k, s) is the colex array of
# compositions of s into k parts, shared across orders and calls.
_HEAD_CACHE = {}


def _heads(k, s):
    key = (k, s)
    cached = _HEAD_CACHE.get(key)
    if cached is not None:
        return cached
    if k == 1:
        arr = np.array([[s]], dtype=np.int32)
    elif k == 2:
        first = np.arange(s, -1, -1, dtype=np.int32)
        arr = np.column_stack([first, s - first])
    else:
        arr = np.vstack(
            [
                np.hstack(
                    [
                        _heads(k - 1, s - j),
                        np.full((combin.composition_count(s - j, k - 1), 1), j, np.int32),
                    ]
                )
                for j in range(s + 1)
            ]
        )
    _HEAD_CACHE[key] = arr
    return arr


def _order_compositions(r, d):
    """Compositions of r into d parts as int32 rows in colex order."""
    if d == 1:
        return np.array([[r]], dtype=np.int32)
    if d == 2:
        first = np.arange(r, -1, -1, dtype=np.int32)
        return np.column_stack([first, r - first])
    n = combin.composition_count(r, d)
    out = np.empty((n, d), dtype=np.int32)
    lo = 0
    for j in range(r + 1):
        head = _heads(d - 1, r - j)
        hi = lo + len(head)
        out[lo:hi, : d - 1] = head
        out[lo:hi, d - 1] = j
        lo = hi
    return out


def _inner_uniform_enumerate(beta, orders):
    """S_r for the uniform measure by walking every composition.

    Term values are assembled from scaled per-part tables
    g_i[n] = beta_i^n (2n-1)!! / (2n)!!, each bounded by alpha^n, and
    the per-order prefactor 2^r r! / (d (d+2) ... (d+2r-2)), so no
    intermediate grows beyond polynomial size.  Per-order sums use
    exactly rounded summation; the order of terms is the colex order of
    compositions.
    """
    d = len(beta)
    n = np.arange(1, orders + 1, dtype=float)
    odd_over_even = (2.0 * n - 1.0) / (2.0 * n)
    tables = np.hstack(
        [
            np.ones((d, 1)),
            np.cumprod(beta[:, None] * odd_over_even[None, :], axis=1),
        ]
    )
    prefactor = np.hstack([[1.0], np.cumprod(2.0 * n / (d + 2.0 * n - 2.0))])
    inner = np.zeros(orders + 1)
    for r in range(1, orders + 1):
        comps = _order_compositions(r, d)
        term = tables[0][comps[:, 0]].copy()
        for i in range(1, d):
            term *= tables[i][comps[:, i]]
        term *= prefactor[r]
        inner[r] = math.fsum(term.tolist())
    return inner


def _inner_uniform_recurrence(beta, orders):
    """S_r for the uniform measure through the Gaussian-moment recursion.

    With p_j the power sums of beta, the scaled moments H_r = S_r obey
    H_r = sum_{j=1}^r w_{r,j} p_j H_{r-j}, where the weights
    w_{r,j} = 2^(j-1) (r-1)...(r-j+1) / ((d+2r-2j)...(d+2r-2)) are
    generated multiplicatively per order, so every intermediate stays
    bounded.
    """
    d = len(beta)
    if orders == 0:
        return np.ones(1)
    power_sums = np.empty(orders + 1)
    power_sums[0] = float(len(beta))
    running = np.ones_like(beta)
    for j in range(1, orders + 1):
        running = running * beta
        power_sums[j] = running.sum()
    inner = np.empty(orders + 1)
    inner[0] = 1.0
    for r in range(1, orders + 1):
        m = np.arange(r - 1, 0, -1, dtype=float)
        weights = np.empty(r)
        weights[0] = 1.0 / (d + 2.0 * r - 2.0)
        if r > 1:
            weights[1:] = weights[0] * np.cumprod(2.0 * m / (d + 2.0 * m - 2.0))
        inner[r] = np.sum(weights * power_sums[1 : r + 1] * inner[r - 1 :: -1])
    return inner


def _resolve_method(params, d, orders, n_atoms=None):
    if params.method != "auto":
        return params.method
    if n_atoms is not None:
        # Exact per-atom powers are cheaper and tighter for finite support.
        return "recurrence"
    if d <= 4 and _enumeration_work(d, orders) <= _ENUM_AUTO_BUDGET:
        return "enumerate"
    return "recurrence"


def _check_enum_cap(d, orders, n_atoms=1):
    work = _enumeration_work(d, orders) * max(n_atoms, 1)
    if work > _ENUM_HARD_CAP:
        raise BudgetExceeded(
            f"enumeration would visit {work:.3e} composition terms; "
            "use the recurrence method"
        )


def _assemble(value, orders, alpha, tail, ls, tolerance):
    return SeriesResult(
        value=value,
        orders_used=orders,
        alpha=alpha,
        tail_bound=tail,
        lambda_star=ls,
        converged=tail <= tolerance,
    )


def r_uniform(spec, params=None):
    """Average of log||g x|| over the uniform measure, by series.

    spec is a SingularSpectrum (or a bare ascending array of singular
    values; the rotation is irrelevant for the rotation-invariant
    measure).  Returns a SeriesResult whose value carries the log of
    the normalization scale plus the summed series, with the truncation
    certificate attached.
    """
    if params is None:
        params = SeriesParams()
    values = _spectrum_values(spec)
    if params.lambda_star is None and values[0] == values[-1]:
        # All singular values equal: the scale can match them exactly
        # and every series term vanishes.
        if values[0] <= 0.0:
            raise InputError("singular values must be positive and finite")
        ls = float(values[0])
        return _assemble(math.log(ls), 0, 0.0, 0.0, ls, params.tolerance)
    ls, beta, alpha = _setup_scale(values, params)
    if alpha == 0.0:
        return _assemble(math.log(ls), 0, 0.0, 0.0, ls, params.tolerance)
    orders = _orders_for_tolerance(alpha, params.tolerance, params.max_order)
    method = _resolve_method(params, len(values), orders)
    if method == "enumerate":
        _check_enum_cap(len(values), orders)
        inner = _inner_uniform_enumerate(beta, orders)
    else:
        inner = _inner_uniform_recurrence(beta, orders)
    series_sum = math.fsum(
        (inner[r] / (2.0 * r) for r in range(1, orders + 1))
    )
    tail = _tail_bound(alpha, orders)
    return _assemble(
        math.log(ls) - series_sum, orders, alpha, tail, ls, params.tolerance
    )


def _inner_finite_recurrence(weights, q, orders):
    """S_r for finite support: exact weighted powers of the contractions."""
    inner = np.empty(orders + 1)
    inner[0] = 1.0
    powers = weights.astype(float).copy()
    for r in range(1, orders + 1):
        powers = powers * q
        inner[r] = np.sum(powers)
    return inner


def _inner_finite_enumerate(weights, contraction_parts, orders):
    """S_r for finite support by walking every composition.

    contraction_parts has rows v_j = beta * (k x_j)^2 per atom; the
    term of composition c is multinomial(c) prod v_j^c, evaluated in
    log space so deep orders cannot overflow, then weighted over atoms.
    Per-order term sums are exactly rounded in colex order.
    """
    d = contraction_parts.shape[1]
    logs = np.where(
        contraction_parts == 0.0, -1e300, np.log(np.abs(contraction_parts))
    )
    negative = contraction_parts < 0.0
    lgamma = np.vectorize(math.lgamma)
    factorial_table = lgamma(np.arange(1, orders + 2, dtype=float))
    inner = np.zeros(orders + 1)
    for r in range(1, orders + 1):
        comps = _order_compositions(r, d)
        comps_f = comps.astype(float)
        log_multinomial = factorial_table[r] - factorial_table[comps].sum(axis=1)
        log_terms = log_multinomial[:, None] + comps_f @ logs.T
        signs = 1.0 - 2.0 * ((comps @ negative.T.astype(np.int64)) % 2)
        terms = np.exp(log_terms) * signs
        per_comp = terms @ weights
        inner[r] = math.fsum(per_comp.tolist())
    return inner


def r_measure(g, nu, params=None):
    """Average of log||g x|| over the measure nu, by series.

    g may be a matrix or a precomputed SingularSpectrum; the uniform
    kind delegates to r_uniform, finitely supported kinds rotate the
    atoms into the singular frame and sum their contraction series.
    """
    if params is None:
        params = SeriesParams()
    if isinstance(g, linalg.SingularSpectrum):
        spectrum = g
    else:
        spectrum = linalg.singular_spectrum(g)
    kind = getattr(nu, "kind", None)
    if kind == "uniform":
        if nu.dim != spectrum.dim:
            raise InputError(
                f"matrix dimension {spectrum.dim} != measure dimension {nu.dim}"
            )
        return r_uniform(spectrum, params)
    if kind not in ("atomic", "empirical"):
        raise UnsupportedMeasure(f"cannot evaluate measure of kind {kind!r}")
    if nu.dim != spectrum.dim:
        raise InputError(
            f"matrix dimension {spectrum.dim} != measure dimension {nu.dim}"
        )
    values = spectrum.values
    if params.lambda_star is None and values[0] == values[-1]:
        if values[0] <= 0.0:
            raise InputError("singular values must be positive and finite")
        ls = float(values[0])
        return _assemble(math.log(ls), 0, 0.0, 0.0, ls, params.tolerance)
    ls, beta, alpha = _setup_scale(values, params)
    rotated = nu.points @ spectrum.rotation.T
    parts = rotated**2
    weights = np.asarray(nu.weights, dtype=float)
    if alpha == 0.0:
        return _assemble(math.log(ls), 0, 0.0, 0.0, ls, params.tolerance)
    orders = _orders_for_tolerance(alpha, params.tolerance, params.max_order)
    method = _resolve_method(params, len(values), orders, n_atoms=len(weights))
    if method == "enumerate":
        if len(weights) > _ENUM_ATOM_BUDGET:
            raise UnsupportedMeasure(
                f"enumeration over {len(weights)} atoms exceeds the "
                f"{_ENUM_ATOM_BUDGET}-atom budget; use the recurrence method"
            )
        _check_enum_cap(len(values), orders, len(weights))
        inner = _inner_finite_enumerate(weights, parts * beta[None, :], orders)
    else:
        inner = _inner_finite_recurrence(weights, parts @ beta, orders)
    series_sum = math.fsum(
        (inner[r] / (2.0 * r) for r in range(1, orders + 1))
    )
    tail = _tail_bound(alpha, orders)
    return _assemble(
        math.log(ls) - series_sum, orders, alpha, tail, ls, params.tolerance
    )


def quadratic_form_moment(a, nu, r):
    """Moment of the quadratic form <a x, x> of order r under nu.

    a must be symmetric.  Diagonalizing a = k^T diag(e) k, the moment
    expands over compositions of r as
    sum_c Theta_c(k, nu) prod_i e_i^{c_i}, which is evaluated literally.
    """
    a = linalg.as_square_matrix(a)
    scale = np.abs(a).max()
    if scale > 0.0 and np.abs(a - a.T).max() > 1e-12 * scale:
        raise NotSymmetric("quadratic form matrix must be symmetric")
    if r < 0:
        raise InputError(f"order must be nonnegative, got {r}")
    d = a.shape[0]
    if getattr(nu, "dim", d) != d:
        raise InputError(
            f"matrix dimension {d} != measure dimension {nu.dim}"
        )
    eig, k = linalg._eigh_sorted((a + a.T) / 2.0)
    terms = []
    for c in combin.compositions(r, d):
        coeff = combin.theta_measure(d, c, k, nu)
        power = 1.0
        for e, ci in zip(eig, c):
            if ci:
                power *= e**ci
        terms.append(coeff * power)
    return math.fsum(terms)
