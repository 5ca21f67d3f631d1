"""Dense kernels for small square matrices.

Sized for the d <= 64 matrices this package works with, and written so
the same code path serves both a single matrix and a stacked batch:
scalar calls are batch calls of size one, which keeps results bitwise
identical between the two.

Contents: cyclic Jacobi diagonalization of Gram matrices (singular
values plus the aligning rotation), Householder QR with a positive
diagonal on R, determinants by pivoted elimination, spectral radius by
scaled repeated squaring, and the plain-text matrix file format.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    InputError,
    NoConvergence,
    NonInvertible,
    NotSymmetric,
    RankDeficient,
)

__all__ = [
    "SingularSpectrum",
    "SLDeviationWarning",
    "as_square_matrix",
    "singular_spectrum",
    "determinant",
    "qr_orthonormalize",
    "spectral_radius",
    "read_matrix",
    "write_matrix",
]

_JACOBI_SWEEPS = 30
_JACOBI_TOL = 1e-13
_INVERTIBILITY_TOL = 1e-12
_RANK_TOL = 1e-13
_SL_WARN_TOL = 1e-8


class SLDeviationWarning(UserWarning):
    """Input was expected to have unit determinant but does not."""


def as_square_matrix(g):
    """Validate and return g as a fresh float64 square array."""
    a = np.array(g, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise InputError("matrix must have positive dimension")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values in ascending order and the rotation aligning them.

    values[i] is the i-th singular value of g; rotation is the orthogonal
    matrix k whose rows are the right singular vectors, so
    k @ (g.T @ g) @ k.T is diagonal with entries values**2.
    """

    values: np.ndarray
    rotation: np.ndarray

    @property
    def dim(self):
        return len(self.values)


def _jacobi_eigh(s, sweeps=_JACOBI_SWEEPS, tol=_JACOBI_TOL):
    """Cyclic Jacobi for a symmetric matrix.

    Returns (eigenvalues, v) with v orthogonal and v.T @ s @ v diagonal;
    eigenvalues come back unsorted.  Raises NoConvergence if the
    off-diagonal mass has not dropped below tol * ||s||_F after the
    sweep budget.
    """
    a = np.array(s, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), v
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v

    def offdiag():
        o = a - np.diag(np.diag(a))
        return np.linalg.norm(o)

    converged = False
    for _ in range(sweeps):
        if offdiag() <= tol * scale:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # Rotation angle chosen to zero a[p, q].
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.hypot(theta, 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    if not converged and offdiag() > tol * scale:
        raise NoConvergence(
            f"Jacobi sweeps exhausted with off-diagonal mass {offdiag():.3e}",
            last_estimate=np.diag(a).copy(),
        )
    return np.diag(a).copy(), v


def _eigh_sorted(s):
    """Jacobi eigensolve with ascending eigenvalues and sign-fixed rows.

    Returns (values, k) where the rows of k are eigenvectors, each row
    scaled so its largest-magnitude entry is positive.
    """
    vals, v = _jacobi_eigh(s)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    k = v[:, order].T.copy()
    lead = np.take_along_axis(
        k, np.argmax(np.abs(k), axis=1)[:, None], axis=1
    )[:, 0]
    k[lead < 0] *= -1.0
    return vals, k


def singular_spectrum(g):
    """Singular values of g (ascending) and the aligning rotation.

    Requires g invertible: the determinant of the row-normalized matrix
    must exceed 1e-12 in magnitude.  Inputs that are not within 1e-8 of
    unit determinant are accepted with an SLDeviationWarning, since the
    scaling identity lets callers reduce to that case.
    """
    g = as_square_matrix(g)
    row_norms = np.sqrt((g * g).sum(axis=1))
    if np.any(row_norms == 0.0):
        raise NonInvertible("matrix has a zero row")
    det_scaled = determinant(g / row_norms[:, None])
    if abs(det_scaled) <= _INVERTIBILITY_TOL:
        raise NonInvertible(
            f"row-scaled determinant {det_scaled:.3e} is below tolerance"
        )
    vals2, k = _eigh_sorted(g.T @ g)
    values = np.sqrt(np.clip(vals2, 0.0, None))
    det = determinant(g)
    if abs(abs(det) - 1.0) > _SL_WARN_TOL:
        warnings.warn(
            f"matrix determinant {det:.6g} is not of unit magnitude",
            SLDeviationWarning,
            stacklevel=2,
        )
    return SingularSpectrum(values=values, rotation=k)


def _det_batched(a):
    """Determinants of a stack of square matrices by pivoted elimination."""
    a = np.array(a, dtype=float)
    b, n, _ = a.shape
    if n == 1:
        return a[:, 0, 0].copy()
    if n == 2:
        return a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
    if n == 3:
        return (
            a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
            - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
            + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0])
        )
    det = np.ones(b)
    idx = np.arange(b)
    for col in range(n - 1):
        piv = np.argmax(np.abs(a[:, col:, col]), axis=1) + col
        swapped = piv != col
        det[swapped] *= -1.0
        rows_piv = a[idx, piv].copy()
        a[idx, piv] = a[:, col]
        a[:, col] = rows_piv
        pivot = a[:, col, col]
        det *= pivot
        safe = pivot != 0.0
        factors = np.zeros_like(a[:, col + 1 :, col])
        factors[safe] = a[safe, col + 1 :, col] / pivot[safe, None]
        a[:, col + 1 :, col:] -= factors[:, :, None] * a[:, None, col, col:]
    det *= a[:, n - 1, n - 1]
    return det


def determinant(g):
    """Determinant of g: closed form for d <= 3, pivoted LU above."""
    g = as_square_matrix(g)
    return float(_det_batched(g[None])[0])


def _qr_batched(a):
    """Householder QR of a stack of square matrices.

    Returns (q, r) with q orthogonal, r upper triangular with
    nonnegative diagonal, and q @ r reproducing the input.  The sign of
    a zero leading entry counts as positive when building reflectors.
    """
    r = np.array(a, dtype=float)
    b, n, _ = r.shape
    q = np.broadcast_to(np.eye(n), (b, n, n)).copy()
    for k in range(n):
        x = r[:, k:, k]
        norm = np.sqrt((x * x).sum(axis=1))
        sign = np.where(x[:, 0] >= 0.0, 1.0, -1.0)
        v = x.copy()
        v[:, 0] += sign * norm
        vnorm2 = (v * v).sum(axis=1)
        active = vnorm2 > 0.0
        # Avoid dividing by zero on exactly-zero columns; they simply
        # skip their reflection.
        coef = np.where(active, 2.0 / np.where(active, vnorm2, 1.0), 0.0)
        proj = np.einsum("bi,bij->bj", v, r[:, k:, k:])
        r[:, k:, k:] -= coef[:, None, None] * v[:, :, None] * proj[:, None, :]
        qv = np.einsum("bij,bj->bi", q[:, :, k:], v)
        q[:, :, k:] -= coef[:, None, None] * qv[:, :, None] * v[:, None, :]
    diag = np.einsum("bii->bi", r)
    flip = np.where(diag < 0.0, -1.0, 1.0)
    r *= flip[:, :, None]
    q *= flip[:, None, :]
    # Clean the strictly-lower triangle of rounding dust.
    r *= np.triu(np.ones((n, n)))[None]
    return q, r


def qr_orthonormalize(g):
    """QR factorization of g with the diagonal of R made nonnegative.

    Raises RankDeficient when a diagonal entry of R falls below
    1e-13 * d * max|g|, which signals numerically dependent columns.
    """
    g = as_square_matrix(g)
    q, r = _qr_batched(g[None])
    q, r = q[0], r[0]
    n = g.shape[0]
    floor = _RANK_TOL * n * max(np.abs(g).max(), 1e-300)
    if np.any(np.diag(r) < floor):
        raise RankDeficient(
            f"diagonal of R falls below {floor:.3e}; columns are dependent"
        )
    return q, r


def _spectral_radius_batched(a, tol, max_squarings):
    """Scaled repeated squaring on a stack of matrices.

    Returns (rho, ok) where ok flags entries whose log-estimates moved
    by less than tol between the final two squarings.
    """
    b_mat = np.array(a, dtype=float)
    nb = b_mat.shape[0]
    norms = np.sqrt((b_mat * b_mat).sum(axis=(1, 2)))
    rho = np.zeros(nb)
    ok = np.zeros(nb, dtype=bool)
    zero = norms == 0.0
    ok[zero] = True
    live = ~zero
    if not np.any(live):
        return rho, ok
    b_mat[live] /= norms[live, None, None]
    logscale = np.where(live, np.log(np.where(live, norms, 1.0)), 0.0)
    estimate = logscale.copy()
    for m in range(1, max_squarings + 1):
        b2 = b_mat[live] @ b_mat[live]
        s = np.sqrt((b2 * b2).sum(axis=(1, 2)))
        vanished = s == 0.0
        if np.any(vanished):
            # Nilpotent to machine precision: spectral radius zero.
            live_idx = np.flatnonzero(live)
            dead = live_idx[vanished]
            ok[dead] = True
            rho[dead] = 0.0
            keep = ~vanished
            b2, s = b2[keep], s[keep]
            live[dead] = False
            if not np.any(live):
                return rho, ok
        logscale[live] = 2.0 * logscale[live] + np.log(s)
        new_estimate = logscale[live] / 2.0**m
        moved = np.abs(new_estimate - estimate[live])
        settled = moved < tol
        estimate[live] = new_estimate
        b_mat_live = b2 / s[:, None, None]
        if np.any(settled):
            live_idx = np.flatnonzero(live)
            done = live_idx[settled]
            ok[done] = True
            rho[done] = np.exp(estimate[done])
            keep = ~settled
            b_mat_live = b_mat_live[keep]
            live[done] = False
        if not np.any(live):
            return rho, ok
        b_mat = np.zeros_like(b_mat)
        b_mat[live] = b_mat_live
    rho[live] = np.exp(estimate[live])
    return rho, ok


def spectral_radius(g, tol=1e-10, max_squarings=40):
    """Spectral radius of g by scaled repeated squaring.

    Tracks log ||g^(2^m)|| / 2^m, which decreases to log rho(g), and
    stops when successive log-estimates differ by less than tol.
    Raises NoConvergence with the last estimate if the squaring budget
    runs out first.
    """
    g = as_square_matrix(g)
    rho, ok = _spectral_radius_batched(g[None], tol, max_squarings)
    if not ok[0]:
        raise NoConvergence(
            f"spectral radius estimate still moving after "
            f"{max_squarings} squarings",
            last_estimate=float(rho[0]),
        )
    return float(rho[0])


def parse_matrix_block(lines, start, source):
    """Parse a matrix block from a list of lines.

    The block is a dimension line followed by that many rows; start is
    the zero-based index at (or before) the dimension line and source
    names the file in error messages.  Blank lines and # comments are
    skipped anywhere inside the block.  Returns (matrix, index past the
    block).
    """

    def advance(i):
        while i < len(lines):
            stripped = lines[i].strip()
            if stripped and not stripped.startswith("#"):
                return i
            i += 1
        return i

    start = advance(start)
    if start >= len(lines):
        raise InputError(f"{source}:{start + 1}: expected a matrix block")
    try:
        d = int(lines[start].strip())
    except ValueError:
        raise InputError(
            f"{source}:{start + 1}: expected the dimension, got {lines[start]!r}"
        ) from None
    if d < 1:
        raise InputError(
            f"{source}:{start + 1}: dimension must be positive, got {d}"
        )
    rows = []
    i = start
    while len(rows) < d:
        i = advance(i + 1)
        if i >= len(lines):
            raise InputError(f"{source}:{i + 1}: missing matrix row")
        parts = lines[i].split()
        if len(parts) != d:
            raise InputError(
                f"{source}:{i + 1}: expected {d} entries, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise InputError(
                f"{source}:{i + 1}: non-numeric entry in {lines[i]!r}"
            ) from None
    return as_square_matrix(rows), i + 1


def read_matrix(path):
    """Read a matrix from text: first line d, then d rows of d numbers."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise InputError(f"{path}:1: empty matrix file")
    matrix, _ = parse_matrix_block(lines, 0, path)
    return matrix


def write_matrix(path, g):
    """Write a matrix in the text format understood by read_matrix."""
    g = as_square_matrix(g)
    d = g.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{d}\n")
        for row in g:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
