"""Probability measures on projective space and on the matrix group.

Projective measures come in three kinds: the uniform (rotation
invariant) measure, finitely supported atomic measures, and empirical
clouds of samples.  Matrix ensembles are the rotation-averaged
convolutions mu_1 * haar * mu_2 with finitely supported mu_1, mu_2:
every construction used by the explicit Lyapunov formulas is of this
shape, and it keeps the product formula down to finitely many average
log-norm evaluations.

Projective points are stored as unit vectors with the sign fixed so the
first nonzero coordinate is positive.  Every integrand in the package
is even, so the choice of representative is unobservable.
"""

import math
import warnings

import numpy as np

from . import combin, linalg
from .errors import InputError, UnsupportedMeasure
from .montecarlo import (
    _CHUNK,
    _as_stream,
    _canonical_rows,
    _haar_batch,
    _projective_batch,
    RandomStream,
    RngConfig,
)

__all__ = [
    "ProjectiveMeasure",
    "MatrixEnsemble",
    "sample_matrix",
    "sample_matrix_batch",
    "act",
    "momenta",
    "stationarity_residual",
    "empirical_stationary",
    "read_measure",
    "write_measure",
    "read_ensemble",
    "write_ensemble",
    "read_weighted_matrices",
]

_WEIGHT_TOL = 1e-12
_UNIT_TOL = 1e-12
_FILE_WEIGHT_TOL = 1e-6
_INVERT_TOL = 1e-12


def _check_weights(weights, tol, what):
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise InputError(f"{what}: need a nonempty weight vector")
    if np.any(w <= 0.0):
        raise InputError(f"{what}: weights must be positive")
    total = float(w.sum())
    if abs(total - 1.0) > tol:
        raise InputError(
            f"{what}: weights sum to {total!r}, off by more than {tol}"
        )
    return w / total


class ProjectiveMeasure:
    """A probability measure on P^(d-1).

    kind is one of "uniform", "atomic", "empirical".  Finitely supported
    kinds carry points (rows, unit norm, canonical sign) and weights;
    the empirical kind weights its samples equally.
    """

    def __init__(self, kind, dim, points=None, weights=None):
        if kind not in ("uniform", "atomic", "empirical"):
            raise InputError(f"unknown measure kind {kind!r}")
        if dim < 1:
            raise InputError(f"dimension must be positive, got {dim}")
        self.kind = kind
        self.dim = int(dim)
        if kind == "uniform":
            if points is not None or weights is not None:
                raise InputError("the uniform measure carries no support points")
            self.points = None
            self.weights = None
            return
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != dim or pts.shape[0] == 0:
            raise InputError(
                f"support must be a nonempty (n, {dim}) array, got {pts.shape}"
            )
        norms = np.sqrt((pts * pts).sum(axis=1))
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            worst = float(np.abs(norms - 1.0).max())
            raise InputError(
                f"support vectors must be unit norm; worst deviation {worst:.3e}"
            )
        pts = _canonical_rows(pts / norms[:, None])
        self.points = pts
        if kind == "empirical":
            if weights is not None:
                raise InputError("empirical measures weight samples equally")
            self.weights = np.full(len(pts), 1.0 / len(pts))
        else:
            if weights is None:
                raise InputError("atomic measures need weights")
            self.weights = _check_weights(weights, _WEIGHT_TOL, "atomic measure")
            if len(self.weights) != len(pts):
                raise InputError(
                    f"{len(pts)} atoms but {len(self.weights)} weights"
                )

    @classmethod
    def uniform(cls, dim):
        return cls("uniform", dim)

    @classmethod
    def atomic(cls, points, weights):
        points = np.atleast_2d(np.array(points, dtype=float))
        return cls("atomic", points.shape[1], points, weights)

    @classmethod
    def empirical(cls, samples):
        samples = np.atleast_2d(np.array(samples, dtype=float))
        return cls("empirical", samples.shape[1], samples)

    def __repr__(self):
        if self.kind == "uniform":
            return f"ProjectiveMeasure.uniform({self.dim})"
        return (
            f"ProjectiveMeasure({self.kind!r}, dim={self.dim}, "
            f"atoms={len(self.points)})"
        )


def _check_atoms(atoms, dim, what):
    """Validate a weighted matrix list; returns (weights, stacked matrices)."""
    if not atoms:
        raise InputError(f"{what}: empty atom list")
    weights = _check_weights([w for w, _ in atoms], _WEIGHT_TOL, what)
    mats = []
    for i, (_, g) in enumerate(atoms):
        g = linalg.as_square_matrix(g)
        if g.shape[0] != dim:
            raise InputError(
                f"{what}: atom {i} has dimension {g.shape[0]}, ensemble has {dim}"
            )
        row_norms = np.sqrt((g * g).sum(axis=1))
        if np.any(row_norms == 0.0) or abs(
            linalg.determinant(g / row_norms[:, None])
        ) <= _INVERT_TOL:
            raise InputError(f"{what}: atom {i} is not invertible")
        mats.append(g)
    return weights, np.stack(mats)


class MatrixEnsemble:
    """The convolution mu_1 * haar * mu_2 on the matrix group.

    left_atoms and right_atoms are weighted lists [(w, matrix), ...] for
    mu_1 and mu_2; haar_middle inserts the Haar rotation factor.  At
    least one of the three components must be present.  A sampled
    element is the product left @ k @ right of whichever factors exist.
    """

    def __init__(self, dim, left_atoms=None, haar_middle=False, right_atoms=None):
        if dim < 1:
            raise InputError(f"dimension must be positive, got {dim}")
        if not left_atoms and not haar_middle and not right_atoms:
            raise InputError("ensemble needs at least one component")
        self.dim = int(dim)
        self.haar_middle = bool(haar_middle)
        if left_atoms:
            self.left_weights, self.left_matrices = _check_atoms(
                left_atoms, dim, "left atoms"
            )
            self._left_cumulative = np.cumsum(self.left_weights)
        else:
            self.left_weights = self.left_matrices = self._left_cumulative = None
        if right_atoms:
            self.right_weights, self.right_matrices = _check_atoms(
                right_atoms, dim, "right atoms"
            )
            self._right_cumulative = np.cumsum(self.right_weights)
        else:
            self.right_weights = self.right_matrices = self._right_cumulative = None

    @classmethod
    def rotation_averaged(cls, g):
        """The measure haar * delta_g: draws k @ g."""
        g = linalg.as_square_matrix(g)
        return cls(g.shape[0], haar_middle=True, right_atoms=[(1.0, g)])

    @classmethod
    def pair(cls, left, right):
        """The measure delta_left * haar * delta_right: draws left @ k @ right."""
        left = linalg.as_square_matrix(left)
        right = linalg.as_square_matrix(right)
        if left.shape != right.shape:
            raise InputError(
                f"dimension mismatch: left is {left.shape[0]}, "
                f"right is {right.shape[0]}"
            )
        return cls(
            left.shape[0],
            left_atoms=[(1.0, left)],
            haar_middle=True,
            right_atoms=[(1.0, right)],
        )

    def __repr__(self):
        parts = []
        if self.left_matrices is not None:
            parts.append(f"left={len(self.left_matrices)}")
        if self.haar_middle:
            parts.append("haar")
        if self.right_matrices is not None:
            parts.append(f"right={len(self.right_matrices)}")
        return f"MatrixEnsemble(dim={self.dim}, {', '.join(parts)})"


def sample_matrix_batch(ensemble, stream, count):
    """Draw count ensemble elements as a (count, d, d) stack.

    Consumption order on the stream: left picks (count uniforms, when a
    left factor exists), Haar rotations (count * d * d normals, when the
    middle factor exists), then right picks.
    """
    d = ensemble.dim
    out = None
    if ensemble.left_matrices is not None:
        idx = stream.indices(ensemble._left_cumulative, count)
        out = ensemble.left_matrices[idx]
    if ensemble.haar_middle:
        ks = _haar_batch(stream, count, d)
        out = ks if out is None else out @ ks
    if ensemble.right_matrices is not None:
        idx = stream.indices(ensemble._right_cumulative, count)
        rights = ensemble.right_matrices[idx]
        out = rights if out is None else out @ rights
    return out


def sample_matrix(ensemble, stream):
    """Draw one ensemble element: left @ k @ right of the present factors."""
    if not isinstance(stream, RandomStream):
        stream = _as_stream(stream)
    return sample_matrix_batch(ensemble, stream, 1)[0]


def act(g, x):
    """Projective action: normalize g @ x and fix the canonical sign."""
    g = linalg.as_square_matrix(g)
    x = np.asarray(x, dtype=float)
    y = g @ x
    norm = np.sqrt(float(y @ y))
    if norm < 1e-150:
        raise InputError("matrix maps the point to zero; it is not invertible")
    return _canonical_rows((y / norm)[None])[0]


def _act_batch(gs, xs):
    y = np.einsum("nij,nj->ni", gs, xs)
    norms = np.sqrt((y * y).sum(axis=1))
    if np.any(norms < 1e-150):
        raise InputError("an ensemble element maps a point to zero")
    return _canonical_rows(y / norms[:, None])


def momenta(nu, order, rotation=None):
    """All order-r moment coefficients of nu under an optional rotation.

    Returns a dict keyed by composition (colex order within the order)
    with float values; values are nonnegative and sum to 1.  The uniform
    kind redirects to the exact coefficient table and ignores rotation.
    """
    if order < 0:
        raise InputError(f"order must be nonnegative, got {order}")
    d = nu.dim
    out = {}
    for c in combin.compositions(order, d):
        out[c] = combin.theta_measure(d, c, rotation, nu)
    return out


def _sample_from(nu, stream, count):
    """Draw count points distributed by nu."""
    if nu.kind == "uniform":
        return _projective_batch(stream, count, nu.dim)
    idx = stream.indices(np.cumsum(nu.weights), count)
    return nu.points[idx]


def stationarity_residual(ensemble, nu, order, n_samples, rng=RngConfig()):
    """How far nu is from being a fixed point of the ensemble's action.

    Pushes n_samples points x ~ nu through independently sampled
    matrices, forms the empirical image measure, and returns the largest
    absolute difference of order-r momenta between the image and nu.
    """
    if n_samples < 1:
        raise InputError(f"need n_samples >= 1, got {n_samples}")
    if ensemble.dim != nu.dim:
        raise InputError(
            f"ensemble dimension {ensemble.dim} != measure dimension {nu.dim}"
        )
    stream = _as_stream(rng)
    pushed = []
    for _, count in _iter_blocks(n_samples):
        xs = _sample_from(nu, stream, count)
        gs = sample_matrix_batch(ensemble, stream, count)
        pushed.append(_act_batch(gs, xs))
    image = ProjectiveMeasure.empirical(np.vstack(pushed))
    base = momenta(nu, order)
    moved = momenta(image, order)
    return max(abs(moved[c] - base[c]) for c in base)


def _iter_blocks(total, size=_CHUNK):
    done = 0
    while done < total:
        count = min(size, total - done)
        yield done, count
        done += count


def empirical_stationary(ensemble, burn_in, n_samples, rng=RngConfig()):
    """Empirical stationary measure of the chain x <- g x / ||g x||.

    Runs the Markov chain from a uniform start, discards burn_in steps,
    and returns every following state (no thinning) as an empirical
    measure.  When the ensemble admits several stationary measures the
    result can depend on the start; this routine makes no uniqueness
    claim.
    """
    if burn_in < 0:
        raise InputError(f"burn-in cannot be negative, got {burn_in}")
    if n_samples < 1:
        raise InputError(f"need n_samples >= 1, got {n_samples}")
    stream = _as_stream(rng)
    d = ensemble.dim
    v = _projective_batch(stream, 1, d)[0]
    states = np.empty((n_samples, d))
    steps = burn_in + n_samples
    done = 0
    while done < steps:
        count = min(_CHUNK, steps - done)
        mats = sample_matrix_batch(ensemble, stream, count)
        for i in range(count):
            w = mats[i] @ v
            v = w / math.sqrt(float(w @ w))
            step = done + i
            if step >= burn_in:
                states[step - burn_in] = v
        done += count
    return ProjectiveMeasure.empirical(_canonical_rows(states))


def read_measure(path):
    """Read an atomic projective measure: lines of `weight x_1 ... x_d`.

    Blank lines and lines starting with # are skipped.  Weights off
    unity by less than 1e-6 are renormalized with a warning, farther off
    is an error.  Support vectors are normalized to unit length, with a
    warning when the correction exceeds 1e-6.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    weights = []
    points = []
    dim = None
    for i, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) < 2:
            raise InputError(
                f"{path}:{i}: need a weight and at least one coordinate"
            )
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise InputError(f"{path}:{i}: non-numeric entry in {line!r}") from None
        w, x = values[0], values[1:]
        if dim is None:
            dim = len(x)
        elif len(x) != dim:
            raise InputError(
                f"{path}:{i}: point has {len(x)} coordinates, expected {dim}"
            )
        if w <= 0.0:
            raise InputError(f"{path}:{i}: weight must be positive, got {w}")
        norm = math.sqrt(math.fsum(c * c for c in x))
        if norm == 0.0:
            raise InputError(f"{path}:{i}: zero support vector")
        if abs(norm - 1.0) > _FILE_WEIGHT_TOL:
            warnings.warn(
                f"{path}:{i}: support vector normalized (norm was {norm:.6g})",
                UserWarning,
                stacklevel=2,
            )
        weights.append(w)
        points.append([c / norm for c in x])
    if not points:
        raise InputError(f"{path}: no atoms found")
    total = math.fsum(weights)
    if abs(total - 1.0) > _FILE_WEIGHT_TOL:
        raise InputError(
            f"{path}: weights sum to {total!r}; more than {_FILE_WEIGHT_TOL} "
            "from 1"
        )
    if abs(total - 1.0) > _WEIGHT_TOL:
        warnings.warn(
            f"{path}: weights sum to {total!r}; renormalizing",
            UserWarning,
            stacklevel=2,
        )
    weights = [w / total for w in weights]
    return ProjectiveMeasure.atomic(points, weights)


def write_measure(path, nu):
    """Write an atomic or empirical measure in the read_measure format."""
    if nu.kind == "uniform":
        raise InputError("the uniform measure has no finite support to write")
    with open(path, "w") as fh:
        for w, x in zip(nu.weights, nu.points):
            coords = " ".join(f"{c:.17g}" for c in x)
            fh.write(f"{w:.17g} {coords}\n")


def read_ensemble(path):
    """Read a matrix ensemble from its structured text format.

    The format is line-oriented: `dim d`, an optional
    `haar_middle true|false`, and any number of `left_atom w` /
    `right_atom w` headers each followed by a matrix block in the
    linalg text format (dimension line, then rows).  Blank lines and
    # comments are skipped between fields.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    dim = None
    haar = False
    left = []
    right = []
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if not stripped or stripped.startswith("#"):
            i += 1
            continue
        parts = stripped.split()
        field = parts[0]
        if field == "dim":
            if len(parts) != 2:
                raise InputError(f"{path}:{i + 1}: expected `dim d`")
            try:
                dim = int(parts[1])
            except ValueError:
                raise InputError(
                    f"{path}:{i + 1}: dimension must be an integer, got {parts[1]!r}"
                ) from None
            i += 1
        elif field == "haar_middle":
            if len(parts) != 2 or parts[1] not in ("true", "false"):
                raise InputError(
                    f"{path}:{i + 1}: expected `haar_middle true|false`"
                )
            haar = parts[1] == "true"
            i += 1
        elif field in ("left_atom", "right_atom"):
            if len(parts) != 2:
                raise InputError(f"{path}:{i + 1}: expected `{field} weight`")
            try:
                w = float(parts[1])
            except ValueError:
                raise InputError(
                    f"{path}:{i + 1}: weight must be a number, got {parts[1]!r}"
                ) from None
            g, i = linalg.parse_matrix_block(lines, i + 1, path)
            (left if field == "left_atom" else right).append((w, g))
        else:
            raise InputError(f"{path}:{i + 1}: unknown field {field!r}")
    if dim is None:
        raise InputError(f"{path}: missing `dim` field")
    for name, atoms in (("left_atom", left), ("right_atom", right)):
        total = math.fsum(w for w, _ in atoms) if atoms else None
        if total is not None and abs(total - 1.0) > _FILE_WEIGHT_TOL:
            raise InputError(
                f"{path}: {name} weights sum to {total!r}; more than "
                f"{_FILE_WEIGHT_TOL} from 1"
            )
        if total is not None and abs(total - 1.0) > _WEIGHT_TOL:
            warnings.warn(
                f"{path}: {name} weights renormalized (sum was {total!r})",
                UserWarning,
                stacklevel=2,
            )
    left = [(w / math.fsum(x for x, _ in left), g) for w, g in left] if left else None
    right = (
        [(w / math.fsum(x for x, _ in right), g) for w, g in right] if right else None
    )
    return MatrixEnsemble(dim, left_atoms=left, haar_middle=haar, right_atoms=right)


def read_weighted_matrices(path):
    """Read a weighted matrix list: `atom w` headers over matrix blocks.

    Returns [(weight, matrix), ...] with weights renormalized under the
    same policy as read_measure: an off-by-more-than-1e-6 sum is an
    error, smaller drifts renormalize with a warning.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    atoms = []
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if not stripped or stripped.startswith("#"):
            i += 1
            continue
        parts = stripped.split()
        if parts[0] != "atom" or len(parts) != 2:
            raise InputError(f"{path}:{i + 1}: expected `atom weight`")
        try:
            w = float(parts[1])
        except ValueError:
            raise InputError(
                f"{path}:{i + 1}: weight must be a number, got {parts[1]!r}"
            ) from None
        if w <= 0.0:
            raise InputError(f"{path}:{i + 1}: weights must be positive")
        g, i = linalg.parse_matrix_block(lines, i + 1, path)
        atoms.append((w, g))
    if not atoms:
        raise InputError(f"{path}: no atoms found")
    dims = {g.shape[0] for _, g in atoms}
    if len(dims) > 1:
        raise InputError(f"{path}: mixed matrix dimensions {sorted(dims)}")
    total = math.fsum(w for w, _ in atoms)
    if abs(total - 1.0) > _FILE_WEIGHT_TOL:
        raise InputError(
            f"{path}: weights sum to {total!r}; more than {_FILE_WEIGHT_TOL} "
            "from 1"
        )
    if abs(total - 1.0) > _WEIGHT_TOL:
        warnings.warn(
            f"{path}: weights sum to {total!r}; renormalizing",
            UserWarning,
            stacklevel=2,
        )
    return [(w / total, g) for w, g in atoms]


def write_ensemble(path, ensemble):
    """Write an ensemble in the read_ensemble format."""
    with open(path, "w") as fh:
        fh.write(f"dim {ensemble.dim}\n")
        fh.write(f"haar_middle {'true' if ensemble.haar_middle else 'false'}\n")
        for name, weights, mats in (
            ("left_atom", ensemble.left_weights, ensemble.left_matrices),
            ("right_atom", ensemble.right_weights, ensemble.right_matrices),
        ):
            if mats is None:
                continue
            for w, g in zip(weights, mats):
                fh.write(f"{name} {w:.17g}\n")
                fh.write(f"{ensemble.dim}\n")
                for row in g:
                    fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
