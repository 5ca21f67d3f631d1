"""Seeded randomized estimators: projective and Haar sampling, the
average log-norm integral, product-process simulation, and the spectral
radius probe.

Reproducibility contract: every estimate here is a pure function of its
RngConfig.  Randomness comes from Philox-4x64-10 counter streams keyed
by (seed, stream); work is cut into fixed-size chunks, chunk i drawing
from sub-stream stream + i (repeats of a simulation get lane offsets of
2^32), and partial results are reduced in chunk order.  Worker count
therefore never changes a printed value.  The exact generator and the
uniform-to-normal transform are written down in docs/rng.md.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg, series
from .errors import InputError

__all__ = [
    "RngConfig",
    "McEstimate",
    "RandomStream",
    "ConjectureProbe",
    "sample_projective_uniform",
    "sample_haar_so",
    "mc_r_nu",
    "fk_simulate",
    "conjecture_probe",
]

_MASK64 = (1 << 64) - 1
_CHUNK = 1 << 16
_LANE = 1 << 32
_NORM_FLOOR = 1e-150


@dataclass(frozen=True)
class RngConfig:
    """Names a reproducible randomness source.

    seed selects the experiment, stream the starting sub-stream; both
    are 64-bit.  Operations derive chunk sub-streams by offsetting
    stream, so callers wanting independent runs should vary seed.
    """

    seed: int = 0
    stream: int = 0


@dataclass(frozen=True)
class McEstimate:
    """Sample mean, its standard error, and the sample count.

    std_error is the sample standard deviation over sqrt(n); it is 0 for
    exact (fully enumerated) averages, which may have n = 1.
    """

    mean: float
    std_error: float
    n: int


class ConjectureProbe(NamedTuple):
    lhs: McEstimate
    rhs: "series.SeriesResult"
    margin: float
    discarded: int


class RandomStream:
    """Deterministic uniform/normal source on one Philox sub-stream.

    The bit source is Philox-4x64-10 keyed by (seed, stream) with the
    counter starting at zero.  A uniform double is (word >> 11) * 2^-53
    from the next 64-bit word.  Normals come from the polar rejection
    method applied to consecutive uniform pairs; surplus normals are
    buffered and served first on the next request.  See docs/rng.md for
    the full layout.
    """

    def __init__(self, seed, stream=0):
        if isinstance(seed, RngConfig):
            seed, stream = seed.seed, seed.stream
        key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
        self._bits = np.random.Philox(key=key)
        self._pending = None

    def uniforms(self, n):
        """Next n uniform doubles in [0, 1)."""
        if n == 0:
            return np.empty(0)
        raw = self._bits.random_raw(n)
        return (raw >> np.uint64(11)) * 2.0**-53

    def normals(self, n):
        """Next n standard normals, polar method, pair order preserved."""
        out = np.empty(n)
        pos = 0
        if self._pending is not None:
            take = min(len(self._pending), n)
            out[:take] = self._pending[:take]
            self._pending = self._pending[take:] if take < len(self._pending) else None
            pos = take
        while pos < n:
            pairs = (n - pos + 1) // 2
            u = self.uniforms(2 * pairs).reshape(pairs, 2)
            v = 2.0 * u - 1.0
            s = (v * v).sum(axis=1)
            keep = (s > 0.0) & (s < 1.0)
            vk = v[keep]
            sk = s[keep]
            f = np.sqrt(-2.0 * np.log(sk) / sk)
            z = (vk * f[:, None]).ravel()
            take = min(len(z), n - pos)
            out[pos : pos + take] = z[:take]
            pos += take
            if len(z) > take:
                self._pending = z[take:]
        return out

    def indices(self, cumulative, n):
        """n weighted picks against a cumulative weight vector."""
        u = self.uniforms(n)
        idx = np.searchsorted(cumulative, u, side="right")
        return np.minimum(idx, len(cumulative) - 1)


def _as_stream(rng, lane=0, chunk=0):
    if isinstance(rng, RandomStream):
        return rng
    return RandomStream(rng.seed, (rng.stream + lane * _LANE + chunk) & _MASK64)


def _chunks(total, size=_CHUNK):
    i = 0
    done = 0
    while done < total:
        count = min(size, total - done)
        yield i, count
        i += 1
        done += count


def _canonical_rows(x):
    """Flip rows in place so the first nonzero coordinate is positive."""
    nz = x != 0.0
    first = np.argmax(nz, axis=1)
    lead = np.take_along_axis(x, first[:, None], axis=1)[:, 0]
    x[lead < 0.0] *= -1.0
    return x


def _projective_batch(stream, count, d):
    """Uniform points on P^(d-1), canonical representatives, one batch."""
    z = stream.normals(count * d).reshape(count, d)
    norms = np.sqrt((z * z).sum(axis=1))
    while np.any(norms < _NORM_FLOOR):
        bad = norms < _NORM_FLOOR
        z[bad] = stream.normals(int(bad.sum()) * d).reshape(-1, d)
        norms = np.sqrt((z * z).sum(axis=1))
    x = z / norms[:, None]
    return _canonical_rows(x)


def _haar_batch(stream, count, d):
    """Haar-distributed SO(d) matrices, one batch."""
    a = stream.normals(count * d * d).reshape(count, d, d)
    q, _ = linalg._qr_batched(a)
    dets = linalg._det_batched(q)
    q[dets < 0.0, :, -1] *= -1.0
    return q


def sample_projective_uniform(d, rng, count=None):
    """Uniform points on P^(d-1) with canonical sign.

    Returns one point, or a (count, d) stack when count is given.  Pass
    a RandomStream for sequential draws; an RngConfig always starts at
    the head of its stream.
    """
    if d < 1:
        raise InputError(f"dimension must be positive, got {d}")
    if count is None:
        return _projective_batch(_as_stream(rng), 1, d)[0]
    if count < 1:
        raise InputError(f"count must be positive, got {count}")
    return _projective_batch(_as_stream(rng), count, d)


def sample_haar_so(d, rng, count=None):
    """Haar-distributed rotations from SO(d), one or a (count, d, d) stack.

    QR of a standard-normal matrix with the diagonal of R made positive;
    a determinant of -1 is repaired by negating the last column.
    """
    if d < 1:
        raise InputError(f"dimension must be positive, got {d}")
    if count is None:
        return _haar_batch(_as_stream(rng), 1, d)[0]
    if count < 1:
        raise InputError(f"count must be positive, got {count}")
    return _haar_batch(_as_stream(rng), count, d)


def _reduce_mean(sums, squares, counts):
    n = sum(counts)
    s1 = math.fsum(sums)
    s2 = math.fsum(squares)
    mean = s1 / n
    if n > 1:
        var = max(s2 - n * mean * mean, 0.0) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return mean, se, n


def _run_chunked(task, chunk_list, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(task, chunk_list))
    return [task(c) for c in chunk_list]


def mc_r_nu(g, nu, n, rng=RngConfig(), threads=1):
    """Monte Carlo (or exact, when possible) average of log||g x|| under nu.

    Uniform measures are sampled n points at a time in fixed chunks;
    finitely supported measures are integrated exactly over their atoms,
    with std_error 0 for the atomic kind.
    """
    g = linalg.as_square_matrix(g)
    kind = getattr(nu, "kind", None)
    if kind in ("atomic", "empirical"):
        y = np.asarray(nu.points, dtype=float) @ g.T
        logs = 0.5 * np.log((y * y).sum(axis=1))
        w = np.asarray(nu.weights, dtype=float)
        mean = float(w @ logs)
        if kind == "atomic":
            return McEstimate(mean, 0.0, len(logs))
        if len(logs) > 1:
            se = float(logs.std(ddof=1)) / math.sqrt(len(logs))
        else:
            se = 0.0
        return McEstimate(mean, se, len(logs))
    if kind != "uniform":
        raise InputError(f"cannot average over measure of kind {kind!r}")
    if n < 1:
        raise InputError(f"sample count must be positive, got {n}")
    d = g.shape[0]

    def task(chunk):
        i, count = chunk
        stream = _as_stream(rng, lane=0, chunk=i)
        x = _projective_batch(stream, count, d)
        y = x @ g.T
        logs = 0.5 * np.log((y * y).sum(axis=1))
        return float(logs.sum()), float((logs * logs).sum()), count

    results = _run_chunked(task, list(_chunks(n)), threads)
    mean, se, total = _reduce_mean(*zip(*results))
    return McEstimate(mean, se, total)


def _fk_one_repeat(ensemble, n_steps, burn_in, stream):
    from .measures import sample_matrix_batch

    d = ensemble.dim
    v = _projective_batch(stream, 1, d)[0]
    steps = burn_in + n_steps
    acc = 0.0
    done = 0
    while done < steps:
        count = min(_CHUNK, steps - done)
        mats = sample_matrix_batch(ensemble, stream, count)
        for i in range(count):
            w = mats[i] @ v
            norm = math.sqrt(float(w @ w))
            v = w / norm
            if done + i >= burn_in:
                acc += math.log(norm)
        done += count
    return acc / n_steps


def fk_simulate(
    ensemble, n_steps, rng=RngConfig(), repeats=4, burn_in=1000, threads=1
):
    """Top Lyapunov exponent by renormalized product iteration.

    Each repeat starts from its own uniform unit vector, applies matrices
    drawn from the ensemble, and averages the log norm growth over
    n_steps after discarding burn_in warm-up steps.  Returns the mean
    and standard error across repeats.  Repeats own disjoint sub-streams
    and are reduced in repeat order, so the thread count cannot change
    the result.
    """
    if n_steps < 1:
        raise InputError(f"need n_steps >= 1, got {n_steps}")
    if repeats < 2:
        raise InputError(f"need at least 2 repeats for a standard error, got {repeats}")
    if burn_in < 0:
        raise InputError(f"burn-in cannot be negative, got {burn_in}")

    def task(j):
        return _fk_one_repeat(ensemble, n_steps, burn_in, _as_stream(rng, lane=j))

    estimates = _run_chunked(task, list(range(repeats)), threads)
    mean = math.fsum(estimates) / repeats
    var = math.fsum((e - mean) ** 2 for e in estimates) / (repeats - 1)
    return McEstimate(mean, math.sqrt(var / repeats), repeats)


def conjecture_probe(
    g, n, rng=RngConfig(), threads=1, radius_tol=1e-9, params=None
):
    """Compare the Haar average of log rho(k g) against the series value.

    Returns (lhs, rhs, margin, discarded): lhs the Monte Carlo average of
    the log spectral radius over n Haar rotations, rhs the series value
    of the uniform average log norm, margin = lhs.mean - rhs.value.
    Draws whose spectral radius iteration does not settle are discarded
    and counted rather than aborting the probe.
    """
    import warnings

    g = linalg.as_square_matrix(g)
    d = g.shape[0]
    if d == 2:
        warnings.warn(
            "the spectral radius bound is already settled in dimension 2; "
            "probing anyway",
            UserWarning,
            stacklevel=2,
        )
    if n < 1:
        raise InputError(f"sample count must be positive, got {n}")
    if params is None:
        params = series.SeriesParams(tolerance=1e-10, max_order=200_000)
    rhs = series.r_uniform(linalg.singular_spectrum(g), params)

    def task(chunk):
        i, count = chunk
        stream = _as_stream(rng, lane=0, chunk=i)
        ks = _haar_batch(stream, count, d)
        rho, ok = linalg._spectral_radius_batched(ks @ g, radius_tol, 40)
        logs = np.log(rho[ok])
        return (
            float(logs.sum()),
            float((logs * logs).sum()),
            int(ok.sum()),
            int(count - ok.sum()),
        )

    results = _run_chunked(task, list(_chunks(n)), threads)
    sums, squares, kept, dropped = zip(*results)
    discarded = sum(dropped)
    if sum(kept) == 0:
        raise InputError("every spectral radius draw was discarded")
    mean, se, total = _reduce_mean(sums, squares, kept)
    lhs = McEstimate(mean, se, total)
    return ConjectureProbe(lhs, rhs, float(lhs.mean - rhs.value), discarded)
