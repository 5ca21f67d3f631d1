"""Shared generators for the test suite.

Random matrices are built from numpy's own SVD-free primitives
(default_rng normals, linalg.qr, linalg.svd) so they stay independent
of the package's hand-rolled linear algebra.
"""

import numpy as np
import pytest


def random_sl(rng, d, spread=0.5):
    """A random matrix with |det| = 1 and moderate conditioning."""
    g = rng.normal(size=(d, d), scale=1.0)
    g = g + np.eye(d) * spread
    det = np.linalg.det(g)
    while abs(det) < 1e-6:
        g = rng.normal(size=(d, d))
        det = np.linalg.det(g)
    return g / abs(det) ** (1.0 / d)


def spectrum_with_alpha(rng, d, alpha_max):
    """Ascending singular values with product 1 and contraction <= alpha_max.

    The contraction of the balanced scale is
    (s_max^2 - s_min^2) / (s_max^2 + s_min^2), an increasing function of
    the extreme ratio, so capping the ratio caps the contraction.
    """
    ratio_cap = np.sqrt((1.0 + alpha_max) / (1.0 - alpha_max))
    log_cap = 0.5 * np.log(ratio_cap)
    logs = rng.uniform(-log_cap, log_cap, size=d)
    logs -= logs.mean()
    return np.sort(np.exp(logs))


def sl_with_alpha(rng, d, alpha_max):
    """Random |det| = 1 matrix whose balanced contraction is <= alpha_max."""
    values = spectrum_with_alpha(rng, d, alpha_max)
    u, _ = np.linalg.qr(rng.normal(size=(d, d)))
    v, _ = np.linalg.qr(rng.normal(size=(d, d)))
    return (u * values) @ v.T


def alpha_of(values):
    """Balanced-scale contraction of an ascending singular value array."""
    lo, hi = values[0] ** 2, values[-1] ** 2
    return (hi - lo) / (hi + lo)


@pytest.fixture
def nprng():
    return np.random.default_rng(20260817)
