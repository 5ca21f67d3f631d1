import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projlyap.errors import (
    InputError,
    InvalidLambdaStar,
    NotSymmetric,
    UnsupportedMeasure,
)
from projlyap.linalg import SingularSpectrum, singular_spectrum
from projlyap.measures import ProjectiveMeasure
from projlyap.series import (
    SeriesParams,
    choose_lambda_star,
    quadratic_form_moment,
    r_measure,
    r_uniform,
)

from conftest import random_sl, sl_with_alpha, spectrum_with_alpha

LOG_5_4 = 0.22314355131420976


def circle_average(t):
    """Average of log ||diag(t, 1/t) x|| over the unit circle."""
    return math.log((t + 1.0 / t) / 2.0)


def test_choose_lambda_star_balanced_midpoint():
    assert choose_lambda_star([0.5, 2.0]) == pytest.approx(
        math.sqrt(17.0 / 8.0), rel=1e-15
    )


def test_frozen_two_by_two():
    spec = singular_spectrum(np.diag([2.0, 0.5]))
    res = r_uniform(spec, SeriesParams(tolerance=1e-14, max_order=500))
    assert res.alpha == pytest.approx(15.0 / 17.0, rel=1e-15)
    assert res.lambda_star == pytest.approx(math.sqrt(17.0 / 8.0), rel=1e-15)
    assert res.value == pytest.approx(LOG_5_4, abs=5e-14)
    assert res.converged
    assert res.tail_bound <= 1e-14


def test_closed_form_circle_integrals():
    for t in (1.5, 2.0, 5.0):
        spec = singular_spectrum(np.diag([t, 1.0 / t]))
        res = r_uniform(spec, SeriesParams(tolerance=1e-13, max_order=20_000))
        assert res.converged
        assert res.value == pytest.approx(circle_average(t), abs=1e-12)


def test_accepts_bare_value_array():
    res = r_uniform(np.array([0.5, 2.0]), SeriesParams(max_order=500))
    assert res.value == pytest.approx(LOG_5_4, abs=1e-11)


def test_identity_spectrum_is_exact_zero():
    res = r_uniform(np.ones(4))
    assert res.value == 0.0
    assert res.converged
    assert res.orders_used == 0
    assert res.tail_bound == 0.0


def test_equal_values_shortcut():
    res = r_uniform(np.full(3, 2.0))
    assert res.value == pytest.approx(math.log(2.0), rel=1e-15)
    assert res.converged


def test_enumerate_recurrence_agree(nprng):
    for d in (2, 3, 4):
        for _ in range(5):
            values = spectrum_with_alpha(nprng, d, 0.85)
            a = r_uniform(
                values, SeriesParams(tolerance=1e-13, method="enumerate", max_order=400)
            )
            b = r_uniform(
                values, SeriesParams(tolerance=1e-13, method="recurrence", max_order=400)
            )
            assert a.converged and b.converged
            assert a.value == pytest.approx(b.value, rel=1e-13, abs=1e-14)


def test_custom_lambda_star_gives_same_value():
    values = np.array([0.6, 1.1, 1.9])
    base = r_uniform(values, SeriesParams(tolerance=1e-13, max_order=2000))
    other = r_uniform(
        values,
        SeriesParams(lambda_star=1.7, tolerance=1e-13, max_order=2000),
    )
    assert other.lambda_star == 1.7
    assert other.value == pytest.approx(base.value, abs=1e-12)


def test_invalid_lambda_star_rejected():
    values = np.array([0.5, 2.0])
    with pytest.raises(InvalidLambdaStar):
        r_uniform(values, SeriesParams(lambda_star=2.0 / math.sqrt(2.0) * 0.99))
    with pytest.raises(InvalidLambdaStar):
        r_uniform(values, SeriesParams(lambda_star=-1.0))


def test_unconverged_flag_without_exception():
    values = np.array([0.2, 5.0])
    res = r_uniform(values, SeriesParams(tolerance=1e-12, max_order=5))
    assert not res.converged
    assert res.tail_bound > 1e-12
    assert math.isfinite(res.value)


def test_tail_bound_is_honest():
    values = np.array([0.5, 2.0])
    precise = r_uniform(values, SeriesParams(tolerance=1e-15, max_order=2000))
    rough = r_uniform(values, SeriesParams(tolerance=1e-6, max_order=2000))
    assert rough.converged
    assert abs(rough.value - precise.value) <= rough.tail_bound


def test_rejects_bad_spectra():
    with pytest.raises(InputError):
        r_uniform(np.array([2.0, 0.5]))  # descending
    with pytest.raises(InputError):
        r_uniform(np.array([0.0, 1.0]))
    with pytest.raises(InputError):
        r_uniform(np.array([-1.0, 1.0]))


@given(st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=20, deadline=None)
def test_scaling_shifts_by_log(c):
    values = np.array([0.8, 1.25])
    base = r_uniform(values, SeriesParams(tolerance=1e-13, max_order=2000))
    scaled = r_uniform(values * c, SeriesParams(tolerance=1e-13, max_order=2000))
    assert scaled.value - base.value == pytest.approx(math.log(c), abs=1e-11)


def test_r_measure_uniform_delegates():
    g = np.diag([2.0, 0.5])
    nu = ProjectiveMeasure.uniform(2)
    a = r_measure(g, nu, SeriesParams(max_order=500))
    b = r_uniform(singular_spectrum(g), SeriesParams(max_order=500))
    assert a.value == b.value


def test_r_measure_atomic_matches_direct_average(nprng):
    for method in ("recurrence", "enumerate", "auto"):
        g = sl_with_alpha(nprng, 3, 0.9)
        pts = nprng.normal(size=(4, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        w = nprng.uniform(0.5, 1.5, size=4)
        w /= w.sum()
        nu = ProjectiveMeasure.atomic(pts, w)
        res = r_measure(
            g, nu, SeriesParams(tolerance=1e-12, max_order=5000, method=method)
        )
        exact = math.fsum(
            wi * math.log(np.linalg.norm(g @ x)) for wi, x in zip(w, pts)
        )
        assert res.converged
        assert res.value == pytest.approx(exact, abs=5e-12)


def test_r_measure_empirical_support(nprng):
    g = random_sl(nprng, 2)
    pts = nprng.normal(size=(50, 2))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    nu = ProjectiveMeasure.empirical(pts)
    res = r_measure(g, nu, SeriesParams(tolerance=1e-11, max_order=5000))
    exact = np.mean([math.log(np.linalg.norm(g @ x)) for x in pts])
    assert res.value == pytest.approx(exact, abs=1e-10)


def test_r_measure_dimension_mismatch():
    g = np.diag([2.0, 0.5])
    nu = ProjectiveMeasure.uniform(3)
    with pytest.raises(InputError, match="2.*3|3.*2"):
        r_measure(g, nu)


def test_quadratic_form_moment_uniform_exact():
    # a = identity: the form is 1 on the sphere, so every moment is 1.
    nu = ProjectiveMeasure.uniform(3)
    for r in (0, 1, 2, 5):
        assert quadratic_form_moment(np.eye(3), nu, r) == pytest.approx(
            1.0, rel=1e-13
        )
    # a = diag(l1, l2): first moment is (l1 + l2) / 2 on the circle.
    a = np.diag([3.0, 1.0])
    nu2 = ProjectiveMeasure.uniform(2)
    assert quadratic_form_moment(a, nu2, 1) == pytest.approx(2.0, rel=1e-13)


def test_quadratic_form_moment_uniform_mc_oracle(nprng):
    a_half = nprng.normal(size=(3, 3))
    a = a_half.T @ a_half + np.eye(3)
    nu = ProjectiveMeasure.uniform(3)
    x = nprng.normal(size=(400_000, 3))
    x /= np.linalg.norm(x, axis=1)[:, None]
    forms = np.einsum("ni,ij,nj->n", x, a, x)
    for r in (1, 2, 3):
        sample = float(np.mean(forms**r))
        got = quadratic_form_moment(a, nu, r)
        se = float(np.std(forms**r) / math.sqrt(len(x)))
        assert abs(got - sample) < 5.0 * se


def test_quadratic_form_moment_atomic_exact(nprng):
    a_half = nprng.normal(size=(2, 2))
    a = a_half.T @ a_half
    pts = nprng.normal(size=(3, 2))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    w = np.array([0.2, 0.3, 0.5])
    nu = ProjectiveMeasure.atomic(pts, w)
    for r in (1, 2, 4):
        exact = math.fsum(
            wi * float(x @ a @ x) ** r for wi, x in zip(w, pts)
        )
        assert quadratic_form_moment(a, nu, r) == pytest.approx(exact, rel=1e-12)


def test_quadratic_form_moment_rejects_asymmetric():
    nu = ProjectiveMeasure.uniform(2)
    with pytest.raises(NotSymmetric):
        quadratic_form_moment(np.array([[1.0, 1.0], [0.0, 1.0]]), nu, 1)
