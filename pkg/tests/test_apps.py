import csv
import math

import numpy as np
import pytest

from projlyap.apps import (
    figure1_data,
    figure_grid,
    lambda_family_limit,
    lambda_family_t,
    lambda_product,
    write_figure_csv,
)
from projlyap.errors import BudgetExceeded, InputError
from projlyap.linalg import singular_spectrum
from projlyap.series import SeriesParams, r_uniform

from conftest import random_sl

LOG_5_4 = 0.22314355131420976
LIMIT_AT_2 = 0.37688590118819004


def family_matrix(half_dim, t):
    return np.diag([t] * half_dim + [1.0 / t] * half_dim)


def test_family_frozen_values():
    point = lambda_family_t(1, 2.0)
    assert point.value == pytest.approx(LOG_5_4, abs=1e-13)
    assert point.half_dim == 1 and point.t == 2.0
    assert point.tail_bound < 1e-12


def test_family_at_one_is_zero():
    point = lambda_family_t(3, 1.0)
    assert point.value == 0.0
    assert point.tail_bound == 0.0


def test_family_rejects_bad_parameters():
    with pytest.raises(InputError):
        lambda_family_t(0, 2.0)
    with pytest.raises(InputError):
        lambda_family_t(1, 0.5)


def test_family_half_dim_one_closed_form():
    for t in (1.3, 2.0, 4.0):
        expect = math.log((t + 1.0 / t) / 2.0)
        assert lambda_family_t(1, t).value == pytest.approx(expect, abs=1e-12)


def test_family_matches_spectrum_series():
    for half_dim, t in [(1, 1.2), (2, 2.0), (3, 5.0)]:
        fam = lambda_family_t(half_dim, t, tolerance=1e-12)
        spec = singular_spectrum(family_matrix(half_dim, t))
        direct = r_uniform(spec, SeriesParams(tolerance=1e-12, max_order=100_000))
        assert direct.converged
        assert fam.value == pytest.approx(direct.value, abs=1e-10)


def test_family_tail_bound_is_honest():
    rough = lambda_family_t(2, 3.0, tolerance=1e-6)
    fine = lambda_family_t(2, 3.0, tolerance=1e-14)
    assert abs(rough.value - fine.value) <= rough.tail_bound


def test_family_limit_values():
    assert lambda_family_limit(1.0) == pytest.approx(0.0, abs=1e-15)
    assert lambda_family_limit(2.0) == pytest.approx(LIMIT_AT_2, abs=1e-15)
    # Large t: limit approaches log t - (1/2) log 2 from above.
    t = 1e6
    assert lambda_family_limit(t) - (math.log(t) - 0.5 * math.log(2.0)) == (
        pytest.approx(0.0, abs=1e-12)
    )


def test_family_increases_with_dimension_below_limit():
    for t in (1.5, 3.0, 6.0):
        values = [lambda_family_t(d, t).value for d in range(1, 9)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert values[-1] < lambda_family_limit(t)


def test_product_formula_identity_cases(nprng):
    g = random_sl(nprng, 3)
    direct = r_uniform(
        singular_spectrum(g), SeriesParams(tolerance=1e-12, max_order=200_000)
    ).value
    # Left identity: the rotation sandwich reduces to the plain average.
    assert lambda_product([(1.0, np.eye(3))], [(1.0, g)]) == pytest.approx(
        direct, abs=1e-12
    )
    # Inverse pair: supported on a compact group, exponent zero.
    assert lambda_product([(1.0, np.linalg.inv(g))], [(1.0, g)]) == (
        pytest.approx(0.0, abs=1e-10)
    )


def test_product_formula_family_identity():
    # delta_{g_s} * haar * delta_{g_t} has the exponent of g_{s t}.
    s, t = 1.5, 2.0
    value = lambda_product(
        [(1.0, family_matrix(2, s))], [(1.0, family_matrix(2, t))]
    )
    assert value == pytest.approx(lambda_family_t(2, s * t).value, abs=1e-10)


def test_product_formula_weight_validation():
    with pytest.raises(InputError):
        lambda_product([(0.5, np.eye(2))], [(1.0, np.eye(2))])
    with pytest.raises(InputError, match="dimension"):
        lambda_product([(1.0, np.eye(2))], [(1.0, np.eye(3))])


def test_product_formula_budget_error_names_term():
    wide = np.diag([8.0, 1.0 / 8.0])
    with pytest.raises(BudgetExceeded, match="left 0, right 0"):
        lambda_product(
            [(1.0, wide)],
            [(1.0, wide)],
            SeriesParams(tolerance=1e-12, max_order=10),
        )


def test_figure_grid_validation():
    grid = figure_grid(1.0, 6.0, 11)
    assert len(grid) == 11
    assert grid[0] == 1.0 and grid[-1] == 6.0
    assert len(figure_grid(2.0, 2.0, 1)) == 1
    with pytest.raises(InputError):
        figure_grid(0.5, 6.0, 10)
    with pytest.raises(InputError):
        figure_grid(3.0, 2.0, 10)
    with pytest.raises(InputError):
        figure_grid(1.0, 6.0, 0)


def test_figure1_data_shape_and_first_row():
    header, rows = figure1_data(figure_grid(1.0, 4.0, 7))
    assert header == [
        "t",
        "lambda_d1",
        "lambda_d2",
        "lambda_d3",
        "lambda_d4",
        "limit",
    ]
    assert len(rows) == 7
    assert np.array_equal(rows[0], [1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    for row in rows[1:]:
        # Columns ascend with the half-dimension and stay below the limit.
        assert all(b > a for a, b in zip(row[1:], row[2:]))


def test_write_figure_csv_round_trip(tmp_path):
    header, rows = figure1_data(figure_grid(1.0, 2.0, 3))
    path = tmp_path / "fig.csv"
    write_figure_csv(path, header, rows)
    with open(path) as fh:
        parsed = list(csv.reader(fh))
    assert parsed[0] == header
    assert len(parsed) == 4
    for text_row, row in zip(parsed[1:], rows):
        for text, value in zip(text_row, row):
            assert float(text) == pytest.approx(value, rel=1e-11)
