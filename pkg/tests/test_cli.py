import json
import math

import numpy as np
import pytest

from projlyap.cli import main
from projlyap.linalg import write_matrix
from projlyap.measures import MatrixEnsemble, write_ensemble, write_measure
from projlyap.measures import ProjectiveMeasure

LOG_5_4 = 0.22314355131420976


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "g.txt"
    write_matrix(path, np.diag([2.0, 0.5]))
    return str(path)


@pytest.fixture
def identity_file(tmp_path):
    path = tmp_path / "eye.txt"
    write_matrix(path, np.eye(3))
    return str(path)


@pytest.fixture
def ensemble_file(tmp_path):
    path = tmp_path / "ens.txt"
    write_ensemble(path, MatrixEnsemble.rotation_averaged(np.diag([2.0, 0.5])))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_rm_identity_matrix(capsys, identity_file):
    code = main(["rm", "--matrix", identity_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "value = 0" in out
    assert "converged = true" in out


def test_rm_text_has_twelve_digit_floats(capsys, matrix_file):
    code = main(["rm", "--matrix", matrix_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "value = 0.223143551314" in out
    assert "alpha = 0.882352941176" in out


def test_rm_json_fields_and_values(capsys, matrix_file):
    code, payload = run_json(capsys, ["--json", "rm", "--matrix", matrix_file])
    assert code == 0
    assert set(payload) == {
        "value",
        "orders_used",
        "alpha",
        "tail_bound",
        "lambda_star",
        "converged",
    }
    assert payload["converged"] is True
    assert abs(payload["value"] - LOG_5_4) < 1e-11
    assert payload["alpha"] == pytest.approx(15.0 / 17.0, rel=1e-15)


def test_rm_json_reproduces_bitwise(capsys, matrix_file):
    main(["--json", "rm", "--matrix", matrix_file])
    first = capsys.readouterr().out
    main(["--json", "rm", "--matrix", matrix_file])
    second = capsys.readouterr().out
    assert first == second


def test_rm_unconverged_exits_three(capsys, matrix_file):
    code = main(["rm", "--matrix", matrix_file, "--max-order", "3"])
    out = capsys.readouterr().out
    assert code == 3
    assert "converged = false" in out


def test_rm_missing_file_exits_two(capsys, tmp_path):
    code = main(["rm", "--matrix", str(tmp_path / "absent.txt")])
    err = capsys.readouterr().err
    assert code == 2
    assert "error" in err


def test_rm_bad_lambda_star_flag(capsys, matrix_file):
    code = main(["rm", "--matrix", matrix_file, "--lambda-star", "wide"])
    assert code == 2
    code = main(["rm", "--matrix", matrix_file, "--lambda-star", "0.1"])
    assert code == 2


def test_rnu_runs_on_measure_file(capsys, matrix_file, tmp_path):
    nu_path = tmp_path / "nu.txt"
    write_measure(
        nu_path,
        ProjectiveMeasure.atomic([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5]),
    )
    code, payload = run_json(
        capsys, ["--json", "rnu", "--matrix", matrix_file, "--measure", str(nu_path)]
    )
    assert code == 0
    expect = 0.5 * math.log(2.0) + 0.5 * math.log(0.5)
    assert payload["value"] == pytest.approx(expect, abs=1e-11)


def test_rnu_dimension_mismatch_names_both(capsys, matrix_file, tmp_path):
    nu_path = tmp_path / "nu3.txt"
    write_measure(
        nu_path,
        ProjectiveMeasure.atomic([[1.0, 0.0, 0.0]], [1.0]),
    )
    code = main(["rnu", "--matrix", matrix_file, "--measure", str(nu_path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "2" in err and "3" in err


def test_oracle_rnu_echoes_seed(capsys, matrix_file):
    code, payload = run_json(
        capsys,
        ["--json", "--seed", "11", "oracle", "rnu", "--matrix", matrix_file,
         "--samples", "50000"],
    )
    assert code == 0
    assert payload["seed"] == 11
    assert payload["n"] == 50000
    assert abs(payload["mean"] - LOG_5_4) < 5.0 * payload["std_error"]


def test_oracle_rnu_thread_invariance(capsys, matrix_file):
    args = ["--json", "oracle", "rnu", "--matrix", matrix_file, "--samples", "60000"]
    main(args + ["--threads", "1"][:0])  # default threads
    first = capsys.readouterr().out
    main(["--threads", "4"] + args)
    second = capsys.readouterr().out
    assert first == second


def test_family_t_point(capsys):
    code, payload = run_json(
        capsys, ["--json", "lyap", "family-t", "--half-dim", "1", "--t", "2.0"]
    )
    assert code == 0
    assert payload["value"] == pytest.approx(LOG_5_4, abs=1e-12)


def test_family_t_range_writes_csv(capsys, tmp_path):
    out = tmp_path / "fam.csv"
    code = main(
        ["lyap", "family-t", "--half-dim", "2", "--t-min", "1", "--t-max", "3",
         "--steps", "5", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,lambda_d2"
    assert len(lines) == 6
    assert float(lines[1].split(",")[1]) == 0.0


def test_family_t_range_needs_out(capsys):
    code = main(["lyap", "family-t", "--half-dim", "2"])
    err = capsys.readouterr().err
    assert code == 2
    assert "--out" in err


def test_lyap_pair_inverse_is_zero(capsys, tmp_path, nprng):
    from conftest import random_sl

    g = random_sl(nprng, 3)
    left = tmp_path / "left.txt"
    right = tmp_path / "right.txt"
    write_matrix(left, np.linalg.inv(g))
    write_matrix(right, g)
    code, payload = run_json(
        capsys,
        ["--json", "lyap", "pair", "--left", str(left), "--right", str(right)],
    )
    assert code == 0
    assert abs(payload["value"]) < 1e-10


def test_lyap_product_command(capsys, tmp_path):
    mu = tmp_path / "mu.txt"
    mu.write_text("atom 0.5\n2\n2 0\n0 0.5\natom 0.5\n2\n0.5 0\n0 2\n")
    code, payload = run_json(
        capsys, ["--json", "lyap", "product", "--mu1", str(mu), "--mu2", str(mu)]
    )
    assert code == 0
    assert payload["value"] > 0.0


def test_simulate_fk_echoes_seed(capsys, ensemble_file):
    code, payload = run_json(
        capsys,
        ["--json", "--seed", "7", "simulate", "fk", "--ensemble", ensemble_file,
         "--steps", "20000", "--repeats", "3", "--burn-in", "200"],
    )
    assert code == 0
    assert payload["seed"] == 7
    assert payload["n"] == 3
    assert abs(payload["mean"] - LOG_5_4) < 6.0 * payload["std_error"]


def test_conjecture_command(capsys, tmp_path, nprng):
    from conftest import sl_with_alpha

    path = tmp_path / "g3.txt"
    write_matrix(path, sl_with_alpha(nprng, 3, 0.8))
    code, payload = run_json(
        capsys,
        ["--json", "--seed", "5", "conjecture", "--matrix", str(path),
         "--samples", "2000"],
    )
    assert code == 0
    assert payload["seed"] == 5
    assert payload["discarded"] == 0
    assert payload["margin"] == pytest.approx(
        payload["lhs_mean"] - payload["rhs_value"], abs=1e-15
    )


def test_figure1_command(capsys, tmp_path):
    out = tmp_path / "fig.csv"
    code, payload = run_json(
        capsys, ["--json", "figure1", "--out", str(out), "--steps", "6"]
    )
    assert code == 0
    assert payload["rows"] == 6
    lines = out.read_text().splitlines()
    assert lines[0] == "t,lambda_d1,lambda_d2,lambda_d3,lambda_d4,limit"
    assert len(lines) == 7


def test_momenta_stationary_command(capsys, ensemble_file):
    code, payload = run_json(
        capsys,
        ["--json", "--seed", "3", "momenta", "stationary", "--ensemble",
         ensemble_file, "--burn-in", "200", "--samples", "3000", "--order", "2"],
    )
    assert code == 0
    assert payload["seed"] == 3
    assert set(payload["momenta"]) == {"2,0", "1,1", "0,2"}
    assert payload["residual"] < 0.1
    total = sum(payload["momenta"].values())
    assert total == pytest.approx(1.0, abs=1e-12)


def test_momenta_text_output(capsys, ensemble_file):
    code = main(
        ["momenta", "stationary", "--ensemble", ensemble_file, "--burn-in",
         "100", "--samples", "1000", "--order", "1"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "seed = 0" in out
    assert "(1,0) =" in out
    assert "residual =" in out
