import csv
import io
import json
import subprocess
import sys

import mpmath
import pytest

from cyclocond import cli
from cyclocond.mpnum import PrecisionExhaustedError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_phi_plus_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "phi-plus", "--n", "12")
    assert code == 0
    assert json.loads(out)["coeffs"] == ["-3", "0", "1"]


def test_phi_pretty_and_global_after_subcommand(capsys):
    code, out, _ = run(capsys, "phi", "--n", "2", "--format", "json")
    assert code == 0 and json.loads(out)["coeffs"] == ["1", "1"]
    code, out, _ = run(capsys, "phi", "--n", "2")
    assert out.strip() == "Phi(2) = x + 1"


@pytest.mark.parametrize("argv", [
    ("phi-plus", "--n", "4"),
    ("phi", "--n", "0"),
    ("verify", "--p", "4"),
    ("noise", "--p", "2"),
    ("cond", "--target", "quasi", "--n", "13"),
    ("--precision", "20", "phi", "--n", "3"),
    ("table", "--primes", "13,15"),
    ("nonsense",),
])
def test_bad_input_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_cond_quasi(capsys):
    code, out, _ = run(capsys, "--format", "json", "cond", "--target", "quasi", "--p", "13")
    rep = json.loads(out)["reports"][0]
    assert code == 0
    assert abs(mpmath.mpf(rep["cond"]) / mpmath.mpf("25.92") - 1) < 0.01
    assert rep["bound_satisfied"] is True


def test_cond_kuian_and_cyclotomic(capsys):
    _, out, _ = run(capsys, "--format", "json", "cond", "--target", "kuian", "--n", "2")
    assert abs(mpmath.mpf(json.loads(out)["reports"][0]["cond"]) - 2) < 1e-60
    _, out, _ = run(capsys, "--format", "json", "cond", "--target", "vandermonde-cyclotomic", "--n", "16")
    assert abs(mpmath.mpf(json.loads(out)["reports"][0]["cond"]) - 8) < 1e-60


def test_cond_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "cond", "--target", "vandermonde-real", "--p", "13")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["p", "matrix_name", "cond", "bound", "satisfied"]
    assert rows[1][0] == "13" and rows[1][4] == "True"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--p", "13")
    assert code == 0 and "6 reports, 0 violated" in out
    code, out, _ = run(capsys, "--format", "json", "verify", "--range", "5..101")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["reports"]) == 6 * len(doc["primes"]) and doc["primes"][0] == 5 and doc["primes"][-1] == 101


def test_verify_violation_exit_1(capsys, monkeypatch):
    from cyclocond import construct
    real = construct.verify_bounds

    def broken(p, precision, fact=None):
        return [r.with_bounds(bound=1) for r in real(p, precision, fact)]

    monkeypatch.setattr(construct, "verify_bounds", broken)
    code, out, _ = run(capsys, "verify", "--p", "5")
    assert code == 1 and "VIOLATED" in out


def test_numerical_failure_exit_3(capsys, monkeypatch):
    from cyclocond import construct

    def boom(p, precision):
        raise PrecisionExhaustedError("escalation exhausted")

    monkeypatch.setattr(construct, "cond_vandermonde_real", boom)
    code, _, err = run(capsys, "cond", "--target", "vandermonde-real", "--p", "13")
    assert code == 3 and "numerical failure" in err


def test_factor_dump(capsys):
    code, out, _ = run(capsys, "--format", "json", "factor", "--p", "5")
    doc = json.loads(out)
    assert code == 0
    for key in ("Q4p", "F", "C", "M4p", "N4p", "P", "U4p", "epsilon", "r_vector", "residual_FQC", "residual_PU"):
        assert key in doc
    assert doc["U4p"]["rows"] == 4 and doc["epsilon"] == 2


def test_noise_deterministic_json(capsys):
    argv = ("--format", "json", "noise", "--p", "13", "--sigma", "3.2", "--trials", "300", "--seed", "7")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    doc = json.loads(a)
    assert mpmath.mpf(doc["forward"]["max_ratio"]) <= mpmath.mpf(doc["u_frobenius"])
    assert doc["params"]["seed"] == 7 and doc["params"]["q"] % 52 == 1


def test_noise_dump_trials_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "noise", "--p", "5", "--trials", "30", "--dump-trials")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["trial", "error_norm_sq", "u_forward", "u_inverse", "v_forward", "v_inverse"]
    assert 1 < len(rows) <= 31


def test_precision_env_and_flag(capsys, monkeypatch):
    monkeypatch.setenv("CYCLOCOND_PRECISION", "128")
    _, out, _ = run(capsys, "--format", "json", "cond", "--target", "quasi", "--p", "5")
    assert json.loads(out)["reports"][0]["precision_used"] == 128
    _, out, _ = run(capsys, "--format", "json", "--precision", "192", "cond", "--target", "quasi", "--p", "5")
    assert json.loads(out)["reports"][0]["precision_used"] == 192
    monkeypatch.setenv("CYCLOCOND_PRECISION", "bogus")
    assert run(capsys, "phi", "--n", "3")[0] == 2


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "--format", "json", "--output", str(target), "phi", "--n", "12")
    assert code == 0 and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["coeffs"] == ["1", "0", "-1", "0", "1"]


def test_table_single_row(capsys):
    code, out, _ = run(capsys, "--format", "json", "table", "--primes", "13", "--half-scale")
    row = json.loads(out)["rows"][0]
    assert code == 0
    assert row["degree"] == 12 and row["bound_4p6"] == "19307236"
    assert abs(mpmath.mpf(row["cond_U"]) / mpmath.mpf("25.92") - 1) < 0.01
    assert abs(mpmath.mpf(row["cond_V_half"]) / mpmath.mpf("1.43e4") - 1) < 0.02


def test_entry_point_subprocess():
    res = subprocess.run([sys.executable, "-m", "cyclocond.cli", "phi-plus", "--n", "20", "--format", "csv"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines() == ["degree,coeff", "0,5", "1,0", "2,-5", "3,0", "4,1"]
