"""Command-line front end."""
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ising_exact.cli import RunConfig, main
from ising_exact.errors import ParameterError
from ising_exact.series import RationalSeries


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_singularities_n3(capsys):
    code, out, _ = run(capsys, "singularities", "--n", "3")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "ising-exact/1"
    w = sorted(float(r["location"]) for r in doc["singularities"])
    assert w == pytest.approx([-0.5, 1.0], abs=1e-15)


def test_formfactor_series(capsys):
    code, out, _ = run(capsys, "formfactor", "--n", "1", "--N", "0", "--order", "6")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "ising-exact/1"
    assert Fraction(doc["offset"]) == 0 and Fraction(doc["coeffs"][0]) == 1
    s = RationalSeries.from_json(doc)
    assert s.coefficient(1) == Fraction(1, 4)


def test_formfactor_csv(capsys):
    code, out, _ = run(capsys, "--output-format", "csv", "formfactor", "--n", "1", "--N", "0", "--order", "4")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "exponent,coefficient" and lines[1] == "0,1"


def test_piii_csv(capsys):
    code, out, _ = run(capsys, "--output-format", "csv", "piii", "--lambda", "1", "--r", "1")
    assert code == 0 and out.count("\n") > 10


def test_correlate_and_chi(capsys):
    code, out, _ = run(capsys, "correlate", "--N", "1", "--t", "0.25")
    doc = json.loads(out)
    assert code == 0 and doc["value"]["precision_bits"] >= 64
    code, out, _ = run(capsys, "chi", "--kind", "diag", "--n", "2", "--order", "5")
    assert code == 0 and json.loads(out)["variable"] == "t"


def test_computation_error_exit_1(capsys):
    code, out, err = run(capsys, "correlate", "--N", "1", "--t", "1.5")
    assert code == 1 and out == ""
    doc = json.loads(err)
    assert doc["schema"] == "ising-exact/1" and "error" in doc


def test_usage_errors_exit_2(capsys):
    for argv in (["bogus"], ["formfactor", "--n", "1"], ["--prec", "8", "amplitudes"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_run_config_validation():
    with pytest.raises(ParameterError):
        RunConfig(precision_bits=16)
    with pytest.raises(ParameterError):
        RunConfig(output_format="xml")


def test_deterministic_output():
    cmd = [sys.executable, "-m", "ising_exact.cli", "lambda", "--N", "1", "--lambda", "1/2", "--t", "0.3"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


def test_ode_fit_round_trip(tmp_path, capsys):
    s = RationalSeries.hypergeometric([Fraction(1, 2), Fraction(1, 2)], [1], 40)
    path = tmp_path / "k.json"
    path.write_text(s.dumps())
    code, out, _ = run(capsys, "ode-fit", "--input", str(path), "--max-order", "3", "--max-degree", "3", "--lift")
    doc = json.loads(out)
    assert code == 0 and doc["order"] == 2 and doc["p"] is None
    code, _, err = run(capsys, "ode-fit", "--input", str(tmp_path / "missing.json"),
                       "--max-order", "2", "--max-degree", "2")
    assert code == 1 and json.loads(err)["error"] == "io"


def test_acceptance_exit_codes(capsys):
    code, out, _ = run(capsys, "acceptance", "--only", "4")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["criteria"][0]["number"] == 4
    code, out, _ = run(capsys, "--output-format", "csv", "acceptance", "--only", "3", "4")
    assert code == 0 and out.startswith("criterion,title,passed")
