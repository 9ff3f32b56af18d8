"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import json
import math

import numpy as np
import pytest

from helpers import four_point_sample
from tscatter.counterexample import make_Qk
from tscatter.model import Sample
from tscatter.run import COMMANDS, Result, write_sample_csv
from tscatter.run.__main__ import main
from tscatter.run.results import MockCommand, format_float


def last_json(text):
    """Decode the JSON object on the last line of `text`."""
    return json.loads(text.strip().splitlines()[-1])


@pytest.fixture
def q_csv(tmp_path):
    """CSV file holding the first law of the second planar sequence."""
    path = tmp_path / "q.csv"
    write_sample_csv(path, make_Qk(1))
    return path


def test_commands():
    """Test that all commands are registered."""
    assert set(COMMANDS) == {
        "fit",
        "check-domain",
        "influence",
        "mc-normality",
        "equivariance-test",
        "counterexample",
        "gc-diagnostic",
    }


def test_fit(q_csv, capsys):
    """Test fitting a sample given as CSV file."""
    assert main(["fit", str(q_csv), "--nu", "2"]) == 0
    out, err = capsys.readouterr()
    assert err == ""
    report = json.loads(out)
    assert report["schema"] == "tscatter/1"
    assert report["command"] == "fit"
    assert report["config"]["nu"] == 2
    assert report["config"]["seed"] == 0
    np.testing.assert_allclose(report["result"]["mu"], [0, 0], atol=1e-9)
    np.testing.assert_allclose(
        report["result"]["sigma"], [[5 / 6, 0], [0, 1 / 6]], atol=1e-9
    )
    assert report["result"]["report"]["converged"]


def test_fit_scatter(tmp_path, capsys):
    """Test fitting the pure scatter functional."""
    path = tmp_path / "sample.csv"
    write_sample_csv(path, four_point_sample())
    assert main(["fit", str(path), "--nu", "1", "--functional", "scatter"]) == 0
    report = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(report["result"]["A"], 0.5 * np.eye(2), atol=1e-9)


def test_fit_deterministic(q_csv, tmp_path, capsys):
    """Test that repeated runs give identical reports."""
    outputs = []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        assert main(["fit", str(q_csv), "--nu", "3", "-o", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert capsys.readouterr().out == ""

    result = Result.from_file(tmp_path / "report0.json")
    assert result.command.name == "fit"
    assert result.parameters["nu"] == 3
    np.testing.assert_allclose(result.result["mu"], [0, 0], atol=1e-9)


def test_domain_violation(tmp_path, capsys):
    """Test the report of collinear data."""
    path = tmp_path / "line.csv"
    write_sample_csv(path, Sample([[0, 0], [1, 1], [2, 2], [3, 3]]))

    assert main(["fit", str(path), "--nu", "2"]) == 2
    out, err = capsys.readouterr()
    assert out == ""
    error = last_json(err)
    assert error["code"] == "domain_violation"
    assert len(error["witness"]) >= 2

    assert main(["check-domain", str(path), "--nu", "2"]) == 2
    assert "witness" in last_json(capsys.readouterr().err)


def test_check_domain(q_csv, capsys):
    """Test reporting the membership in the existence domain."""
    assert main(["check-domain", str(q_csv), "--nu", "2"]) == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert result["member"]
    assert result["affine"]
    assert [row["q"] for row in result["per_dimension"]] == [0, 1]


def test_no_convergence(q_csv, capsys):
    """Test the exit code of an iteration that stops too early."""
    assert main(["fit", str(q_csv), "--nu", "2", "--max-iter", "1"]) == 3
    assert last_json(capsys.readouterr().err)["code"] == "no_convergence"


def test_influence(tmp_path, capsys):
    """Test the influence command."""
    path = tmp_path / "sample.csv"
    write_sample_csv(path, four_point_sample())
    args = ["influence", str(path), "--nu", "3", "--x", "0.5", "0.25"]
    assert main(args) == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert result["x"] == [0.5, 0.25]
    assert result["relative_difference"] < 1e-4
    assert set(result) == {"x", "implicit", "finite_difference", "relative_difference"}

    assert main(["influence", str(path), "--nu", "3", "--x", "1"]) == 1


def test_counterexample(capsys):
    """Test the command that needs no input file."""
    assert main(["counterexample", "--nu", "2", "--k-max", "5"]) == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert [row["k"] for row in result["rows"]] == [1, 2, 5]
    assert result["limits"]["a"] == pytest.approx(1 / 3)
    assert result["rows"][0]["q_sigma11"] == pytest.approx(5 / 6, abs=1e-8)


def test_mc_normality(q_csv, capsys):
    """Test the simulation command with the summary table."""
    args = ["mc-normality", str(q_csv), "--nu", "2", "--n", "40", "--replicates", "3"]
    assert main(args + ["--table", "--seed", "7"]) == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert result["R"] == 3
    assert len(result["table"]) == 5


def test_equivariance(q_csv, capsys):
    """Test the equivariance command."""
    assert main(["equivariance-test", str(q_csv), "--nu", "2", "--maps", "3"]) == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert len(result["mu_defects"]) == 3
    assert result["max_sigma_defect"] < 1e-8


def test_usage_errors(q_csv, capsys):
    """Test invalid command lines."""
    assert main([]) == 1
    assert last_json(capsys.readouterr().err)["code"] == "usage_error"
    assert main(["unknown"]) == 1
    capsys.readouterr()
    assert main(["fit", str(q_csv)]) == 1
    assert main(["fit", str(q_csv), "--nu", "0"]) == 1
    assert main(["fit", "missing.csv", "--nu", "2"]) == 1
    assert main(["fit", "--help"]) == 0


def test_result_schema():
    """Test that reports of other formats are rejected."""
    text = json.dumps({"schema": "tscatter/1", "command": "fit", "result": {"a": 1}})
    assert Result.from_json(text).result == {"a": 1}
    with pytest.raises(ValueError):
        Result.from_json(json.dumps({"schema": "other", "result": None}))


def test_report_float_format():
    """Test that floats in reports keep 17 significant digits."""
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(2.0) == "2.0"
    assert format_float(1e22) == "1e+22"
    assert format_float(math.nan) == "null"

    command = MockCommand({"nu": 2.0})
    command.name = "fit"
    values = {"x": 1 / 3, "y": np.float64(0.1), "z": [2.0, math.inf], "n": 3}
    text = Result(command, values).to_json(indent=None)
    assert '"x": 0.33333333333333331' in text
    assert '"y": 0.10000000000000001' in text
    assert '"z": [2.0, null]' in text
    assert '"n": 3' in text
    assert '"nu": 2.0' in text

    result = Result.from_json(text)
    assert result.result == {"n": 3, "x": 1 / 3, "y": 0.1, "z": [2.0, None]}
    assert result.to_json(indent=None) == text
