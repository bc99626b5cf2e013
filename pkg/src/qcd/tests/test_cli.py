#!/usr/bin/env python3
"""End-to-end tests of the qcd command line."""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest

import logger as logger_module
from catalog import cndu_pair
from cli import main, parse_tolerances
from errors import ConfigError
from qcore import Quaternion, parse
from reporting import operator_to_dict

SMALL = ["--n", "32", "--k", "6"]


@pytest.fixture(autouse=True)
def restore_default_factory():
    saved = logger_module._default_factory
    yield
    logger_module.set_default_factory(saved)


def write_operator(tmp_path, name, op):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(operator_to_dict(op)))
    return str(path)


def test_example_tci(capsys):
    assert main(["example", "tci"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["verdict"] == "omega1: n=1; omega2: n=2"
    assert document["regions"]["omega1"] == {"n": 1, "expected": 1}


def test_example_cndu(capsys):
    assert main(["example", "cndu", *SMALL]) == 0
    captured = capsys.readouterr()
    document = json.loads(captured.out)
    assert document["verdict"] == "same curvature: true; quaternion unitarily equivalent: false"
    assert document["complex_rep_equivalent"] is False
    assert document["ad_theta"]["equivalent"] is False
    assert "same curvature: true" in captured.err


def test_example_is_deterministic(capsys):
    main(["example", "cndu", *SMALL])
    first = capsys.readouterr().out
    main(["example", "cndu", *SMALL])
    assert capsys.readouterr().out == first


def test_example_csv(capsys):
    assert main(["example", "cndu", *SMALL, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "re_omega,im_omega,curvature_t,curvature_t_tilde,estimator_gap"
    assert len(lines) > 1


def test_truncation_guard_exit_code(capsys):
    assert main(["example", "tci", "--n", "4"]) == 2
    assert "ConfigError" in capsys.readouterr().err


def test_corrupted_operator_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"matrix": [[1, 2], [3')
    assert main(["spectrum", "--operator", str(path), "--s", "i"]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_unknown_tolerance(capsys):
    assert main(["shift", "--tol", "bogus=1e-3"]) == 2


def test_workers_must_be_positive(capsys):
    assert main(["shift", "--workers", "0"]) == 2


def test_bad_arguments_exit_code(capsys):
    assert main(["example", "nope"]) == 2


def test_spectrum_csv(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"matrix": [["i", 0], [0, 2]]}))
    assert main(["spectrum", "--operator", str(path), "--s", "j", "--s", "0.5", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "re,i,j,k,sigma_min,kernel_dim_h"
    assert lines[1].endswith(",1")
    assert lines[2].endswith(",0")


def test_shift_to_file(tmp_path, capsys):
    out = tmp_path / "rsp.json"
    assert main(["shift", "--weights", "const:2", "--n-max", "50", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    document = json.loads(out.read_text())
    assert document["estimate"] == pytest.approx(2.0)
    assert len(document["sequence"]) == 50


def test_canonical_command(tmp_path, capsys):
    t, _ = cndu_pair()
    path = write_operator(tmp_path, "t", t)
    assert main(["canonical", "--operator", path, *SMALL]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["entries"][0][1] == pytest.approx([1.0, 0.0, 0.0, -2.0], abs=1e-10)


def test_equiv_command(tmp_path, capsys):
    t, t_tilde = cndu_pair()
    first = write_operator(tmp_path, "t", t)
    second = write_operator(tmp_path, "t_tilde", t_tilde)
    assert main(["equiv", "--operator", first, "--other", second, *SMALL]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["quaternion_unitarily_equivalent"] is False
    assert document["complex_rep_equivalent"] is False
    assert document["ad_theta"]["equivalent"] is False
    stability = document["stable_across_orders"]
    assert stability["orders"] == [6, 12]
    assert stability["quaternionic"] == [False, False]
    assert stability["stable"] is True


def test_frame_has_no_csv_form(tmp_path, capsys):
    t, _ = cndu_pair()
    path = write_operator(tmp_path, "t", t)
    assert main(["frame", "--operator", path, *SMALL, "--format", "csv"]) == 2


def test_frame_command(tmp_path, capsys):
    t, _ = cndu_pair()
    path = write_operator(tmp_path, "t", t)
    assert main(["frame", "--operator", path, *SMALL]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["rank"] == 1
    assert document["order"] == 6
    assert document["derivative_residual"] < 1e-9


def test_missing_operator_flag(capsys):
    assert main(["canonical"]) == 2


def test_empty_kernel_exit_code(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"matrix": [["2i", 0], [0, "3i"]]}))
    assert main(["frame", "--operator", str(path), "--k", "1", "--n", "4"]) == 3


def test_parse_tolerances():
    assert parse_tolerances(["gap=1e-5", "decay = 0.3"]) == {"gap": 1e-5, "decay": 0.3}
    with pytest.raises(ConfigError):
        parse_tolerances(["gap"])
    with pytest.raises(ConfigError):
        parse_tolerances(["gap=small"])


def test_spectrum_reports_eigen_classes(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"matrix": [["i", 0], [0, 2]]}))
    assert main(["spectrum", "--operator", str(path), "--s", "j", "--tol", "pairing=1e-6"]) == 0
    document = json.loads(capsys.readouterr().out)
    classes = [parse(text) for text in document["eigen_classes"]]
    assert len(classes) == 2
    assert classes[0].isclose(Quaternion(0, 1))
    assert classes[1].isclose(Quaternion(2))


def test_banded_spectrum_has_no_eigen_classes(tmp_path, capsys):
    t, _ = cndu_pair()
    path = write_operator(tmp_path, "t", t)
    assert main(["spectrum", "--operator", path, "--s", "i", *SMALL]) == 0
    assert "eigen_classes" not in json.loads(capsys.readouterr().out)


def test_scalar_tolerance_drives_canonical_self_check(tmp_path, capsys):
    t, _ = cndu_pair()
    path = write_operator(tmp_path, "t", t)

    def self_check_errors():
        return [line for line in capsys.readouterr().err.splitlines() if "ERROR" in line and "self-check" in line]

    assert main(["canonical", "--operator", path, *SMALL]) == 0
    assert self_check_errors() == []
    assert main(["canonical", "--operator", path, *SMALL, "--tol", "scalar=1e-300"]) == 0
    assert len(self_check_errors()) == 1
