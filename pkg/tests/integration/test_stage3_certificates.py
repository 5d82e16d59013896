"""
tests/integration/test_stage3_certificates.py
Stage 3 Integration Test: Fritz John, isolated sufficiency, CQ and Abadie commands

Usage:
  pytest tests/integration/test_stage3_certificates.py
"""

import json

import pytest

from penalty_cert.cli import EXIT_FAIL, EXIT_PASS, main
from tests.problems import ABS_1D, DEGENERATE_G, EX_FJ, EX_PEN, LINEAR_1D, SMOOTH_EQ, SQUARE_1D


def _report(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, json.loads(capsys.readouterr().out)


def test_fritz_john_on_ex_fj(write_problem, capsys):
    """Every direction of EX-FJ gets a nonstrict certificate with no weight on -inf components."""
    code, report = _report(capsys, "certify-fj", write_problem(EX_FJ), "--gamma", 2, "--dirs", 64, "--seed", 1)
    assert code == EXIT_PASS
    for row in report["results"]["per_direction"]:
        cert = row["certificate"]
        components = [row["derivatives"]["alpha0"], *row["derivatives"]["alpha"]]
        assert cert["kind"] == "nonstrict"
        assert all(w == 0 for w, c in zip(cert["lambda"], components) if c == "-inf")


def test_fritz_john_negative_control(write_problem, capsys):
    """f = x1 without constraints: u = -1 is reported violated."""
    code, report = _report(capsys, "certify-fj", write_problem(LINEAR_1D), "--gamma", 1)
    assert code == EXIT_FAIL
    assert report["results"]["violated_directions"] == [[-1.0]]


@pytest.mark.parametrize("text, expected", [(ABS_1D, EXIT_PASS), (SQUARE_1D, EXIT_FAIL), (EX_FJ, EXIT_PASS)])
def test_isolated_sufficiency(write_problem, capsys, text, expected):
    """|x1| and EX-FJ are certified isolated at 0; x1² is not."""
    code, report = _report(capsys, "certify-isolated", write_problem(text), "--gamma", 2, "--dirs", 64)
    assert code == expected
    assert report["results"]["certified"] is (expected == EXIT_PASS)


def test_cq_pass_and_fail(write_problem, capsys):
    """EX-PEN satisfies d(x) <= -0.9; the smooth equality fails a = 0.5 with a recorded worst margin."""
    code, report = _report(capsys, "check-cq", write_problem(EX_PEN, name="pen.toml"), "--a", 0.9)
    assert code == EXIT_PASS
    assert all(float(d) <= -0.9 for d in report["results"]["d_hat"])
    code, report = _report(capsys, "check-cq", write_problem(SMOOTH_EQ, name="smooth.toml"), "--a", 0.5)
    assert code == EXIT_FAIL
    assert float(report["results"]["worst"]) > -0.5
    assert report["results"]["pass"] is False


def test_abadie(write_problem, capsys):
    """EX-FJ satisfies Abadie; g1 = x1² <= 0 mismatches at ±1."""
    code, report = _report(capsys, "check-abadie", write_problem(EX_FJ, name="fj.toml"), "--dirs", 64)
    assert code == EXIT_PASS
    code, report = _report(capsys, "check-abadie", write_problem(DEGENERATE_G, name="deg.toml"), "--dirs", 64)
    assert code == EXIT_FAIL
    assert sorted(report["results"]["mismatches"]) == [[-1.0], [1.0]]
