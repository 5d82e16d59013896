"""
tests/integration/test_stage2_penalty.py
Stage 2 Integration Test: exact penalty threshold, monotonicity and growth

Usage:
  pytest tests/integration/test_stage2_penalty.py
"""

import csv
import json

import numpy as np
import pytest

from penalty_cert.cli import EXIT_FAIL, EXIT_PASS, main
from penalty_cert.penalty import exactness_threshold, monotone_violations
from penalty_cert.problem_model import load_problem
from tests.problems import ABS_1D, EX_PEN, SMOOTH_EQ, SQUARE_1D


def _dense_threshold_oracle(gammas, step=1e-4):
    """EX-PEN reduced to x2 = 0: argmin over x1 ∈ [-0.75, 0.75] of -x1 + γ|x1| + x1²/2."""
    x1 = np.arange(-0.75, 0.75 + step / 2, step)
    exact = [abs(x1[np.argmin(-x1 + g * np.abs(x1) + 0.5 * x1 ** 2)]) <= 1e-2 for g in gammas]
    for k in range(len(gammas)):
        if all(exact[k:]):
            return gammas[k]
    return None


def test_ex_pen_threshold_csv(write_problem, tmp_path, capsys):
    """penalty-path on EX-PEN exits 0 and its CSV shows exactness from γ ≈ 1."""
    path = write_problem(EX_PEN, name="EX-PEN.toml")
    out = tmp_path / "ex-pen.json"
    code = main(["penalty-path", str(path), "--gamma-max", "3", "--gamma-step", "0.25", "--out", str(out)])
    assert code == EXIT_PASS
    with out.with_suffix(".csv").open(encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    on_axis = [r for r in rows if float(r["argmin_2"]) == 0.0]
    assert [abs(float(r["argmin_1"])) for r in on_axis] == pytest.approx([float(r["dist_to_xbar"]) for r in on_axis])
    exact_from = next(float(r["gamma"]) for r in rows if float(r["dist_to_xbar"]) <= 1e-2)
    assert 0.75 <= exact_from <= 1.25
    gammas = [float(r["gamma"]) for r in rows]
    assert exact_from == _dense_threshold_oracle(gammas)
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["results"]["monotone_violations"] == []


@pytest.mark.parametrize("text", [EX_PEN, ABS_1D, SMOOTH_EQ])
def test_exactness_is_monotone(write_problem, text):
    """Once the minimizer is x̄ it stays x̄ for every larger grid γ."""
    problem, cand = load_problem(write_problem(text))
    result = exactness_threshold(problem, cand.point, cand.delta, [0.25 * k for k in range(13)], 2e-3, 1e-2)
    assert monotone_violations(result) == []


def test_growth_through_cli(write_problem, tmp_path, capsys):
    """|x1| grows linearly with A = 0.5; x1² does not and a witness is reported."""
    code = main(["penalty-path", str(write_problem(ABS_1D, name="abs.toml")), "--growth-A", "0.5",
                 "--out", str(tmp_path / "abs.json")])
    assert code == EXIT_PASS
    code = main(["penalty-path", str(write_problem(SQUARE_1D, name="sq.toml")), "--growth-A", "0.5",
                 "--out", str(tmp_path / "sq.json")])
    assert code == EXIT_FAIL
    growth = json.loads((tmp_path / "sq.json").read_text(encoding="utf-8"))["results"]["growth"]
    assert growth["witness"] is not None and abs(growth["witness"][0]) < 1 / 3
