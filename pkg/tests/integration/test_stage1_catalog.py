"""
tests/integration/test_stage1_catalog.py
Stage 1 Integration Test: derivative catalog through problem files and the CLI

Usage:
  pytest tests/integration/test_stage1_catalog.py
"""

import json

import pytest

from penalty_cert.cli import EXIT_PASS, main

CATALOG = [
    # (objective, dim, bounds, point, direction index, closed form)
    ("abs(x1)", 1, None, [0.0], 0, 1.0),
    ("-abs(x1)", 1, None, [0.0], 0, -1.0),
    ("max(x1, 0)", 1, None, [0.0], 1, 0.0),
    ("x1^2", 1, None, [0.0], 0, 0.0),
    ("sqrt(abs(x1))", 1, None, [1.0], 0, 0.5),
    ("2*x1 - 3*x2", 2, None, [0.3, -0.2], 2, -3.0),
    ("x1", 2, ([0.0, 0.0], [1.0, 1.0]), [0.0, 0.0], 0, 1.0),
    ("abs(x1) + abs(x2)", 2, None, [0.0, 0.0], 3, 1.0),
]


def _problem_text(objective, dim, bounds, point):
    lines = ["[problem]", f"dim = {dim}", f'objective = "{objective}"']
    if bounds is not None:
        lines += [f"set_lower = {bounds[0]}", f"set_upper = {bounds[1]}"]
    lines += ["", "[candidate]", f"point = {point}", "delta = 0.5", ""]
    return "\n".join(lines)


@pytest.mark.parametrize("objective, dim, bounds, point, index, expected", CATALOG)
def test_catalog_through_cli(write_problem, capsys, objective, dim, bounds, point, index, expected):
    """The derivative command reproduces closed-form lower Hadamard derivatives over X."""
    path = write_problem(_problem_text(objective, dim, bounds, point))
    code = main(["derivative", str(path), "--set", "X", "--dirs", "4", "--t0", "0.01"])
    report = json.loads(capsys.readouterr().out)
    row = report["results"]["per_direction"][index]
    assert float(row["value"]) == pytest.approx(expected, abs=5e-2)
    assert code in (0, 1)
    assert report["config"]["schedule"]["t0"] == 0.01


def test_off_cone_reported_as_pos_inf(write_problem, capsys):
    """On X = [0,1]^2 the direction -e1 leaves the set: +inf, and tangent says so too."""
    path = write_problem(_problem_text("x1", 2, ([0.0, 0.0], [1.0, 1.0]), [0.0, 0.0]))
    main(["derivative", str(path), "--set", "X", "--dirs", "4"])
    rows = json.loads(capsys.readouterr().out)["results"]["per_direction"]
    assert rows[1]["direction"] == [-1.0, 0.0]
    assert rows[1]["value"] == "+inf"
    assert main(["tangent", str(path), "--set", "X", "--dirs", "4"]) == EXIT_PASS
    cone = [r["in_cone"] for r in json.loads(capsys.readouterr().out)["results"]["per_direction"]]
    assert cone == [True, False, True, False]
