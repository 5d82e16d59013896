"""
tests/integration/test_stage4_determinism.py
Stage 4 Integration Test: every command is reproducible and the exit codes are exhaustive

Usage:
  pytest tests/integration/test_stage4_determinism.py
"""

import json

import pytest

from penalty_cert.cli import main
from penalty_cert.command import COMMAND_NAMES
from tests.problems import EX_PEN

FAST_FLAGS = ["--dirs", "4", "--points", "3", "--grid-step", "0.01", "--samples", "16", "--seed", "5"]


@pytest.mark.parametrize("command", COMMAND_NAMES)
def test_identical_invocations(write_problem, tmp_path, command):
    """Two runs with identical flags differ only in the timestamp."""
    path = write_problem(EX_PEN)
    reports = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        code = main([command, str(path), *FAST_FLAGS, "--out", str(out)])
        assert code in (0, 1, 2)
        report = json.loads(out.read_text(encoding="utf-8"))
        del report["timestamp"]
        reports.append(report)
    assert reports[0] == reports[1]
    assert reports[0]["command"] == command


def test_error_exit_on_bad_expression(write_problem):
    """An unknown identifier in the problem file exits 2."""
    path = write_problem(EX_PEN.replace('objective = "-x1"', 'objective = "-y1"'))
    assert main(["derivative", str(path)]) == 2
