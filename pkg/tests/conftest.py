"""
tests/conftest.py — shared fixtures
"""

import pytest


@pytest.fixture
def write_problem(tmp_path):
    """Write TOML text to tmp_path and return the path."""

    def _write(text: str, name: str = "problem.toml"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
