"""
tests/test_penalty.py — unit tests for the exact penalty, grid search and growth check
"""
import numpy as np
import pytest

from penalty_cert.errors import EmptyFeasibleGrid, InvalidCandidate, NotInG
from penalty_cert.expr_dsl import parse
from penalty_cert.penalty import (
    PenaltyPathResult,
    PenaltyPoint,
    build_penalty_grid,
    exactness_threshold,
    isolated_growth_check,
    minimize_over,
    monotone_violations,
    penalty_value,
    sample_ball,
)
from penalty_cert.problem_model import ProblemInstance, load_problem
from tests.problems import ABS_1D, EX_PEN, SMOOTH_EQ, SQUARE_1D

GAMMAS = [0.25 * k for k in range(13)]


@pytest.fixture
def ex_pen(write_problem):
    return load_problem(write_problem(EX_PEN))


def test_penalty_value(ex_pen):
    """F((0.5,0), 2) = -0.5 + 2·0.5 + 0.125."""
    problem, cand = ex_pen
    assert penalty_value(problem, cand.point, [0.5, 0.0], 2.0) == pytest.approx(0.625)
    assert penalty_value(problem, cand.point, [0.0, 0.0], 2.0) == 0.0


def test_penalty_value_rejects_points_outside_g(ex_pen):
    """Points outside G raise NotInG; negative γ is a ValueError."""
    problem, cand = ex_pen
    with pytest.raises(NotInG):
        penalty_value(problem, cand.point, [2.0, 0.0], 1.0)
    with pytest.raises(ValueError):
        penalty_value(problem, cand.point, [0.0, 0.0], -1.0)


def test_minimize_below_threshold(ex_pen):
    """For γ = 0.5 the minimizer is x1 = 1 - γ with value -0.125."""
    problem, cand = ex_pen
    argmin, value = minimize_over(problem, cand.point, cand.delta, 0.5, 1e-3)
    np.testing.assert_allclose(argmin, [0.5, 0.0], atol=2e-3)
    assert value == pytest.approx(-0.125, abs=1e-5)


def test_exactness_threshold_ex_pen(ex_pen):
    """EX-PEN becomes exact at γ = 1 and stays exact."""
    problem, cand = ex_pen
    result = exactness_threshold(problem, cand.point, cand.delta, GAMMAS, 1e-3, 1e-2)
    assert 0.75 <= result.threshold_s <= 1.25
    assert result.threshold_s == 1.0
    assert monotone_violations(result) == []
    below = next(pt for pt in result.per_gamma if pt.gamma == 0.5)
    assert below.dist_to_xbar == pytest.approx(0.5, abs=2e-3)


@pytest.mark.parametrize("text, threshold", [(ABS_1D, 0.0), (SMOOTH_EQ, None)])
def test_monotone_on_catalog(write_problem, text, threshold):
    """Exactness never reappears-then-vanishes; the smooth equality never becomes exact."""
    problem, cand = load_problem(write_problem(text))
    result = exactness_threshold(problem, cand.point, cand.delta, GAMMAS, 1e-3, 1e-2)
    assert result.threshold_s == threshold
    assert monotone_violations(result) == []


def test_monotone_violations_detected():
    """A path that returns to x̄ and leaves again is reported pairwise."""
    points = [
        PenaltyPoint(gamma=g, argmin=[d], min_value=0.0, dist_to_xbar=d)
        for g, d in [(0.0, 0.5), (1.0, 0.0), (2.0, 0.3), (3.0, 0.0)]
    ]
    result = PenaltyPathResult(
        gamma_values=[0.0, 1.0, 2.0, 3.0], per_gamma=points, threshold_s=3.0,
        match_tol=1e-2, grid_step=0.1, grid_points=11,
    )
    assert monotone_violations(result) == [(1.0, 2.0)]


def test_threshold_argument_checks(ex_pen):
    """Unsorted or negative γ grids and infeasible x̄ are rejected."""
    problem, cand = ex_pen
    with pytest.raises(ValueError):
        exactness_threshold(problem, cand.point, cand.delta, [1.0, 0.5], 1e-2, 1e-2)
    with pytest.raises(ValueError):
        exactness_threshold(problem, cand.point, cand.delta, [], 1e-2, 1e-2)
    with pytest.raises(InvalidCandidate):
        exactness_threshold(problem, [0.5, 0.0], cand.delta, [1.0], 1e-2, 1e-2)


def test_grid_ties_break_lexicographically():
    """Symmetric minimizers ±0.5 resolve to the smaller one."""
    p = ProblemInstance(dim=1, f=parse("-abs(x1)", 1), box_lower=(-1.0,), box_upper=(1.0,))
    argmin, value = minimize_over(p, [0.0], 0.5, 0.0, 0.1)
    assert argmin.tolist() == [-0.5]
    assert value == pytest.approx(-0.375)


def test_empty_grid_and_grid_limit(monkeypatch):
    """A grid missing G entirely, or too many points, fails before minimizing."""
    p = ProblemInstance(dim=1, f=parse("x1", 1), g=(parse("1 - x1^2", 1),))
    with pytest.raises(EmptyFeasibleGrid):
        build_penalty_grid(p, [0.0], 0.5, 0.1)
    monkeypatch.setenv("PENCERT_MAX_GRID_POINTS", "100")
    q = ProblemInstance(dim=2, f=parse("x1", 2))
    with pytest.raises(ValueError):
        build_penalty_grid(q, [0.0, 0.0], 1.0, 1e-2)


def test_sample_ball_is_seeded():
    """Samples lie in the ball and repeat for the same seed."""
    a = sample_ball(np.array([1.0, -1.0]), 0.3, 500, 4)
    assert np.all(np.linalg.norm(a - [1.0, -1.0], axis=1) <= 0.3 + 1e-12)
    np.testing.assert_array_equal(a, sample_ball(np.array([1.0, -1.0]), 0.3, 500, 4))


def test_growth_holds_for_abs(write_problem):
    """|x| + ½x² >= 0.5|x| on the whole δ-ball."""
    problem, cand = load_problem(write_problem(ABS_1D))
    result = isolated_growth_check(problem, cand.point, cand.delta, 1.0, 0.5, 10_000, 0, 1e-3)
    assert result.holds and result.witness is None
    assert result.checked_points == 10_000 + 1001


def test_growth_fails_for_square(write_problem):
    """1.5x² >= 0.5|x| fails for |x| < 1/3; the witness shows it."""
    problem, cand = load_problem(write_problem(SQUARE_1D))
    result = isolated_growth_check(problem, cand.point, cand.delta, 1.0, 0.5, 10_000, 0, 1e-3)
    assert not result.holds
    assert 0 < abs(result.witness[0]) < 1 / 3
    assert result.worst_margin < 0


def test_growth_rejects_bad_constant(write_problem):
    """A must be positive."""
    problem, cand = load_problem(write_problem(ABS_1D))
    with pytest.raises(ValueError):
        isolated_growth_check(problem, cand.point, cand.delta, 1.0, 0.0, 10, 0, 1e-2)


def test_radius_below_grid_step_keeps_candidate():
    """With δ < grid_step the grid is {x̄} and the minimizer stays at x̄."""
    p = ProblemInstance(dim=1, f=parse("x1", 1))
    argmin, value = minimize_over(p, [0.0], 0.05, 0.0, 0.1)
    assert argmin.tolist() == [0.0]
    assert value == 0.0
