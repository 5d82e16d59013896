"""
penalty.py — Exact penalty F(x,γ) = f(x) + γ·h(x) + ½‖x−x̄‖² on G

Provides:
- penalty_value: F at one point of G
- build_penalty_grid: the δ-ball grid around x̄ intersected with G, with f and h cached
- minimize_over: exhaustive grid search plus a coordinate pattern-search polish
- exactness_threshold: smallest grid γ from which the minimizer stays at x̄
- monotone_violations: pairs γ₁ < γ₂ where exactness is lost again
- isolated_growth_check: F(x,γ) >= F(x̄,γ) + A‖x−x̄‖ on sampled points of G_δ

The proximal coefficient is fixed at 0.5. Ties between grid minimizers are
broken lexicographically, which the grid's row order already encodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel

from penalty_cert.config import get_feas_tol, get_max_grid_points
from penalty_cert.errors import DomainError, EmptyFeasibleGrid, InvalidCandidate, NotInG
from penalty_cert.expr_dsl import evaluate, evaluate_many
from penalty_cert.problem_model import ProblemInstance, classify, h_aggregate, h_aggregate_many, membership_many

logger = logging.getLogger(__name__)

PROX = 0.5
REFINE_DIVISOR = 16


class PenaltyPoint(BaseModel):
    gamma: float
    argmin: list[float]
    min_value: float
    dist_to_xbar: float


class PenaltyPathResult(BaseModel):
    gamma_values: list[float]
    per_gamma: list[PenaltyPoint]
    threshold_s: Optional[float] = None
    match_tol: float
    grid_step: float
    grid_points: int


class GrowthCheckResult(BaseModel):
    holds: bool
    witness: Optional[list[float]] = None
    gamma: float
    growth_A: float
    checked_points: int
    worst_margin: float


@dataclass
class PenaltyGrid:
    """Feasible grid points of G_δ with f and h evaluated once for every γ."""

    x_bar: np.ndarray
    points: np.ndarray
    f_values: np.ndarray
    h_values: np.ndarray
    prox_values: np.ndarray

    def penalty(self, gamma: float) -> np.ndarray:
        return self.f_values + gamma * self.h_values + self.prox_values


def _tol(tol: Optional[float]) -> float:
    return get_feas_tol() if tol is None else tol


def _penalty_at(p: ProblemInstance, x_bar: np.ndarray, x: np.ndarray, gamma: float) -> float:
    return evaluate(p.f, x) + gamma * h_aggregate(p, x) + PROX * float(np.sum((x - x_bar) ** 2))


def penalty_value(p: ProblemInstance, x_bar, x, gamma: float, tol: Optional[float] = None) -> float:
    """
    F(x,γ) for x ∈ G.

    Raises:
        NotInG: x fails membership in G
        ValueError: γ < 0
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    x = np.asarray(x, dtype=float)
    if not classify(p, x, _tol(tol)).in_G:
        raise NotInG(f"point {x.tolist()} is not in G")
    return _penalty_at(p, np.asarray(x_bar, dtype=float), x, gamma)


def build_penalty_grid(
    p: ProblemInstance, x_bar, delta: float, grid_step: float, tol: Optional[float] = None
) -> PenaltyGrid:
    """
    Grid {x̄ + grid_step·z : z integer, ‖grid_step·z‖ <= δ} ∩ G in lexicographic z order.

    Raises:
        ValueError: non-positive step/δ, or more candidates than PENCERT_MAX_GRID_POINTS
        EmptyFeasibleGrid: no grid point lies in G
    """
    if grid_step <= 0 or delta <= 0:
        raise ValueError("grid_step and delta must be positive")
    tol = _tol(tol)
    x_bar = np.asarray(x_bar, dtype=float)
    n = x_bar.shape[0]
    radius = int(math.floor(delta / grid_step * (1 + 1e-12)))
    side = 2 * radius + 1
    limit = get_max_grid_points()
    if side ** n > limit:
        raise ValueError(
            f"grid has {side}^{n} candidate points, above the limit {limit}; increase grid_step or PENCERT_MAX_GRID_POINTS"
        )
    z = np.indices((side,) * n).reshape(n, -1).T - radius
    offsets = grid_step * z
    offsets = offsets[np.linalg.norm(offsets, axis=1) <= delta * (1 + 1e-12)]
    points = x_bar + offsets
    in_G = membership_many(p, points, tol)[1]
    points = points[in_G]
    if points.shape[0] == 0:
        raise EmptyFeasibleGrid(f"no point of the δ={delta} grid (step {grid_step}) lies in G")
    logger.debug("Penalty grid: %d feasible points (step=%g, δ=%g)", points.shape[0], grid_step, delta)
    return PenaltyGrid(
        x_bar=x_bar,
        points=points,
        f_values=evaluate_many(p.f, points),
        h_values=h_aggregate_many(p, points),
        prox_values=PROX * np.sum((points - x_bar) ** 2, axis=1),
    )


def _pattern_refine(
    p: ProblemInstance,
    x_bar: np.ndarray,
    delta: float,
    gamma: float,
    start: np.ndarray,
    value: float,
    grid_step: float,
    tol: float,
) -> tuple[np.ndarray, float]:
    """Coordinate pattern search from the grid minimizer, step halving down to grid_step/16."""
    x, best = start.copy(), value
    step = grid_step / 2
    while step >= grid_step / REFINE_DIVISOR:
        improved = False
        for k in range(x.shape[0]):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[k] += sign * step
                if np.linalg.norm(trial - x_bar) > delta:
                    continue
                try:
                    if not classify(p, trial, tol).in_G:
                        continue
                    candidate = _penalty_at(p, x_bar, trial, gamma)
                except DomainError:
                    continue
                if candidate < best:
                    x, best, improved = trial, candidate, True
        if not improved:
            step /= 2
    return x, best


def minimize_over(
    p: ProblemInstance,
    x_bar,
    delta: float,
    gamma: float,
    grid_step: float,
    tol: Optional[float] = None,
    grid: Optional[PenaltyGrid] = None,
) -> tuple[np.ndarray, float]:
    """
    Minimize F(·,γ) over G_δ: exhaustive grid evaluation, then one pattern-search polish.
    A single-point grid (as when δ < grid_step) is returned without the polish.

    Pass a prebuilt grid to reuse f/h evaluations across several γ.

    Returns:
        (argmin, min_value)
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    tol = _tol(tol)
    x_bar = np.asarray(x_bar, dtype=float)
    if grid is None:
        grid = build_penalty_grid(p, x_bar, delta, grid_step, tol)
    values = grid.penalty(gamma)
    best = int(np.argmin(values))  # first index = lexicographically smallest tie
    if grid.points.shape[0] == 1:
        return grid.points[0].copy(), float(values[0])
    return _pattern_refine(p, x_bar, delta, gamma, grid.points[best], float(values[best]), grid_step, tol)


def exactness_threshold(
    p: ProblemInstance,
    x_bar,
    delta: float,
    gamma_grid: Sequence[float],
    grid_step: float,
    match_tol: float,
    tol: Optional[float] = None,
) -> PenaltyPathResult:
    """
    Penalty path over gamma_grid and its empirical exactness threshold.

    threshold_s is the smallest grid γ such that the minimizer stays within
    match_tol of x̄ for that γ and every larger grid γ; None if no such γ.

    Raises:
        InvalidCandidate: x̄ not in S
        ValueError: empty, unsorted or negative gamma_grid
    """
    gammas = [float(g) for g in gamma_grid]
    if not gammas:
        raise ValueError("gamma_grid must be nonempty")
    if any(g < 0 for g in gammas) or any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gamma_grid must be strictly ascending and nonnegative")
    tol = _tol(tol)
    x_bar = np.asarray(x_bar, dtype=float)
    if not classify(p, x_bar, tol).in_S:
        raise InvalidCandidate(f"x̄={x_bar.tolist()} is not in S")

    grid = build_penalty_grid(p, x_bar, delta, grid_step, tol)
    per_gamma = []
    for gamma in gammas:
        argmin, value = minimize_over(p, x_bar, delta, gamma, grid_step, tol, grid=grid)
        per_gamma.append(
            PenaltyPoint(
                gamma=gamma,
                argmin=argmin.tolist(),
                min_value=value,
                dist_to_xbar=float(np.linalg.norm(argmin - x_bar)),
            )
        )

    threshold = None
    for point in reversed(per_gamma):
        if point.dist_to_xbar > match_tol:
            break
        threshold = point.gamma
    if threshold is None:
        logger.warning("No exactness threshold on γ ∈ [%g, %g]", gammas[0], gammas[-1])
    else:
        logger.info("Exactness threshold s=%g", threshold)
    return PenaltyPathResult(
        gamma_values=gammas,
        per_gamma=per_gamma,
        threshold_s=threshold,
        match_tol=match_tol,
        grid_step=grid_step,
        grid_points=int(grid.points.shape[0]),
    )


def monotone_violations(result: PenaltyPathResult, match_tol: Optional[float] = None) -> list[tuple[float, float]]:
    """Pairs (γ₁, γ₂), γ₁ < γ₂, where the minimizer is x̄ at γ₁ but not at γ₂."""
    match_tol = result.match_tol if match_tol is None else match_tol
    at_xbar = [pt.dist_to_xbar <= match_tol for pt in result.per_gamma]
    violations = []
    for i, first in enumerate(result.per_gamma):
        if not at_xbar[i]:
            continue
        for j in range(i + 1, len(result.per_gamma)):
            if not at_xbar[j]:
                violations.append((first.gamma, result.per_gamma[j].gamma))
    return violations


def sample_ball(center: np.ndarray, delta: float, count: int, seed) -> np.ndarray:
    """count points uniform in the closed ball N_δ(center), from a seeded generator."""
    rng = np.random.default_rng(seed)
    n = center.shape[0]
    normals = rng.standard_normal((count, n))
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = delta * rng.random(count) ** (1.0 / n)
    return center + normals / norms * radii[:, None]


def isolated_growth_check(
    p: ProblemInstance,
    x_bar,
    delta: float,
    gamma: float,
    growth_A: float,
    sample_count: int,
    seed: int,
    grid_step: float,
    tol: Optional[float] = None,
) -> GrowthCheckResult:
    """
    Check F(x,γ) - F(x̄,γ) >= A‖x−x̄‖ - tol on seeded samples of N_δ(x̄) ∩ G and the full grid.

    The witness is the first violator, samples before grid points.

    Raises:
        ValueError: A <= 0, γ < 0 or sample_count < 0
        InvalidCandidate: x̄ not in S
    """
    if not growth_A > 0:
        raise ValueError(f"growth constant A must be positive, got {growth_A}")
    if gamma < 0 or sample_count < 0:
        raise ValueError("gamma and sample_count must be nonnegative")
    tol = _tol(tol)
    x_bar = np.asarray(x_bar, dtype=float)
    if not classify(p, x_bar, tol).in_S:
        raise InvalidCandidate(f"x̄={x_bar.tolist()} is not in S")

    samples = sample_ball(x_bar, delta, sample_count, seed) if sample_count else np.empty((0, x_bar.shape[0]))
    if samples.shape[0]:
        samples = samples[membership_many(p, samples, tol)[1]]
    grid = build_penalty_grid(p, x_bar, delta, grid_step, tol)
    points = np.vstack([samples, grid.points])

    f_bar = _penalty_at(p, x_bar, x_bar, gamma)
    values = evaluate_many(p.f, points) + gamma * h_aggregate_many(p, points) + PROX * np.sum((points - x_bar) ** 2, axis=1)
    margins = values - f_bar - growth_A * np.linalg.norm(points - x_bar, axis=1)
    violated = margins < -tol
    witness = points[int(np.argmax(violated))].tolist() if violated.any() else None
    if witness is not None:
        logger.info("Growth A=%g fails at γ=%g, witness %s", growth_A, gamma, witness)
    return GrowthCheckResult(
        holds=witness is None,
        witness=witness,
        gamma=gamma,
        growth_A=growth_A,
        checked_points=int(points.shape[0]),
        worst_margin=float(margins.min()),
    )
