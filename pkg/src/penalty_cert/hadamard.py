"""
hadamard.py — Lower Hadamard conditional derivatives by structured sampling

Provides:
- SamplingSchedule: geometric ladder t_k = t0·ratio^k with per-level direction balls
- lower_hadamard: liminf of (phi(x+t u') - phi(x)) / t over admissible samples
- lower_hadamard_extended: same quantity through the extension phī = +inf off S
- hadamard_diff_check: does the full limit exist on the deep half of the ladder
- tangent_cone_member: Bouligand tangent cone membership witness
- sample_unit_directions: seeded quasi-uniform unit directions, axes first
- baseline_necessary: ld phi(x;u;S) >= 0 on a direction sample

Functions and set oracles are vectorized: they take an (N, n) array of points
and return an (N,) array of values / booleans.

At level k the sampler draws M directions u' uniformly from the ball of radius
dir_radius_factor·t_k around u, plus u itself. The minimum over all levels is a
consistent approximation of the liminf: coarse levels can pull it below the
true value by at most about Lip(phi)·dir_radius_factor·t0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt, model_validator

from penalty_cert.config import get_schedule_defaults
from penalty_cert.errors import DomainError
from penalty_cert.extended_real import POS_INF, ExtReal, ExtRealStr

logger = logging.getLogger(__name__)

PointFn = Callable[[np.ndarray], np.ndarray]
Oracle = Callable[[np.ndarray], np.ndarray]


class SamplingSchedule(BaseModel):
    model_config = ConfigDict(frozen=True)

    t0: PositiveFloat = 1e-1
    ratio: float = Field(0.5, gt=0.0, lt=1.0)
    levels: PositiveInt = 20
    samples: PositiveInt = 64
    dir_radius_factor: PositiveFloat = 1.0
    seed: NonNegativeInt = 0

    @model_validator(mode="after")
    def _deepest_scale_representable(self) -> "SamplingSchedule":
        deepest = self.t0 * self.ratio ** (self.levels - 1)
        if not (deepest > 0 and math.isfinite(self.t0)):
            raise ValueError(f"t0·ratio^(K-1) = {deepest!r} is not a representable positive scale")
        return self

    @classmethod
    def from_env(cls, **overrides) -> "SamplingSchedule":
        """Defaults from the environment, overridden by explicit (non-None) values."""
        values = get_schedule_defaults()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def scales(self) -> np.ndarray:
        return self.t0 * self.ratio ** np.arange(self.levels)

    def deep_levels(self) -> range:
        """The deepest ceil(K/2) levels."""
        return range(self.levels - math.ceil(self.levels / 2), self.levels)


class LevelMinimum(BaseModel):
    scale: float
    minimum: Optional[float]
    count: int


class DerivativeEstimate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: ExtRealStr
    admissible_samples: int
    level_minima: list[LevelMinimum]


class DiffCheck(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    differentiable: bool
    value: ExtRealStr
    lower: ExtRealStr
    spread: Optional[float] = None


class BaselineResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    holds: bool
    directions: list[list[float]]
    estimates: list[ExtRealStr]


@dataclass
class _Level:
    scale: float
    quotients: np.ndarray  # admissible samples only
    sampled: int


# ─────────────────────────────────────────
# Sampling
# ─────────────────────────────────────────

def _ball_offsets(count: int, dim: int, seed: int, level: int) -> np.ndarray:
    """count points uniform in the unit ball; stable prefixes for fixed (seed, level)."""
    normals = np.random.default_rng([seed, level, 0]).standard_normal((count, dim))
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = np.random.default_rng([seed, level, 1]).random(count) ** (1.0 / dim)
    return normals / norms * radii[:, None]


def _level_directions(u: np.ndarray, sched: SamplingSchedule, level: int) -> np.ndarray:
    radius = sched.dir_radius_factor * sched.t0 * sched.ratio ** level
    offsets = _ball_offsets(sched.samples, u.shape[0], sched.seed, level)
    return np.vstack([u[None, :], u[None, :] + radius * offsets])


def _prepare(x, u) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    if x.shape != u.shape:
        raise ValueError(f"x and u must have the same length ({x.shape[0]} vs {u.shape[0]})")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
        raise ValueError("x and u must be finite")
    return x, u


def _checked(phi: PointFn, points: np.ndarray, context: str) -> np.ndarray:
    try:
        values = np.asarray(phi(points), dtype=float).reshape(-1)
    except DomainError as e:
        e.add_note(context)
        raise
    bad = ~np.isfinite(values)
    if bad.any():
        first = int(np.argmax(bad))
        raise DomainError(f"function value {values[first]!r} at admissible point {points[first].tolist()}; {context}")
    return values


def _ladder(
    phi: Optional[PointFn],
    set_oracle: Oracle,
    x: np.ndarray,
    u: np.ndarray,
    sched: SamplingSchedule,
    levels: Sequence[int],
) -> list[_Level]:
    """Sample the requested levels in one batch; quotients empty when phi is None."""
    if not bool(np.asarray(set_oracle(x[None, :])).reshape(-1)[0]):
        raise ValueError(f"base point {x.tolist()} does not satisfy the set oracle")
    scales = sched.scales()
    per_level = sched.samples + 1
    points = np.vstack([x + scales[k] * _level_directions(u, sched, k) for k in levels])
    admissible = np.asarray(set_oracle(points), dtype=bool).reshape(-1)

    quotients = np.full(points.shape[0], np.nan)
    if phi is not None and admissible.any():
        context = f"estimating at x={x.tolist()}, u={u.tolist()}"
        base = _checked(phi, x[None, :], context)[0]
        values = _checked(phi, points[admissible], context)
        row_scales = np.repeat([scales[k] for k in levels], per_level)
        quotients[admissible] = (values - base) / row_scales[admissible]

    out = []
    for j, k in enumerate(levels):
        block = slice(j * per_level, (j + 1) * per_level)
        out.append(_Level(float(scales[k]), quotients[block][admissible[block]], int(admissible[block].sum())))
    return out


# ─────────────────────────────────────────
# Estimators
# ─────────────────────────────────────────

def lower_hadamard(phi: PointFn, set_oracle: Oracle, x, u, sched: SamplingSchedule) -> DerivativeEstimate:
    """
    Estimate ld phi(x; u; S) where S is given by set_oracle.

    Returns PosInf when no level has an admissible sample (u off the tangent cone).

    Raises:
        DomainError: phi undefined at an admissible sample point
    """
    x, u = _prepare(x, u)
    ladder = _ladder(phi, set_oracle, x, u, sched, range(sched.levels))
    minima = [
        LevelMinimum(scale=lv.scale, minimum=float(lv.quotients.min()) if lv.sampled else None, count=lv.sampled)
        for lv in ladder
    ]
    recorded = [m.minimum for m in minima if m.minimum is not None]
    value = ExtReal.from_float(min(recorded)) if recorded else POS_INF
    return DerivativeEstimate(value=value, admissible_samples=sum(m.count for m in minima), level_minima=minima)


def lower_hadamard_extended(phi: PointFn, set_oracle: Oracle, x, u, sched: SamplingSchedule) -> ExtReal:
    """
    The unconstrained liminf of (phī(x+t u') - phi(x)) / t with phī = +inf off S.

    Inadmissible samples contribute +inf quotients, so this agrees with
    lower_hadamard(...).value on the same schedule.
    """
    x, u = _prepare(x, u)
    ladder = _ladder(phi, set_oracle, x, u, sched, range(sched.levels))
    quotients = [
        np.concatenate([lv.quotients, np.full(sched.samples + 1 - lv.sampled, np.inf)]) for lv in ladder
    ]
    return ExtReal.from_float(float(np.min(np.concatenate(quotients))))


def hadamard_diff_check(
    phi: PointFn, set_oracle: Oracle, x, u, sched: SamplingSchedule, tol: float
) -> DiffCheck:
    """
    Test whether lim (phi(x+t u') - phi(x)) / t exists, using the deepest ceil(K/2) levels.

    differentiable requires an admissible sample on every deep level and a
    max-min spread <= tol; value is then the midpoint, otherwise the lower estimate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, u = _prepare(x, u)
    ladder = _ladder(phi, set_oracle, x, u, sched, range(sched.levels))
    recorded = [lv.quotients for lv in ladder if lv.sampled]
    lower = ExtReal.from_float(float(np.min(np.concatenate(recorded)))) if recorded else POS_INF

    deep = [ladder[k] for k in sched.deep_levels()]
    if not all(lv.sampled for lv in deep):
        return DiffCheck(differentiable=False, value=lower, lower=lower)
    deep_q = np.concatenate([lv.quotients for lv in deep])
    hi, lo = float(deep_q.max()), float(deep_q.min())
    spread = hi - lo
    if spread <= tol:
        return DiffCheck(differentiable=True, value=ExtReal.finite(0.5 * (hi + lo)), lower=lower, spread=spread)
    return DiffCheck(differentiable=False, value=lower, lower=lower, spread=spread)


def tangent_cone_member(set_oracle: Oracle, x, u, sched: SamplingSchedule) -> bool:
    """
    True iff every deep level has an admissible sample x + t_k u' in S.

    Such samples witness sequences t_k -> +0, u_k -> u with x + t_k u_k ∈ S.
    """
    x, u = _prepare(x, u)
    ladder = _ladder(None, set_oracle, x, u, sched, sched.deep_levels())
    return all(lv.sampled for lv in ladder)


def sample_unit_directions(count: int, dim: int, seed: int) -> np.ndarray:
    """
    Deterministic unit directions of R^dim.

    dim == 1 gives exactly (+1, -1). Otherwise ±e_1, ±e_2, ... come first and the
    rest are normalized isotropic Gaussian samples from the seeded generator.
    """
    if count < 1 or dim < 1:
        raise ValueError("count and dim must be positive")
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    axes = []
    for k in range(dim):
        for sign in (1.0, -1.0):
            e = np.zeros(dim)
            e[k] = sign
            axes.append(e)
    if count <= len(axes):
        return np.array(axes[:count])
    rng = np.random.default_rng(seed)
    extra = []
    while len(extra) < count - len(axes):
        z = rng.standard_normal(dim)
        norm = np.linalg.norm(z)
        if norm > 1e-12:
            extra.append(z / norm)
    return np.vstack([np.array(axes), np.array(extra)])


def baseline_necessary(
    phi: PointFn, set_oracle: Oracle, x, directions: np.ndarray, sched: SamplingSchedule, tol: float
) -> BaselineResult:
    """Check ld phi(x; u; S) >= -tol on every given direction (local minimizer over S)."""
    estimates = [lower_hadamard(phi, set_oracle, x, u, sched).value for u in directions]
    floor = ExtReal.finite(-tol)
    holds = all(e >= floor for e in estimates)
    if not holds:
        logger.info("Baseline necessary condition fails on %d direction(s)", sum(e < floor for e in estimates))
    return BaselineResult(
        holds=holds,
        directions=[list(map(float, u)) for u in directions],
        estimates=estimates,
    )
