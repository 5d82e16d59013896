"""
problem_model.py — Problem (P), its feasible sets and membership queries

Provides:
- ProblemInstance: f, g_i, h_j, the closed set X = box ∩ {c(x) <= 0}
- Candidate: the point x̄ under test with its neighbourhood radius δ
- load_problem: read a TOML problem file
- classify / h_aggregate: scalar membership and the aggregate h = Σ h_j²
- membership_many / set_oracle / *_fn: vectorized counterparts used by the
  sampling and grid-search code

Membership is tolerance based: x ∈ X when box and extra constraints hold
within tol, x ∈ G additionally needs g_i(x) <= tol, x ∈ S additionally needs
h(x) <= tol². Active indices are 1-based.
"""

from __future__ import annotations

import hashlib
import logging
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator

from penalty_cert.config import get_feas_tol
from penalty_cert.errors import CertifyError, FormatError, InvalidCandidate, ProblemIoError
from penalty_cert.expr_dsl import ExprAst, evaluate, evaluate_many, parse, to_text

logger = logging.getLogger(__name__)

SetName = Literal["X", "G", "S"]
PointFn = Callable[[np.ndarray], np.ndarray]
Oracle = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemInstance:
    dim: int
    f: ExprAst
    g: tuple[ExprAst, ...] = ()
    h_list: tuple[ExprAst, ...] = ()
    box_lower: tuple[float, ...] = ()
    box_upper: tuple[float, ...] = ()
    set_extra: tuple[ExprAst, ...] = ()
    lipschitz_L: Optional[float] = None  # metadata only
    digest: str = ""

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not self.box_lower:
            object.__setattr__(self, "box_lower", (-math.inf,) * self.dim)
        if not self.box_upper:
            object.__setattr__(self, "box_upper", (math.inf,) * self.dim)
        if len(self.box_lower) != self.dim or len(self.box_upper) != self.dim:
            raise ValueError("box bounds must have length dim")
        for k, (lo, hi) in enumerate(zip(self.box_lower, self.box_upper), start=1):
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValueError(f"box bound {k}: lower {lo} must not exceed upper {hi}")
        if self.lipschitz_L is not None and not self.lipschitz_L > 0:
            raise ValueError("lipschitz constant must be positive")

    @property
    def m(self) -> int:
        return len(self.g)

    @property
    def q(self) -> int:
        return len(self.h_list)

    def describe(self) -> dict:
        """Canonical expression texts, for embedding in reports."""
        return {
            "dim": self.dim,
            "objective": to_text(self.f),
            "inequalities": [to_text(e) for e in self.g],
            "equalities": [to_text(e) for e in self.h_list],
            "set_lower": [_bound_text(v) for v in self.box_lower],
            "set_upper": [_bound_text(v) for v in self.box_upper],
            "set_constraints": [to_text(e) for e in self.set_extra],
            "lipschitz": self.lipschitz_L,
        }


class Candidate(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_bar: tuple[float, ...]
    delta: PositiveFloat
    feas_tol: PositiveFloat = Field(default_factory=get_feas_tol)

    @field_validator("x_bar")
    @classmethod
    def _finite_point(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v or not all(math.isfinite(c) for c in v):
            raise ValueError("candidate point must be a nonempty vector of finite reals")
        return v

    @property
    def point(self) -> np.ndarray:
        return np.asarray(self.x_bar, dtype=float)


class Classification(BaseModel):
    in_X: bool
    in_G: bool
    in_S: bool
    active_set: list[int]


def _bound_text(v: float) -> float | str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return v


# ─────────────────────────────────────────
# Scalar queries
# ─────────────────────────────────────────

def _check_point(p: ProblemInstance, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != p.dim:
        raise ValueError(f"point has length {x.shape[0]}, problem dimension is {p.dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point components must be finite")
    return x


def h_aggregate(p: ProblemInstance, x) -> float:
    """h(x) = Σ_j h_j(x)²; 0 when there are no equalities."""
    x = _check_point(p, x)
    return float(sum(evaluate(h, x) ** 2 for h in p.h_list))


def classify(p: ProblemInstance, x, tol: float) -> Classification:
    x = _check_point(p, x)
    in_box = bool(np.all(x >= np.asarray(p.box_lower) - tol) and np.all(x <= np.asarray(p.box_upper) + tol))
    in_X = in_box and all(evaluate(c, x) <= tol for c in p.set_extra)
    g_values = [evaluate(g, x) for g in p.g]
    in_G = in_X and all(v <= tol for v in g_values)
    in_S = in_G and h_aggregate(p, x) <= tol ** 2
    active = [i for i, v in enumerate(g_values, start=1) if abs(v) <= tol]
    return Classification(in_X=in_X, in_G=in_G, in_S=in_S, active_set=active)


def validate_candidate(p: ProblemInstance, cand: Candidate) -> Classification:
    """Raise InvalidCandidate unless x̄ lies in S (hence in G and X)."""
    if len(cand.x_bar) != p.dim:
        raise InvalidCandidate(f"candidate has length {len(cand.x_bar)}, problem dimension is {p.dim}")
    cls = classify(p, cand.x_bar, cand.feas_tol)
    if not cls.in_S:
        where = "X" if not cls.in_X else "G" if not cls.in_G else "S"
        raise InvalidCandidate(f"candidate {list(cand.x_bar)} is not in {where} (tol={cand.feas_tol})")
    return cls


# ─────────────────────────────────────────
# Vectorized queries
# ─────────────────────────────────────────

def h_aggregate_many(p: ProblemInstance, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(points)
    total = np.zeros(points.shape[0])
    for h in p.h_list:
        total += evaluate_many(h, points) ** 2
    return total


def membership_many(p: ProblemInstance, points: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boolean masks (in_X, in_G, in_S) for each row of points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    in_X = np.all(points >= np.asarray(p.box_lower) - tol, axis=1) & np.all(
        points <= np.asarray(p.box_upper) + tol, axis=1
    )
    for c in p.set_extra:
        in_X &= evaluate_many(c, points) <= tol
    in_G = in_X.copy()
    for g in p.g:
        in_G &= evaluate_many(g, points) <= tol
    in_S = in_G & (h_aggregate_many(p, points) <= tol ** 2) if p.h_list else in_G.copy()
    return in_X, in_G, in_S


def set_oracle(p: ProblemInstance, which: SetName, tol: float) -> Oracle:
    """Tolerance-thickened membership predicate for X, G or S over (N, dim) arrays."""
    index = {"X": 0, "G": 1, "S": 2}[which]

    def oracle(points: np.ndarray) -> np.ndarray:
        return membership_many(p, points, tol)[index]

    return oracle


def objective_fn(p: ProblemInstance) -> PointFn:
    return lambda points: evaluate_many(p.f, points)


def constraint_fn(p: ProblemInstance, i: int) -> PointFn:
    """g_i for 1-based index i."""
    g = p.g[i - 1]
    return lambda points: evaluate_many(g, points)


def h_fn(p: ProblemInstance) -> PointFn:
    return lambda points: h_aggregate_many(p, points)


# ─────────────────────────────────────────
# Problem files
# ─────────────────────────────────────────

def _require(section: dict, key: str, where: str):
    if key not in section:
        raise FormatError(f"missing field '{key}' in [{where}]")
    return section[key]


def _real(value, field: str, allow_inf: bool = False) -> float:
    if isinstance(value, bool):
        raise FormatError(f"{field}: expected a real number, got {value!r}")
    if isinstance(value, str) and allow_inf:
        text = value.strip().lower()
        if text in ("+inf", "inf"):
            return math.inf
        if text == "-inf":
            return -math.inf
        raise FormatError(f"{field}: expected a real or \"±inf\", got {value!r}")
    if not isinstance(value, (int, float)):
        raise FormatError(f"{field}: expected a real number, got {value!r}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise FormatError(f"{field}: expected a finite real, got {value!r}")
    return value


def _real_list(value, field: str, length: int, allow_inf: bool = False) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise FormatError(f"{field}: expected a list")
    if len(value) != length:
        raise FormatError(f"{field}: expected {length} entries, got {len(value)}")
    return tuple(_real(v, f"{field}[{k}]", allow_inf) for k, v in enumerate(value))


def _expr_list(section: dict, key: str, dim: int) -> tuple[ExprAst, ...]:
    raw = section.get(key, [])
    if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
        raise FormatError(f"[problem].{key}: expected a list of expression strings")
    return tuple(_parse_field(s, dim, f"[problem].{key}[{k}]") for k, s in enumerate(raw))


def _parse_field(text: str, dim: int, field: str) -> ExprAst:
    try:
        return parse(text, dim)
    except CertifyError as e:
        e.add_note(f"in {field}: {text!r}")
        raise


def load_problem(path: str | Path) -> tuple[ProblemInstance, Candidate]:
    """
    Load a problem file.

    Format (TOML):
        [problem]   dim, objective, inequalities, equalities, set_lower, set_upper,
                    set_constraints, lipschitz (optional)
        [candidate] point, delta, feas_tol (optional)

    Raises:
        ProblemIoError: file missing or unreadable
        FormatError: missing section/field or malformed value
        ExprSyntaxError / UnknownIdentifier / VariableOutOfRange: bad expression
        InvalidCandidate: the candidate point is not in S
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ProblemIoError(f"Cannot read problem file {path}: {e}") from e
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as e:
        raise FormatError(f"{path}: not a valid UTF-8 TOML document: {e}") from e

    prob = doc.get("problem")
    cand = doc.get("candidate")
    if not isinstance(prob, dict):
        raise FormatError("missing section [problem]")
    if not isinstance(cand, dict):
        raise FormatError("missing section [candidate]")

    dim = _require(prob, "dim", "problem")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError(f"[problem].dim: expected a positive integer, got {dim!r}")
    objective = _require(prob, "objective", "problem")
    if not isinstance(objective, str):
        raise FormatError("[problem].objective: expected an expression string")

    lipschitz = prob.get("lipschitz")
    if lipschitz is not None:
        lipschitz = _real(lipschitz, "[problem].lipschitz")
        if lipschitz <= 0:
            raise FormatError("[problem].lipschitz must be positive")

    try:
        problem = ProblemInstance(
            dim=dim,
            f=_parse_field(objective, dim, "[problem].objective"),
            g=_expr_list(prob, "inequalities", dim),
            h_list=_expr_list(prob, "equalities", dim),
            box_lower=_real_list(prob.get("set_lower", ["-inf"] * dim), "[problem].set_lower", dim, allow_inf=True),
            box_upper=_real_list(prob.get("set_upper", ["+inf"] * dim), "[problem].set_upper", dim, allow_inf=True),
            set_extra=_expr_list(prob, "set_constraints", dim),
            lipschitz_L=lipschitz,
            digest=hashlib.sha256(raw).hexdigest(),
        )
    except ValueError as e:
        raise FormatError(str(e)) from e

    point = _real_list(_require(cand, "point", "candidate"), "[candidate].point", dim)
    delta = _real(_require(cand, "delta", "candidate"), "[candidate].delta")
    if delta <= 0:
        raise FormatError("[candidate].delta must be positive")
    kwargs: dict = {"x_bar": point, "delta": delta}
    if "feas_tol" in cand:
        kwargs["feas_tol"] = _real(cand["feas_tol"], "[candidate].feas_tol")
        if kwargs["feas_tol"] <= 0:
            raise FormatError("[candidate].feas_tol must be positive")
    candidate = Candidate(**kwargs)

    validate_candidate(problem, candidate)
    logger.info(
        "Problem loaded: %s (n=%d, m=%d, q=%d), x̄=%s, δ=%g",
        path.name, problem.dim, problem.m, problem.q, list(point), delta,
    )
    return problem, candidate
