"""
certify.py — Checkable optimality conditions

Provides:
- cq_margin / check_cq: d(x) = inf over unit u ∈ T(G,x) of ld h(x;u;X), and the
  requirement d(x) <= -a on sampled points of N_δ(x̄) outside S
- separation_certificate: (λ, μ) >= 0 with λa + <μ,b> > 0 iff (a,b) ∉ [-inf,0]^(1+p)
- descent_system_solvable: is u a descent direction for F and every active g_i
- derivative_vector: ᾱ = (ld F(x̄;u;X), d(g_i)(x̄;u;X) for i ∈ I(x̄))
- fritz_john_at: nonstrict multiplier certificate for one direction
- isolated_sufficient: strict certificates on a direction sample
- abadie_check: compare T(G,x̄) with the linearized cone C(x̄)

Multipliers are nonnegative, a component equal to -inf always gets a zero
multiplier, and no equality-constraint multipliers are produced (the penalty
absorbs them). Every certificate is re-validated through xdot before it is returned.
"""

from __future__ import annotations

import logging
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from penalty_cert.config import get_diff_tol, get_feas_tol, get_strict_tol
from penalty_cert.errors import NoOffSPoints, NotInG
from penalty_cert.extended_real import POS_INF, ZERO, ExtReal, ExtRealStr, xdot
from penalty_cert.hadamard import (
    SamplingSchedule,
    hadamard_diff_check,
    lower_hadamard,
    sample_unit_directions,
    tangent_cone_member,
)
from penalty_cert.penalty import PROX, sample_ball
from penalty_cert.problem_model import (
    Candidate,
    ProblemInstance,
    classify,
    constraint_fn,
    h_aggregate_many,
    h_fn,
    membership_many,
    objective_fn,
    set_oracle,
    validate_candidate,
)

logger = logging.getLogger(__name__)


# ─────────────────────────────────────────
# Report types
# ─────────────────────────────────────────

class DerivativeVector(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha0: ExtRealStr
    alpha: list[ExtRealStr]
    direction: list[float]
    gamma_used: float
    active_set: list[int]
    warnings: list[str] = Field(default_factory=list)

    @property
    def components(self) -> list[ExtReal]:
        return [self.alpha0, *self.alpha]


class Certificate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    lam: list[float] = Field(serialization_alias="lambda")
    kind: Literal["nonstrict", "strict"]
    direction: list[float]
    pairing_value: ExtRealStr

    def validate_against(self, components: Sequence[ExtReal]) -> None:
        """Re-check λ >= 0, λ != 0, the -inf rules and the pairing sign; raise ValueError on failure."""
        if len(self.lam) != len(components):
            raise ValueError("certificate length does not match the derivative vector")
        if any(w < 0 for w in self.lam) or not any(w > 0 for w in self.lam):
            raise ValueError(f"multipliers must be nonnegative and not all zero: {self.lam}")
        if any(w > 0 and c.is_neg_inf for w, c in zip(self.lam, components)):
            raise ValueError("a -inf component carries a positive multiplier")
        pairing = xdot(self.lam, components)
        if pairing != self.pairing_value:
            raise ValueError(f"stored pairing {self.pairing_value} differs from recomputed {pairing}")
        if self.kind == "nonstrict" and pairing < ZERO:
            raise ValueError(f"nonstrict certificate pairs negatively: {pairing}")
        if self.kind == "strict" and not pairing > ZERO:
            raise ValueError(f"strict certificate does not pair positively: {pairing}")


class DirectionVerdict(BaseModel):
    direction: list[float]
    derivatives: DerivativeVector
    certificate: Optional[Certificate] = None
    # the descent system matching the certificate kind; solvable iff no certificate
    descent_solvable: bool = False


class IsolatedReport(BaseModel):
    certified: bool
    strict_tol: float
    per_direction: list[DirectionVerdict]


class CqReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    a: float
    sampled_points: list[list[float]]
    d_hat: list[ExtRealStr]
    worst: ExtRealStr
    passed: bool = Field(serialization_alias="pass")


class AbadieDirection(BaseModel):
    direction: list[float]
    in_T: bool
    in_C: bool


class AbadieReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    passed: bool = Field(serialization_alias="pass")
    mismatches: list[list[float]]
    per_direction: list[AbadieDirection]


# ─────────────────────────────────────────
# Constraint qualification
# ─────────────────────────────────────────

def cq_margin(
    p: ProblemInstance, x, dir_count: int, sched: SamplingSchedule, tol: Optional[float] = None
) -> ExtReal:
    """
    d(x): minimum of ld h(x;u;X) over sampled unit u that lie in T(G,x); +inf if none do.

    Raises:
        NotInG: x is not in G
    """
    tol = get_feas_tol() if tol is None else tol
    x = np.asarray(x, dtype=float)
    if not classify(p, x, tol).in_G:
        raise NotInG(f"cq_margin needs x ∈ G, got {x.tolist()}")
    in_G, in_X = set_oracle(p, "G", tol), set_oracle(p, "X", tol)
    h = h_fn(p)
    margin = POS_INF
    for u in sample_unit_directions(dir_count, p.dim, sched.seed):
        if not tangent_cone_member(in_G, x, u, sched):
            continue
        margin = min(margin, lower_hadamard(h, in_X, x, u, sched).value)
    return margin


def _off_s_points(p: ProblemInstance, cand: Candidate, count: int, seed: int) -> np.ndarray:
    """Up to count seeded points of N_δ(x̄) ∩ G with h > tol², by rejection."""
    tol = cand.feas_tol
    batch = max(4 * count, 256)
    found: list[np.ndarray] = []
    total = 0
    for attempt in range(50):
        pts = sample_ball(cand.point, cand.delta, batch, [seed, attempt])
        in_G = membership_many(p, pts, tol)[1]
        pts = pts[in_G]
        if pts.shape[0]:
            pts = pts[h_aggregate_many(p, pts) > tol ** 2]
        found.append(pts)
        total += pts.shape[0]
        if total >= count:
            break
    points = np.vstack(found)[:count]
    if 0 < points.shape[0] < count:
        logger.warning("Only %d of %d requested off-S points found", points.shape[0], count)
    return points


def check_cq(
    p: ProblemInstance,
    cand: Candidate,
    a: float,
    point_count: int,
    dir_count: int,
    sched: SamplingSchedule,
    seed: int,
) -> CqReport:
    """
    Condition d(x) <= -a on point_count seeded points of N_δ(x̄) ∩ G outside S.

    Raises:
        ValueError: a <= 0 or point_count < 1
        NoOffSPoints: no sampled point lies off S (e.g. q = 0)
    """
    if not a > 0 or point_count < 1:
        raise ValueError("a must be positive and point_count at least 1")
    validate_candidate(p, cand)
    points = _off_s_points(p, cand, point_count, seed)
    if points.shape[0] == 0:
        raise NoOffSPoints(f"no point of N_δ(x̄) ∩ G with h > {cand.feas_tol ** 2:g} was found")
    margins = [cq_margin(p, x, dir_count, sched, cand.feas_tol) for x in points]
    worst = max(margins)
    bound = ExtReal.finite(-a)
    passed = all(d <= bound for d in margins)
    logger.info("CQ check a=%g: worst margin %s over %d points -> %s", a, worst, len(margins), "pass" if passed else "fail")
    return CqReport(a=a, sampled_points=points.tolist(), d_hat=margins, worst=worst, passed=passed)


# ─────────────────────────────────────────
# Separation and descent systems
# ─────────────────────────────────────────

def separation_certificate(a: ExtReal, b: Sequence[ExtReal]) -> Optional[tuple[float, list[float]]]:
    """
    (λ, μ) with λa + <μ,b> > 0, or None iff (a,b) ∈ [-inf,0]^(1+p).

    The single unit multiplier goes to the first strictly positive finite
    component, else to the first +inf component; everything else gets 0.
    """
    components = [a, *b]
    finite_pos = [i for i, c in enumerate(components) if c.is_finite and c.value > 0]
    infinite_pos = [i for i, c in enumerate(components) if c.is_pos_inf]
    chosen = finite_pos or infinite_pos
    if not chosen:
        return None
    weights = [0.0] * len(components)
    weights[chosen[0]] = 1.0
    return weights[0], weights[1:]


def descent_system_solvable(components: Sequence[ExtReal], strict: bool) -> bool:
    """
    strict=False: every component < 0 (the direction descends for F and all active g_i).
    strict=True: every component <= 0 (the non-strict system ruled out at an isolated minimizer).
    """
    if strict:
        return all(c <= ZERO for c in components)
    return all(c < ZERO for c in components)


# ─────────────────────────────────────────
# Multiplier certificates
# ─────────────────────────────────────────

def derivative_vector(
    p: ProblemInstance,
    cand: Candidate,
    u,
    gamma: float,
    sched: SamplingSchedule,
    diff_tol: Optional[float] = None,
) -> DerivativeVector:
    """ᾱ at x̄ in direction u, with F built at penalty weight γ and all derivatives taken over X."""
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    diff_tol = get_diff_tol() if diff_tol is None else diff_tol
    tol = cand.feas_tol
    x_bar = cand.point
    u = np.asarray(u, dtype=float)
    active = classify(p, x_bar, tol).active_set
    in_X = set_oracle(p, "X", tol)
    f, h = objective_fn(p), h_fn(p)

    def penalty(points: np.ndarray) -> np.ndarray:
        return f(points) + gamma * h(points) + PROX * np.sum((points - x_bar) ** 2, axis=1)

    alpha0 = lower_hadamard(penalty, in_X, x_bar, u, sched).value
    alpha: list[ExtReal] = []
    warnings: list[str] = []
    for i in active:
        check = hadamard_diff_check(constraint_fn(p, i), in_X, x_bar, u, sched, diff_tol)
        if not check.differentiable and not check.lower.is_pos_inf:
            msg = f"g{i} is not Hadamard differentiable at x̄ in direction {u.tolist()}; using lower estimate {check.lower}"
            logger.warning(msg)
            warnings.append(msg)
        alpha.append(check.value)
    return DerivativeVector(
        alpha0=alpha0, alpha=alpha, direction=u.tolist(), gamma_used=gamma, active_set=active, warnings=warnings
    )


def fritz_john_at(
    p: ProblemInstance,
    cand: Candidate,
    u,
    gamma: float,
    sched: SamplingSchedule,
    diff_tol: Optional[float] = None,
) -> tuple[Optional[Certificate], DerivativeVector]:
    """
    Nonstrict certificate λ >= 0, λ != 0 with <λ, ᾱ> >= 0 for direction u.

    λ is 1 on the first finite component >= 0; without one, 1 on every +inf
    component. None means ᾱ ∈ (-inf,0)^(p+1): the necessary condition is
    violated for u.
    """
    dv = derivative_vector(p, cand, u, gamma, sched, diff_tol)
    components = dv.components
    if descent_system_solvable(components, strict=False):
        logger.info("Fritz John condition violated for u=%s (ᾱ=%s)", dv.direction, [str(c) for c in components])
        return None, dv
    weights = [0.0] * len(components)
    finite_nonneg = [i for i, c in enumerate(components) if c.is_finite and c.value >= 0]
    if finite_nonneg:
        weights[finite_nonneg[0]] = 1.0
    else:
        for i, c in enumerate(components):
            if c.is_pos_inf:
                weights[i] = 1.0
    cert = Certificate(lam=weights, kind="nonstrict", direction=dv.direction, pairing_value=xdot(weights, components))
    cert.validate_against(components)
    return cert, dv


def _shifted(components: Sequence[ExtReal], strict_tol: float) -> list[ExtReal]:
    return [ExtReal.finite(c.value - strict_tol) if c.is_finite else c for c in components]


def strict_certificate(dv: DerivativeVector, strict_tol: float) -> Optional[Certificate]:
    """Strict certificate from separation_certificate after shifting finite components down by strict_tol."""
    components = dv.components
    shifted = _shifted(components, strict_tol)
    if descent_system_solvable(shifted, strict=True):
        return None
    sep = separation_certificate(shifted[0], shifted[1:])
    weights = [sep[0], *sep[1]]
    cert = Certificate(lam=weights, kind="strict", direction=dv.direction, pairing_value=xdot(weights, components))
    cert.validate_against(components)
    return cert


def fritz_john_all(
    p: ProblemInstance,
    cand: Candidate,
    gamma: float,
    dir_count: int,
    sched: SamplingSchedule,
    seed: int,
    diff_tol: Optional[float] = None,
) -> list[DirectionVerdict]:
    validate_candidate(p, cand)
    verdicts = []
    for u in sample_unit_directions(dir_count, p.dim, seed):
        cert, dv = fritz_john_at(p, cand, u, gamma, sched, diff_tol)
        verdicts.append(
            DirectionVerdict(
                direction=dv.direction,
                derivatives=dv,
                certificate=cert,
                descent_solvable=descent_system_solvable(dv.components, strict=False),
            )
        )
    return verdicts


def isolated_sufficient(
    p: ProblemInstance,
    cand: Candidate,
    gamma: float,
    dir_count: int,
    sched: SamplingSchedule,
    seed: int,
    strict_tol: Optional[float] = None,
    diff_tol: Optional[float] = None,
) -> IsolatedReport:
    """
    Strict certificate on every sampled direction ⇒ x̄ reported as an isolated local minimizer.

    A direction fails when ᾱ ∈ [-inf, strict_tol]^(1+p), i.e. the "<= 0" system is
    solvable up to the strictness margin.
    """
    strict_tol = get_strict_tol() if strict_tol is None else strict_tol
    validate_candidate(p, cand)
    verdicts = []
    for u in sample_unit_directions(dir_count, p.dim, seed):
        dv = derivative_vector(p, cand, u, gamma, sched, diff_tol)
        verdicts.append(
            DirectionVerdict(
                direction=dv.direction,
                derivatives=dv,
                certificate=strict_certificate(dv, strict_tol),
                descent_solvable=descent_system_solvable(_shifted(dv.components, strict_tol), strict=True),
            )
        )
    certified = all(v.certificate is not None for v in verdicts)
    logger.info("Isolated sufficiency: %s on %d direction(s)", "certified" if certified else "not certified", len(verdicts))
    return IsolatedReport(certified=certified, strict_tol=strict_tol, per_direction=verdicts)


# ─────────────────────────────────────────
# Abadie constraint qualification
# ─────────────────────────────────────────

def abadie_check(
    p: ProblemInstance,
    cand: Candidate,
    dir_count: int,
    sched: SamplingSchedule,
    seed: int,
    tol: Optional[float] = None,
) -> AbadieReport:
    """
    Compare u ∈ T(G,x̄) with u ∈ C(x̄) = {u ∈ T(X,x̄) : d(g_i)(x̄;u;X) <= tol, i ∈ I(x̄)}.

    tol defaults to the Hadamard differentiability tolerance.
    """
    tol = get_diff_tol() if tol is None else tol
    validate_candidate(p, cand)
    x_bar = cand.point
    active = classify(p, x_bar, cand.feas_tol).active_set
    in_G, in_X = set_oracle(p, "G", cand.feas_tol), set_oracle(p, "X", cand.feas_tol)
    bound = ExtReal.finite(tol)
    rows, mismatches = [], []
    for u in sample_unit_directions(dir_count, p.dim, seed):
        in_T = tangent_cone_member(in_G, x_bar, u, sched)
        in_C = tangent_cone_member(in_X, x_bar, u, sched) and all(
            hadamard_diff_check(constraint_fn(p, i), in_X, x_bar, u, sched, tol).value <= bound for i in active
        )
        rows.append(AbadieDirection(direction=u.tolist(), in_T=in_T, in_C=in_C))
        if in_T != in_C:
            mismatches.append(u.tolist())
    if mismatches:
        logger.info("Abadie CQ fails on %d direction(s)", len(mismatches))
    return AbadieReport(passed=not mismatches, mismatches=mismatches, per_direction=rows)
