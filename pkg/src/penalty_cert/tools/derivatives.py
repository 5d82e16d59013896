"""
tools/derivatives.py — derivative and tangent pipelines

Provides:
- run_derivative: ld f(x̄; u; set) on sampled directions, verdict = baseline necessary condition
- run_tangent: tangent cone membership of sampled directions (informational)
"""

import logging

from penalty_cert.command import CommandSpec
from penalty_cert.hadamard import baseline_necessary, lower_hadamard, sample_unit_directions, tangent_cone_member
from penalty_cert.problem_model import Candidate, ProblemInstance, objective_fn, set_oracle
from penalty_cert.report import PipelineOutcome

logger = logging.getLogger(__name__)


def run_derivative(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    sched = spec.schedule()
    directions = sample_unit_directions(spec.dirs, p.dim, sched.seed)
    oracle = set_oracle(p, spec.set_name, cand.feas_tol)
    f = objective_fn(p)

    estimates = [lower_hadamard(f, oracle, cand.point, u, sched) for u in directions]
    baseline = baseline_necessary(f, oracle, cand.point, directions, sched, spec.resolved_diff_tol())
    per_direction = [
        {"direction": u.tolist(), **est.model_dump(mode="json")} for u, est in zip(directions, estimates)
    ]
    logger.info("derivative: %d direction(s) over %s, baseline %s", len(directions), spec.set_name, baseline.holds)
    return PipelineOutcome(
        results={"set": spec.set_name, "per_direction": per_direction, "baseline_holds": baseline.holds},
        passed=baseline.holds,
    )


def run_tangent(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    sched = spec.schedule()
    oracle = set_oracle(p, spec.set_name, cand.feas_tol)
    rows = [
        {"direction": u.tolist(), "in_cone": tangent_cone_member(oracle, cand.point, u, sched)}
        for u in sample_unit_directions(spec.dirs, p.dim, sched.seed)
    ]
    return PipelineOutcome(
        results={"set": spec.set_name, "per_direction": rows, "in_cone_count": sum(r["in_cone"] for r in rows)},
        passed=True,
    )
