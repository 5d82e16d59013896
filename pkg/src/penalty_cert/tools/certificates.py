"""
tools/certificates.py — certificate and constraint-qualification pipelines

Provides:
- run_check_cq: d(x) <= -a on sampled points of N_δ(x̄) ∩ G outside S
- run_certify_fj: nonstrict multiplier certificate per sampled direction
- run_certify_isolated: strict certificates ⇒ isolated local minimizer
- run_check_abadie: T(G,x̄) against the linearized cone C(x̄)
"""

import logging

from penalty_cert.certify import abadie_check, check_cq, fritz_john_all, isolated_sufficient
from penalty_cert.command import CommandSpec
from penalty_cert.problem_model import Candidate, ProblemInstance
from penalty_cert.report import PipelineOutcome
from penalty_cert.tools.penalty_path import resolve_gamma

logger = logging.getLogger(__name__)


def _dump(model) -> dict:
    return model.model_dump(mode="json", by_alias=True)


def run_check_cq(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    sched = spec.schedule()
    report = check_cq(p, cand, spec.a, spec.points, spec.dirs, sched, sched.seed)
    warnings = []
    if len(report.sampled_points) < spec.points:
        warnings.append(f"only {len(report.sampled_points)} of {spec.points} off-S points were found")
    return PipelineOutcome(results=_dump(report), passed=report.passed, warnings=warnings)


def run_certify_fj(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    warnings: list[str] = []
    gamma, source = resolve_gamma(spec, p, cand, warnings)
    sched = spec.schedule()
    verdicts = fritz_john_all(p, cand, gamma, spec.dirs, sched, sched.seed, spec.resolved_diff_tol())
    violated = [v.direction for v in verdicts if v.certificate is None]
    for v in verdicts:
        warnings.extend(v.derivatives.warnings)
    return PipelineOutcome(
        results={
            "gamma": gamma,
            "gamma_source": source,
            "certified_count": len(verdicts) - len(violated),
            "violated_directions": violated,
            "per_direction": [_dump(v) for v in verdicts],
        },
        passed=not violated,
        warnings=warnings,
    )


def run_certify_isolated(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    warnings: list[str] = []
    gamma, source = resolve_gamma(spec, p, cand, warnings)
    sched = spec.schedule()
    report = isolated_sufficient(
        p, cand, gamma, spec.dirs, sched, sched.seed, spec.resolved_strict_tol(), spec.resolved_diff_tol()
    )
    for v in report.per_direction:
        warnings.extend(v.derivatives.warnings)
    return PipelineOutcome(
        results={"gamma": gamma, "gamma_source": source, **_dump(report)},
        passed=report.certified,
        warnings=warnings,
    )


def run_check_abadie(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    sched = spec.schedule()
    report = abadie_check(p, cand, spec.dirs, sched, sched.seed, spec.resolved_diff_tol())
    return PipelineOutcome(results=_dump(report), passed=report.passed)
