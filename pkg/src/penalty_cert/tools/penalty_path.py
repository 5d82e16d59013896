"""
tools/penalty_path.py — penalty-path pipeline and the default certificate weight

Provides:
- run_penalty_path: γ sweep, exactness threshold, monotonicity, optional growth check
- resolve_gamma: the weight γ used by the certificate commands
"""

import logging

from penalty_cert.command import CommandSpec
from penalty_cert.penalty import exactness_threshold, isolated_growth_check, monotone_violations
from penalty_cert.problem_model import Candidate, ProblemInstance
from penalty_cert.report import PipelineOutcome

logger = logging.getLogger(__name__)


def run_penalty_path(spec: CommandSpec, p: ProblemInstance, cand: Candidate) -> PipelineOutcome:
    path = exactness_threshold(
        p, cand.point, cand.delta, spec.gamma_grid(), spec.grid_step, spec.match_tol, cand.feas_tol
    )
    warnings: list[str] = []
    violations = monotone_violations(path)
    if violations:
        warnings.append(f"exactness lost again at larger γ for {len(violations)} pair(s)")
    if path.threshold_s is None:
        warnings.append(f"no exactness threshold on γ ∈ [0, {spec.gamma_max:g}]")

    results: dict = {
        "path": path.model_dump(mode="json"),
        "monotone_violations": [list(v) for v in violations],
    }
    passed = path.threshold_s is not None
    if spec.growth_A is not None:
        gamma = (path.threshold_s if path.threshold_s is not None else spec.gamma_max) + 1.0
        growth = isolated_growth_check(
            p, cand.point, cand.delta, gamma, spec.growth_A, spec.growth_samples,
            spec.schedule().seed, spec.grid_step, cand.feas_tol,
        )
        results["growth"] = growth.model_dump(mode="json")
        passed = passed and growth.holds
    return PipelineOutcome(results=results, passed=passed, warnings=warnings, penalty_path=path)


def resolve_gamma(spec: CommandSpec, p: ProblemInstance, cand: Candidate, warnings: list[str]) -> tuple[float, str]:
    """
    --gamma when given, else threshold + 1 from a penalty path, else gamma_max + 1.

    Returns:
        (gamma, source) with source one of "flag", "threshold", "fallback"
    """
    if spec.gamma is not None:
        return spec.gamma, "flag"
    path = exactness_threshold(
        p, cand.point, cand.delta, spec.gamma_grid(), spec.grid_step, spec.match_tol, cand.feas_tol
    )
    if path.threshold_s is not None:
        return path.threshold_s + 1.0, "threshold"
    gamma = spec.gamma_max + 1.0
    msg = f"no exactness threshold on γ ∈ [0, {spec.gamma_max:g}]; using γ={gamma:g}"
    logger.warning(msg)
    warnings.append(msg)
    return gamma, "fallback"
