"""
tools/__init__.py — Pipeline registry

Every command is a function (CommandSpec, ProblemInstance, Candidate) -> PipelineOutcome;
cli.py and server.py both look commands up in COMMANDS.
"""

from penalty_cert.tools.certificates import (
    run_certify_fj,
    run_certify_isolated,
    run_check_abadie,
    run_check_cq,
)
from penalty_cert.tools.derivatives import run_derivative, run_tangent
from penalty_cert.tools.penalty_path import resolve_gamma, run_penalty_path

COMMANDS = {
    "derivative": run_derivative,
    "tangent": run_tangent,
    "penalty-path": run_penalty_path,
    "check-cq": run_check_cq,
    "certify-fj": run_certify_fj,
    "certify-isolated": run_certify_isolated,
    "check-abadie": run_check_abadie,
}

__all__ = [
    "COMMANDS",
    # derivatives
    "run_derivative",
    "run_tangent",
    # penalty
    "run_penalty_path",
    "resolve_gamma",
    # certificates
    "run_check_cq",
    "run_certify_fj",
    "run_certify_isolated",
    "run_check_abadie",
]
