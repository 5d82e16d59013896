"""
cli.py — penalty-cert command line

Usage:
  penalty-cert <command> <problem.toml> [flags]

Commands: derivative, tangent, penalty-path, check-cq, certify-fj,
certify-isolated, check-abadie.

Exit codes: 0 computed and verdict pass, 1 computed and verdict fail,
2 input or runtime error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from penalty_cert.command import COMMAND_NAMES, CommandSpec
from penalty_cert.config import configure_logging
from penalty_cert.errors import CertifyError
from penalty_cert.problem_model import load_problem
from penalty_cert.report import Report, csv_path_for, write_penalty_csv, write_report
from penalty_cert.tools import COMMANDS

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="penalty-cert", description="Optimality certificates via exact penalty functions")
    ap.add_argument("command", choices=COMMAND_NAMES)
    ap.add_argument("problem", type=Path, help="Problem file (TOML)")
    ap.add_argument("--out", type=Path, default=None, help="JSON report path; stdout when omitted")

    pen = ap.add_argument_group("penalty")
    pen.add_argument("--gamma", type=float, default=None, help="Penalty weight for certificates; default threshold + 1")
    pen.add_argument("--gamma-max", type=float, default=3.0)
    pen.add_argument("--gamma-step", type=float, default=0.25)
    pen.add_argument("--grid-step", type=float, default=1e-3)
    pen.add_argument("--match-tol", type=float, default=1e-2)
    pen.add_argument("--growth-A", dest="growth_A", type=float, default=None, help="Check linear growth with this A")
    pen.add_argument("--growth-samples", type=int, default=10_000)

    cert = ap.add_argument_group("certificates")
    cert.add_argument("--a", type=float, default=0.5, help="CQ margin bound: require d(x) <= -a")
    cert.add_argument("--dirs", type=int, default=16, help="Number of sampled unit directions")
    cert.add_argument("--points", type=int, default=20, help="Number of sampled off-S points for check-cq")
    cert.add_argument("--set", dest="set_name", choices=("X", "G", "S"), default="S")
    cert.add_argument("--diff-tol", type=float, default=None)
    cert.add_argument("--strict-tol", type=float, default=None)

    sched = ap.add_argument_group("sampling schedule (defaults from PENCERT_* env)")
    sched.add_argument("--t0", type=float, default=None)
    sched.add_argument("--ratio", type=float, default=None)
    sched.add_argument("--levels", type=int, default=None)
    sched.add_argument("--samples", type=int, default=None)
    sched.add_argument("--seed", type=int, default=None)
    return ap


def spec_from_args(args: argparse.Namespace) -> CommandSpec:
    values = vars(args).copy()
    values["problem_path"] = values.pop("problem")
    values["output_path"] = values.pop("out")
    return CommandSpec(**values)


def _diagnose(e: BaseException) -> None:
    print(f"error: {e}", file=sys.stderr)
    for note in getattr(e, "__notes__", ()):
        print(f"  {note}", file=sys.stderr)


def execute(spec: CommandSpec, write_csv: bool = True) -> Report:
    """Load the problem, run the pipeline and assemble the report (CSV written for penalty-path)."""
    problem, cand = load_problem(spec.problem_path)
    config = spec.resolved_config()
    outcome = COMMANDS[spec.command](spec, problem, cand)
    if write_csv and outcome.penalty_path is not None:
        write_penalty_csv(outcome.penalty_path, csv_path_for(spec.output_path, spec.problem_path))
    report = Report(
        command=spec.command,
        config={"feas_tol": cand.feas_tol, "delta": cand.delta, **config},
        problem_digest=problem.digest,
        results={"problem": problem.describe(), "x_bar": list(cand.x_bar), **outcome.results},
        verdict="pass" if outcome.passed else "fail",
        warnings=outcome.warnings,
    )
    logger.info("%s: verdict %s", spec.command, report.verdict)
    return report


def run(spec: CommandSpec) -> int:
    """Execute one command and write its report; returns the exit code."""
    try:
        report = execute(spec)
        write_report(report, spec.output_path)
    except (CertifyError, OSError, ValueError, ValidationError) as e:
        logger.debug("%s failed", spec.command, exc_info=True)
        _diagnose(e)
        return EXIT_ERROR
    except Exception as e:
        logger.error("%s failed unexpectedly", spec.command, exc_info=True)
        _diagnose(e)
        return EXIT_ERROR
    return EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
    except ValidationError as e:
        _diagnose(e)
        return EXIT_ERROR
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
