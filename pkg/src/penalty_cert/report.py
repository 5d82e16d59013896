"""
report.py — Machine-readable run reports

Provides:
- PipelineOutcome: what a pipeline hands back to the CLI (results, verdict, warnings)
- Report: the JSON document {command, config, problem_digest, results, verdict, warnings, timestamp}
- render_report / write_report: JSON emission (stable key order, only the timestamp varies)
- write_penalty_csv: the penalty path as CSV (gamma, argmin_1..argmin_n, min_value, dist_to_xbar)
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from penalty_cert.penalty import PenaltyPathResult

logger = logging.getLogger(__name__)


def csv_header(dim: int) -> list[str]:
    return ["gamma", *(f"argmin_{k}" for k in range(1, dim + 1)), "min_value", "dist_to_xbar"]


@dataclass
class PipelineOutcome:
    results: dict[str, Any]
    passed: bool
    warnings: list[str] = field(default_factory=list)
    penalty_path: Optional[PenaltyPathResult] = None


class Report(BaseModel):
    command: str
    config: dict[str, Any]
    problem_digest: str
    results: dict[str, Any]
    verdict: Literal["pass", "fail"]
    warnings: list[str] = Field(default_factory=list)
    timestamp: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())


def render_report(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), ensure_ascii=False, indent=2) + "\n"


def write_report(report: Report, path: Optional[Path]) -> None:
    """Write to path, or to stdout when path is None."""
    text = render_report(report)
    if path is None:
        print(text, end="")
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Report written: %s", path)


def csv_path_for(out_path: Optional[Path], problem_path: Path) -> Path:
    if out_path is not None:
        return Path(out_path).with_suffix(".csv")
    return Path.cwd() / f"{Path(problem_path).stem}-penalty-path.csv"


def write_penalty_csv(result: PenaltyPathResult, path: Path) -> None:
    """One row per γ: gamma, one column per argmin component, min_value, dist_to_xbar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        dim = len(result.per_gamma[0].argmin) if result.per_gamma else 0
        writer.writerow(csv_header(dim))
        for pt in result.per_gamma:
            writer.writerow([repr(pt.gamma), *(repr(c) for c in pt.argmin), repr(pt.min_value), repr(pt.dist_to_xbar)])
    logger.info("Penalty path CSV written: %s", path)
