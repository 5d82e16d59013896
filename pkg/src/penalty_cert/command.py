"""
command.py — CommandSpec: one validated invocation of a pipeline

All numeric flags are checked here, before any problem file is read. Values
left unset fall back to the environment defaults from config.py; the resolved
values are what reports embed.
"""

import math
from pathlib import Path
from typing import Literal, Optional, get_args

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, NonNegativeInt, PositiveFloat, PositiveInt

from penalty_cert.config import get_diff_tol, get_strict_tol
from penalty_cert.hadamard import SamplingSchedule

CommandName = Literal[
    "derivative",
    "tangent",
    "penalty-path",
    "check-cq",
    "certify-fj",
    "certify-isolated",
    "check-abadie",
]

COMMAND_NAMES: tuple[str, ...] = get_args(CommandName)


class CommandSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: CommandName
    problem_path: Path
    output_path: Optional[Path] = None

    # penalty
    gamma: Optional[NonNegativeFloat] = None
    gamma_max: PositiveFloat = 3.0
    gamma_step: PositiveFloat = 0.25
    grid_step: PositiveFloat = 1e-3
    match_tol: PositiveFloat = 1e-2
    growth_A: Optional[PositiveFloat] = None
    growth_samples: PositiveInt = 10_000

    # certificates
    a: PositiveFloat = 0.5
    dirs: PositiveInt = 16
    points: PositiveInt = 20
    set_name: Literal["X", "G", "S"] = "S"
    diff_tol: Optional[PositiveFloat] = None
    strict_tol: Optional[PositiveFloat] = None

    # sampling schedule
    t0: Optional[PositiveFloat] = None
    ratio: Optional[float] = Field(None, gt=0.0, lt=1.0)
    levels: Optional[PositiveInt] = None
    samples: Optional[PositiveInt] = None
    seed: Optional[NonNegativeInt] = None

    def schedule(self) -> SamplingSchedule:
        return SamplingSchedule.from_env(
            t0=self.t0, ratio=self.ratio, levels=self.levels, samples=self.samples, seed=self.seed
        )

    def resolved_diff_tol(self) -> float:
        return get_diff_tol() if self.diff_tol is None else self.diff_tol

    def resolved_strict_tol(self) -> float:
        return get_strict_tol() if self.strict_tol is None else self.strict_tol

    def gamma_grid(self) -> list[float]:
        """0, step, 2·step, ... up to gamma_max inclusive."""
        count = int(math.floor(self.gamma_max / self.gamma_step + 1e-9))
        return [round(k * self.gamma_step, 12) for k in range(count + 1)]

    def resolved_config(self) -> dict:
        """Every effective setting, environment defaults included."""
        sched = self.schedule()
        return {
            "gamma": self.gamma,
            "gamma_max": self.gamma_max,
            "gamma_step": self.gamma_step,
            "grid_step": self.grid_step,
            "match_tol": self.match_tol,
            "growth_A": self.growth_A,
            "growth_samples": self.growth_samples,
            "a": self.a,
            "dirs": self.dirs,
            "points": self.points,
            "set": self.set_name,
            "diff_tol": self.resolved_diff_tol(),
            "strict_tol": self.resolved_strict_tol(),
            "schedule": sched.model_dump(),
        }
