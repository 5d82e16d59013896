"""
config.py — Runtime configuration

Defaults for tolerances, the sampling schedule and grid limits are read from
the environment (a local .env is honoured). CLI flags override them.

Supported variables:
- PENCERT_FEAS_TOL, PENCERT_DIFF_TOL, PENCERT_STRICT_TOL
- PENCERT_T0, PENCERT_RATIO, PENCERT_LEVELS, PENCERT_SAMPLES,
  PENCERT_DIR_RADIUS, PENCERT_SEED
- PENCERT_MAX_GRID_POINTS
- LOG_LEVEL
"""

import logging
import os

from dotenv import load_dotenv

load_dotenv()
logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        raise EnvironmentError(f"{name} must be a number, got {raw!r}")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise EnvironmentError(f"{name} must be an integer, got {raw!r}")


def get_feas_tol() -> float:
    return _env_float("PENCERT_FEAS_TOL", 1e-9)


def get_diff_tol() -> float:
    """Spread allowed between max and min quotients for Hadamard differentiability."""
    return _env_float("PENCERT_DIFF_TOL", 1e-2)


def get_strict_tol() -> float:
    """Margin a derivative component must exceed to count as strictly positive."""
    return _env_float("PENCERT_STRICT_TOL", 5e-2)


def get_max_grid_points() -> int:
    return _env_int("PENCERT_MAX_GRID_POINTS", 5_000_000)


def get_schedule_defaults() -> dict:
    """Keyword defaults for hadamard.SamplingSchedule."""
    return {
        "t0": _env_float("PENCERT_T0", 1e-1),
        "ratio": _env_float("PENCERT_RATIO", 0.5),
        "levels": _env_int("PENCERT_LEVELS", 20),
        "samples": _env_int("PENCERT_SAMPLES", 64),
        "dir_radius_factor": _env_float("PENCERT_DIR_RADIUS", 1.0),
        "seed": _env_int("PENCERT_SEED", 0),
    }


def configure_logging() -> None:
    """Apply LOG_LEVEL; logs go to stderr so reports on stdout stay parseable."""
    logging.basicConfig(
        level=os.getenv("LOG_LEVEL", "INFO").upper(),
        format=LOG_FORMAT,
    )
