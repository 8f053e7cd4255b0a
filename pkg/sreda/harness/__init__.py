"""Experiment harness: problem setup, seeded runs, property checks and artifacts."""

from .checks import CHECK_REGISTRY, CheckRegistry, CheckResult, CheckScale
from .commands import build_problem, cmd_check, cmd_params, cmd_run, cmd_sweep
from .run_executor import SeedExecutor

__all__ = [
    "CHECK_REGISTRY",
    "CheckRegistry",
    "CheckResult",
    "CheckScale",
    "SeedExecutor",
    "build_problem",
    "cmd_check",
    "cmd_params",
    "cmd_run",
    "cmd_sweep",
]
