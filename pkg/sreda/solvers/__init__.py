"""Outer solvers, their parameters, and the registry the harness uses."""

from .baselines import MaxOracleResult, sga_max_oracle, sgda_run, sgdmax_run
from .params import (
    BaselineParams,
    PredictedEvals,
    SredaParams,
    apply_overrides,
    derive_baseline_params,
    derive_params,
    derive_params_finite,
    predicted_evals,
    step_size,
)
from .solver_registry import SOLVER_REGISTRY, SolverMetadata, SolverRegistry, SolverRequest
from .sreda import sreda_finite_run, sreda_run
from .trace import CSV_COLUMNS, RunTrace, TraceRow

__all__ = [
    "BaselineParams",
    "CSV_COLUMNS",
    "MaxOracleResult",
    "PredictedEvals",
    "RunTrace",
    "SOLVER_REGISTRY",
    "SolverMetadata",
    "SolverRegistry",
    "SolverRequest",
    "SredaParams",
    "TraceRow",
    "apply_overrides",
    "derive_baseline_params",
    "derive_params",
    "derive_params_finite",
    "predicted_evals",
    "sga_max_oracle",
    "sgda_run",
    "sgdmax_run",
    "sreda_finite_run",
    "sreda_run",
    "step_size",
]

# Import entry points to trigger registration
from . import entrypoints  # noqa: F401
