"""Registered solver entry points.

Each entry derives default parameters for the request, applies the config
overrides, and runs the solver:
- sreda: stochastic SREDA
- sreda-finite: finite-sum SREDA
- sgda: stochastic gradient descent ascent
- sgdmax: stochastic gradient descent with a max-oracle
"""

from sreda.solvers.baselines import sgda_run, sgdmax_run
from sreda.solvers.params import (
    apply_overrides,
    derive_baseline_params,
    derive_params,
    derive_params_finite,
)
from sreda.solvers.solver_registry import SOLVER_REGISTRY, SolverRequest
from sreda.solvers.sreda import sreda_finite_run, sreda_run
from sreda.solvers.trace import RunTrace


@SOLVER_REGISTRY.register("sreda")
def run_sreda(request: SolverRequest) -> RunTrace:
    """Stochastic recursive gradient descent ascent with iSARAH initialization"""
    params = derive_params(request.epsilon, request.oracle.profile, request.delta_f)
    params = apply_overrides(params, request.overrides)
    return sreda_run(
        request.oracle,
        request.x0,
        params,
        request.streams,
        diagnostics=request.diagnostics,
        iteration_cap=request.iteration_cap,
    )


@SOLVER_REGISTRY.register("sreda-finite", requires_finite_sum=True)
def run_sreda_finite(request: SolverRequest) -> RunTrace:
    """Finite-sum SREDA with SARAH initialization and full-gradient restarts"""
    oracle = request.oracle
    params = derive_params_finite(request.epsilon, oracle.profile, request.delta_f, oracle.n)
    params = apply_overrides(params, request.overrides)
    return sreda_finite_run(
        oracle,
        request.x0,
        params,
        request.streams,
        diagnostics=request.diagnostics,
        iteration_cap=request.iteration_cap,
    )


@SOLVER_REGISTRY.register("sgda")
def run_sgda(request: SolverRequest) -> RunTrace:
    """Simultaneous stochastic gradient descent on x and ascent on y"""
    bp = derive_baseline_params("sgda", request.epsilon, request.oracle.profile, request.delta_f)
    bp = apply_overrides(bp, request.overrides)
    return sgda_run(
        request.oracle,
        request.x0,
        request.y0,
        bp,
        request.streams,
        diagnostics=request.diagnostics,
        iteration_cap=request.iteration_cap,
    )


@SOLVER_REGISTRY.register("sgdmax")
def run_sgdmax(request: SolverRequest) -> RunTrace:
    """Stochastic gradient descent on x against budgeted stochastic ascent on y"""
    bp = derive_baseline_params(
        "sgdmax",
        request.epsilon,
        request.oracle.profile,
        request.delta_f,
        inner_cap=request.inner_cap,
    )
    bp = apply_overrides(bp, request.overrides)
    return sgdmax_run(
        request.oracle,
        request.x0,
        bp,
        request.streams,
        diagnostics=request.diagnostics,
        iteration_cap=request.iteration_cap,
        y0=request.y0,
    )
