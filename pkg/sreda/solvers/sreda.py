"""SREDA outer loop, stochastic and finite-sum.

Each outer step takes a normalized step on x with the current estimate v_k and
then calls the concave maximizer, which both tracks y*(x) and carries the
recursive estimator forward. Every q steps the estimator is re-anchored with
a fresh large batch (or the full gradient for finite sums).
"""

import dataclasses
from typing import Optional

import numpy as np
from loguru import logger

from sreda.core import EvalCounter, Iterate, RunStreams, Vec, as_vec, norm
from sreda.errors import CapabilityError
from sreda.estimator import init_full, init_restart
from sreda.inner_solvers import (
    InnerResult,
    NegatedSlice,
    ascent_step_limit,
    concave_maximizer,
    isarah,
    isarah_config,
    sarah,
    sarah_config,
)
from sreda.problems import ProblemOracle
from sreda.solvers.params import SredaParams, predicted_evals, step_size
from sreda.solvers.trace import RunTrace, TraceRow, diagnostic_row


def sreda_run(
    oracle: ProblemOracle,
    x0: Vec,
    params: SredaParams,
    streams: RunStreams,
    diagnostics: bool = True,
    iteration_cap: Optional[int] = None,
) -> RunTrace:
    """Run stochastic SREDA with an iSARAH initializer.

    Args:
        oracle: Problem oracle
        x0: Starting point
        params: Parameters from ``derive_params`` or user supplied
        streams: Random streams owned by this run
        diagnostics: Record exact gradient diagnostics per row
        iteration_cap: Run at most this many outer iterations

    Returns:
        RunTrace with K + 1 rows (or cap + 1 when capped)
    """
    return _run(oracle, x0, params, streams, diagnostics, iteration_cap, finite=False)


def sreda_finite_run(
    oracle: ProblemOracle,
    x0: Vec,
    params: SredaParams,
    streams: RunStreams,
    diagnostics: bool = True,
    iteration_cap: Optional[int] = None,
) -> RunTrace:
    """Run finite-sum SREDA: SARAH initializer and full-gradient restarts."""
    if not oracle.is_finite_sum:
        raise CapabilityError("sreda-finite needs a finite-sum problem")
    return _run(oracle, x0, params, streams, diagnostics, iteration_cap, finite=True)


def _run(
    oracle: ProblemOracle,
    x0: Vec,
    params: SredaParams,
    streams: RunStreams,
    diagnostics: bool,
    iteration_cap: Optional[int],
    finite: bool,
) -> RunTrace:
    algorithm = "sreda-finite" if finite else "sreda"
    x0 = as_vec(x0, oracle.d1, "x0")
    if diagnostics and not oracle.has_exact_grad:
        raise CapabilityError(
            f"Diagnostics need exact gradients, which {type(oracle).__name__} lacks"
        )
    counter = EvalCounter()
    warnings: list[str] = []

    y0, init_cfg = _initial_y(oracle, x0, params, streams, counter, finite)
    init_evals = counter.count
    if diagnostics:
        reached = oracle.exact_grad(Iterate(x0, y0)).gy
        reached_sq = float(reached @ reached)
        if reached_sq > params.zeta:
            _warn(
                warnings,
                f"Initializer stopped at |grad_y f|^2 = {reached_sq:.3e}, above zeta = {params.zeta:.3e}",
            )

    if params.lam > ascent_step_limit(oracle):
        _warn(
            warnings,
            f"lam = {params.lam:.6g} exceeds 2/(mu+ell) = {ascent_step_limit(oracle):.6g}",
        )

    K = params.K
    certified = True
    if iteration_cap is not None and iteration_cap < K:
        _warn(warnings, f"Capped at {iteration_cap} of {K} outer iterations; bound not certified")
        K = iteration_cap
        certified = False

    logger.info(
        f"{algorithm}: K={K} q={params.q} S1={params.S1} S2={params.S2} m={params.m} "
        f"init_evals={init_evals}"
    )

    x, y = x0, y0
    x_path = [x0]
    rows: list[TraceRow] = []
    prev: Optional[InnerResult] = None
    for k in range(K):
        point = Iterate(x, y)
        physical, paper = counter.snapshot()
        if k % params.q == 0:
            if finite:
                state = init_full(oracle, point, counter)
            else:
                state = init_restart(oracle, point, params.S1, streams.restart_batch, counter)
            v, u = state.v, state.u
            logger.debug(f"{algorithm} k={k}: restart, evals={counter.count}")
        else:
            v, u = prev.v_next, prev.u_next

        v_norm = norm(v)
        eta = step_size(params, v_norm)
        x_new = x - eta * v
        rows.append(
            diagnostic_row(k, physical, paper, oracle, point, diagnostics, eta=eta, v=v, u=u)
        )
        prev = concave_maximizer(
            oracle,
            x,
            x_new,
            y,
            v,
            u,
            params.lam,
            params.m,
            params.S2,
            streams.inner_batch,
            streams.index_sk,
            counter,
            check_step=False,
        )
        x, y = x_new, prev.y_next
        x_path.append(x)

    physical, paper = counter.snapshot()
    rows.append(diagnostic_row(K, physical, paper, oracle, Iterate(x, y), diagnostics))

    if K == 0:
        x_hat_index = 0
    else:
        x_hat_index = int(streams.index_sk.integers(0, K))
    x_hat = x_path[x_hat_index]

    predicted = predicted_evals(params, init_evals)
    logger.info(
        f"{algorithm} finished: {K} iterations, evals={physical} (paper {paper}), "
        f"x_hat index {x_hat_index}"
    )
    return RunTrace(
        algorithm=algorithm,
        rows=rows,
        x_hat=x_hat,
        x_hat_index=x_hat_index,
        y0=y0,
        x_path=x_path,
        bound_certified=certified,
        total_evals=physical,
        total_evals_paper=paper,
        metadata={
            "params": dataclasses.asdict(params),
            "init": dataclasses.asdict(init_cfg),
            "init_evals": init_evals,
            "predicted_evals_paper": predicted.paper,
            "predicted_evals_physical": predicted.physical,
            "predicted_bound": params.predicted_bound,
        },
        warnings=warnings,
    )


def _initial_y(oracle, x0, params, streams, counter, finite):
    objective = NegatedSlice(oracle, x0)
    w0 = np.zeros(oracle.d2)
    if finite:
        cfg = sarah_config(objective, w0, params.zeta, counter)
        return sarah(objective, w0, cfg, streams.init, streams.init_index, counter), cfg
    cfg = isarah_config(objective, w0, params.zeta, streams.init, counter)
    return isarah(objective, w0, cfg, streams.init, streams.init_index, counter), cfg


def _warn(warnings: list[str], message: str) -> None:
    logger.warning(message)
    warnings.append(message)
