"""Gradient descent ascent baselines: SGDA and SGDmax."""

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from sreda.core import EvalCounter, Iterate, RunStreams, Vec, as_vec
from sreda.errors import CapabilityError
from sreda.problems import ProblemOracle
from sreda.solvers.params import BaselineParams
from sreda.solvers.trace import RunTrace, TraceRow, diagnostic_row


@dataclass(frozen=True)
class MaxOracleResult:
    y: Vec
    steps: int
    gap: Optional[float] = None


def sga_max_oracle(
    oracle: ProblemOracle,
    x: Vec,
    y: Vec,
    steps: int,
    lam: float,
    batch: int,
    rng: np.random.Generator,
    counter: EvalCounter,
    gap_tol: Optional[float] = None,
) -> MaxOracleResult:
    """Approximately maximize f(x, .) by mini-batch stochastic gradient ascent.

    Runs at most ``steps`` ascent steps. When ``gap_tol`` is given and the
    problem has a closed-form Phi, stops as soon as Phi(x) - f(x, y) <= gap_tol.
    """
    if gap_tol is not None and not oracle.has_phi:
        raise CapabilityError("An exact gap stop needs a closed-form Phi")
    phi = oracle.phi_value(x) if gap_tol is not None else None
    gap = None
    taken = 0
    for taken in range(steps + 1):
        if phi is not None:
            gap = phi - oracle.value(Iterate(x, y))
            if gap <= gap_tol:
                break
        if taken == steps:
            break
        grad = oracle.stoch_grad(Iterate(x, y), batch, rng, counter)
        y = y + lam * grad.gy
    return MaxOracleResult(y=y, steps=taken, gap=gap)


def sgda_run(
    oracle: ProblemOracle,
    x0: Vec,
    y0: Optional[Vec],
    bp: BaselineParams,
    streams: RunStreams,
    diagnostics: bool = True,
    iteration_cap: Optional[int] = None,
) -> RunTrace:
    """Simultaneous stochastic gradient descent (x) ascent (y).

    One shared S-batch per iteration feeds both updates. Runs K + 1 updates and
    returns x_hat uniform over x_0..x_K.
    """
    x = as_vec(x0, oracle.d1, "x0")
    y = np.zeros(oracle.d2) if y0 is None else as_vec(y0, oracle.d2, "y0")
    _require_diagnostics(oracle, diagnostics)
    K, certified, warnings = _capped(bp.K, iteration_cap, "sgda")
    counter = EvalCounter()
    rng = streams.baseline

    rows: list[TraceRow] = []
    x_path = []
    for k in range(K + 1):
        point = Iterate(x, y)
        x_path.append(x)
        physical, paper = counter.snapshot()
        grad = oracle.stoch_grad(point, bp.S, rng, counter)
        rows.append(
            diagnostic_row(
                k, physical, paper, oracle, point, diagnostics, eta=bp.eta, v=grad.gx, u=grad.gy
            )
        )
        x, y = x - bp.eta * grad.gx, y + bp.lam * grad.gy

    return _finish(
        "sgda", rows, x_path, streams, bp, certified, warnings, y0, counter.snapshot()
    )


def sgdmax_run(
    oracle: ProblemOracle,
    x0: Vec,
    bp: BaselineParams,
    streams: RunStreams,
    diagnostics: bool = True,
    iteration_cap: Optional[int] = None,
    y0: Optional[Vec] = None,
) -> RunTrace:
    """Stochastic gradient descent on x against an approximate max-oracle on y.

    The max-oracle is warm-started from the previous y. Row eval counts include
    the inner ascent; ``RunTrace.inner_evals`` reports that part on its own.
    """
    x = as_vec(x0, oracle.d1, "x0")
    y = np.zeros(oracle.d2) if y0 is None else as_vec(y0, oracle.d2, "y0")
    _require_diagnostics(oracle, diagnostics)
    K, certified, warnings = _capped(bp.K, iteration_cap, "sgdmax")
    counter = EvalCounter()
    inner = EvalCounter()
    rng = streams.baseline
    inner_steps = bp.inner_steps or 0
    gap_tol = bp.zeta if diagnostics and oracle.has_phi else None

    rows: list[TraceRow] = []
    x_path = []
    for k in range(K + 1):
        physical, paper = _combined(counter, inner)
        found = sga_max_oracle(oracle, x, y, inner_steps, bp.lam, bp.S, rng, inner, gap_tol)
        y = found.y
        point = Iterate(x, y)
        x_path.append(x)
        grad = oracle.stoch_grad(point, bp.S, rng, counter)
        rows.append(
            diagnostic_row(
                k, physical, paper, oracle, point, diagnostics, eta=bp.eta, v=grad.gx, u=grad.gy
            )
        )
        x = x - bp.eta * grad.gx
        logger.debug(f"sgdmax k={k}: inner steps {found.steps}, gap {found.gap}")

    trace = _finish(
        "sgdmax", rows, x_path, streams, bp, certified, warnings, y0, _combined(counter, inner)
    )
    trace.inner_evals = inner.count
    trace.metadata["outer_evals"] = counter.count
    return trace


def _combined(outer: EvalCounter, inner: EvalCounter) -> tuple[int, int]:
    return outer.count + inner.count, outer.paper_count + inner.paper_count


def _require_diagnostics(oracle: ProblemOracle, diagnostics: bool) -> None:
    if diagnostics and not oracle.has_exact_grad:
        raise CapabilityError(
            f"Diagnostics need exact gradients, which {type(oracle).__name__} lacks"
        )


def _capped(K: int, cap: Optional[int], algorithm: str) -> tuple[int, bool, list[str]]:
    if cap is None or cap >= K:
        return K, True, []
    message = f"{algorithm}: capped at {cap} of {K} iterations; bound not certified"
    logger.warning(message)
    return cap, False, [message]


def _finish(algorithm, rows, x_path, streams, bp, certified, warnings, y0, totals) -> RunTrace:
    x_hat_index = int(streams.index_sk.integers(0, len(x_path)))
    logger.info(
        f"{algorithm} finished: {len(rows)} updates, evals={totals[0]}, "
        f"x_hat index {x_hat_index}"
    )
    return RunTrace(
        algorithm=algorithm,
        rows=rows,
        x_hat=x_path[x_hat_index],
        x_hat_index=x_hat_index,
        y0=None if y0 is None else np.asarray(y0, dtype=np.float64),
        x_path=x_path,
        bound_certified=certified,
        total_evals=totals[0],
        total_evals_paper=totals[1],
        metadata={"params": dataclasses.asdict(bp), "order_constants": 1.0},
        warnings=warnings,
    )
