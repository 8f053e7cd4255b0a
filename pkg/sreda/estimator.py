"""Recursive variance-reduced estimator of the gradient pair.

The estimate is re-anchored with a large batch (or a full gradient) and then
advanced by correction terms evaluated with common random numbers:

    v_t = v_{t-1} + mean_i [G_x(p_t; xi_i) - G_x(p_{t-1}; xi_i)]

and likewise for u. Both the outer loop and the concave maximizer share it.
"""

from dataclasses import dataclass, replace

import numpy as np

from sreda.core import EvalCounter, GradPair, Iterate, Vec, ensure_finite
from sreda.errors import ContractViolation
from sreda.problems import ProblemOracle


@dataclass(frozen=True)
class EstimatorState:
    """Current estimates (v, u) of (grad_x f, grad_y f) at ``anchor``."""

    v: Vec
    u: Vec
    anchor: Iterate
    evals: EvalCounter

    def __post_init__(self):
        ensure_finite(self.v, "v")
        ensure_finite(self.u, "u")

    @property
    def grad(self) -> GradPair:
        return GradPair(self.v, self.u)

    def error_sq(self, exact: GradPair) -> float:
        """|v - grad_x f|^2 + |u - grad_y f|^2 against a known gradient pair."""
        return (self.grad - exact).sq_norm()


def init_restart(
    oracle: ProblemOracle,
    point: Iterate,
    S1: int,
    rng: np.random.Generator,
    counter: EvalCounter,
) -> EstimatorState:
    """Anchor the estimator with an S1-batch average at ``point``."""
    if S1 < 1:
        raise ContractViolation(f"S1 must be >= 1, got {S1}")
    grad = oracle.stoch_grad(point, S1, rng, counter)
    return EstimatorState(grad.gx, grad.gy, point, counter)


def init_full(oracle: ProblemOracle, point: Iterate, counter: EvalCounter) -> EstimatorState:
    """Anchor the estimator with the full gradient of a finite-sum problem."""
    grad = oracle.full_grad(point, counter)
    return EstimatorState(grad.gx, grad.gy, point, counter)


def recursive_update(
    state: EstimatorState,
    oracle: ProblemOracle,
    new_point: Iterate,
    S2: int,
    rng: np.random.Generator,
) -> EstimatorState:
    """Advance the estimate from ``state.anchor`` to ``new_point``.

    Draws S2 fresh samples and evaluates each at both points, so the counter
    is charged 2 * S2 physical evaluations.
    """
    if S2 < 1:
        raise ContractViolation(f"S2 must be >= 1, got {S2}")
    diff = oracle.paired_difference(new_point, state.anchor, S2, rng, state.evals)
    return replace(state, v=state.v + diff.gx, u=state.u + diff.gy, anchor=new_point)
