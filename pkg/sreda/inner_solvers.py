"""Inner solvers: the concave maximizer and the iSARAH / SARAH initializers.

The maximizer runs gradient ascent on y with x frozen, driving the shared
recursive estimator. The initializers minimize a strongly convex objective
h(w) = -f(x0, w) to produce the starting y0.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Protocol

import numpy as np
from loguru import logger

from sreda.core import EvalCounter, Iterate, Vec, ceil_int, norm
from sreda.errors import CapabilityError, ParameterError
from sreda.estimator import EstimatorState, recursive_update
from sreda.problems import ProblemOracle

# Number of single-sample draws used to estimate gradient scales for iSARAH
ISARAH_PROBE_SIZE = 100
ISARAH_MAX_BATCH = 1_000_000


class ConvexObjective(Protocol):
    """Sampled mu-strongly convex objective consumed by the initializers."""

    dim: int
    mu: float
    ell: float
    n: Optional[int]

    @property
    def kappa(self) -> float: ...

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray: ...

    def grad_samples(self, w: Vec, samples: np.ndarray) -> np.ndarray: ...

    def full_grad(self, w: Vec, counter: Optional[EvalCounter] = None) -> Vec: ...

    def exact_grad(self, w: Vec) -> Vec: ...


class NegatedSlice:
    """h(w) = -f(x0, w), strongly convex in w, seen through the problem oracle."""

    def __init__(self, oracle: ProblemOracle, x0: Vec):
        self.oracle = oracle
        self.x0 = np.asarray(x0, dtype=np.float64)
        self.dim = oracle.d2
        self.mu = oracle.profile.mu
        self.ell = oracle.profile.ell
        self.n = oracle.n

    @property
    def kappa(self) -> float:
        return self.ell / self.mu

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.oracle.draw_samples(rng, size)

    def grad_samples(self, w: Vec, samples: np.ndarray) -> np.ndarray:
        _, gy = self.oracle.eval_samples(Iterate(self.x0, w), samples)
        return -gy

    def full_grad(self, w: Vec, counter: Optional[EvalCounter] = None) -> Vec:
        if not self.oracle.is_finite_sum:
            raise CapabilityError("Full gradients need a finite-sum problem")
        return -self.oracle.full_grad(Iterate(self.x0, w), counter).gy

    def exact_grad(self, w: Vec) -> Vec:
        return -self.oracle.exact_grad(Iterate(self.x0, w)).gy

    def minimizer(self) -> Optional[Vec]:
        if not self.oracle.has_y_star:
            return None
        return self.oracle.y_star(self.x0)


@dataclass(frozen=True)
class InitConfig:
    """Initializer parameters: step, epoch length, batch (iSARAH) and epochs."""

    gamma: float
    m_prime: int
    T: int
    b: Optional[int] = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if self.m_prime < 1:
            raise ParameterError(f"m_prime must be >= 1, got {self.m_prime}")
        if self.T < 1:
            raise ParameterError(f"T must be >= 1, got {self.T}")
        if self.b is not None and self.b < 1:
            raise ParameterError(f"b must be >= 1, got {self.b}")


@dataclass
class InnerResult:
    """Output of one concave-maximizer call.

    ``y_next``, ``v_next`` and ``u_next`` are taken at index ``s_k + 1``.
    ``u_norms[t]`` is |u_t| for t = 0..m+1; ``y_path[t]`` is y_t for the
    same range (y_0 = y_cur), filled only when the path is recorded.
    """

    y_next: Vec
    v_next: Vec
    u_next: Vec
    s_k: int
    u_norms: list[float] = field(default_factory=list)
    y_path: list[Vec] = field(default_factory=list)


def ascent_step_limit(oracle: ProblemOracle) -> float:
    """Largest lambda for which the inner u-estimates contract: 2 / (mu + ell)."""
    return 2.0 / (oracle.profile.mu + oracle.profile.ell)


def concave_maximizer(
    oracle: ProblemOracle,
    x_prev: Vec,
    x_new: Vec,
    y_cur: Vec,
    v_in: Vec,
    u_in: Vec,
    lam: float,
    m: int,
    S2: int,
    rng: np.random.Generator,
    index_rng: np.random.Generator,
    counter: EvalCounter,
    record_path: bool = False,
    check_step: bool = True,
) -> InnerResult:
    """Run m + 2 recursive corrections of the inner ascent on y.

    The first correction moves the estimate from (x_prev, y_cur) to
    (x_new, y_cur). Then for t = 1..m+1 the estimator is advanced to
    (x_new, y_t) with y_t = y_{t-1} + lam * u_{t-1}. The returned state is the
    one at index s_k + 1 with s_k uniform on {0..m}.

    Args:
        oracle: Problem oracle
        x_prev: Point the incoming estimates refer to
        x_new: Frozen x for the whole inner loop
        y_cur: Starting y
        v_in: Incoming estimate of grad_x f(x_prev, y_cur)
        u_in: Incoming estimate of grad_y f(x_prev, y_cur)
        lam: Ascent step
        m: Inner iteration count, >= 0
        S2: Correction batch size
        rng: Stream for correction batches
        index_rng: Stream for the output index
        counter: Charged exactly 2 * S2 * (m + 2)
        record_path: Keep every y_t in the result
        check_step: Warn when lam exceeds 2 / (mu + ell)

    Returns:
        InnerResult at the sampled index
    """
    if m < 0:
        raise ParameterError(f"m must be >= 0, got {m}")
    if check_step and lam > ascent_step_limit(oracle):
        logger.warning(
            f"Inner step {lam:.6g} exceeds 2/(mu+ell)={ascent_step_limit(oracle):.6g}; "
            "u-estimates may not contract"
        )

    s_k = int(index_rng.integers(0, m + 1))
    state = EstimatorState(v_in, u_in, Iterate(x_prev, y_cur), counter)
    state = recursive_update(state, oracle, Iterate(x_new, y_cur), S2, rng)

    y = y_cur
    u_norms = [norm(state.u)]
    y_path = [y_cur] if record_path else []
    chosen: Optional[tuple[Vec, EstimatorState]] = None
    for t in range(1, m + 2):
        y = y + lam * state.u
        state = recursive_update(state, oracle, Iterate(x_new, y), S2, rng)
        u_norms.append(norm(state.u))
        if record_path:
            y_path.append(y)
        if t == s_k + 1:
            chosen = (y, state)

    y_next, picked = chosen
    return InnerResult(
        y_next=y_next,
        v_next=picked.v,
        u_next=picked.u,
        s_k=s_k,
        u_norms=u_norms,
        y_path=y_path,
    )


def isarah(
    objective: ConvexObjective,
    w0: Vec,
    cfg: InitConfig,
    rng: np.random.Generator,
    index_rng: np.random.Generator,
    counter: EvalCounter,
) -> Vec:
    """Inexact SARAH: epochs start from a batch-b gradient estimate.

    Gradient samples come from ``rng``; each epoch's output index comes from
    ``index_rng``, so it does not depend on how many samples were drawn.
    """
    if cfg.b is None:
        raise ParameterError("iSARAH needs a batch size b")

    def epoch_start(w: Vec) -> Vec:
        samples = objective.draw(rng, cfg.b)
        counter.add_batch(cfg.b)
        return objective.grad_samples(w, samples).mean(axis=0)

    return _sarah_epochs(objective, w0, cfg, rng, index_rng, counter, epoch_start, "iSARAH")


def sarah(
    objective: ConvexObjective,
    w0: Vec,
    cfg: InitConfig,
    rng: np.random.Generator,
    index_rng: np.random.Generator,
    counter: EvalCounter,
) -> Vec:
    """SARAH for finite sums: epochs start from the full gradient."""
    if objective.n is None:
        raise CapabilityError("SARAH needs a finite-sum objective")

    def epoch_start(w: Vec) -> Vec:
        return objective.full_grad(w, counter)

    return _sarah_epochs(objective, w0, cfg, rng, index_rng, counter, epoch_start, "SARAH")


def _sarah_epochs(
    objective, w0, cfg: InitConfig, rng, index_rng, counter, epoch_start, name: str
) -> Vec:
    w_tilde = np.asarray(w0, dtype=np.float64)
    for epoch in range(cfg.T):
        v = epoch_start(w_tilde)
        iterates = [w_tilde]
        w_prev, w = w_tilde, w_tilde - cfg.gamma * v
        iterates.append(w)
        for _ in range(1, cfg.m_prime):
            sample = objective.draw(rng, 1)
            g_new = objective.grad_samples(w, sample)[0]
            g_old = objective.grad_samples(w_prev, sample)[0]
            counter.add_paired(1)
            v = v + g_new - g_old
            w_prev, w = w, w - cfg.gamma * v
            iterates.append(w)
        # Output index ranges over 0..m' inclusive; iterates[m'] is the last update
        w_tilde = iterates[int(index_rng.integers(0, cfg.m_prime + 1))]
        logger.debug(f"{name} epoch {epoch + 1}/{cfg.T} done, evals={counter.count}")
    return w_tilde


def isarah_config(
    objective: ConvexObjective,
    w0: Vec,
    zeta: float,
    rng: np.random.Generator,
    counter: EvalCounter,
) -> InitConfig:
    """iSARAH parameters for target E|grad h|^2 <= zeta.

    gamma = 2/(5 ell), m' = ceil(20 kappa - 1),
    b = max(20 kappa - 10, 20 X / zeta) with X the mean squared single-sample
    gradient at the minimizer (or at w0 when it is unknown), capped at 1e6,
    T = ceil(log(4/3 * |grad h(w0)|^2 / zeta)).
    The probe draws are charged to ``counter``.
    """
    if not zeta > 0:
        raise ParameterError(f"zeta must be positive, got {zeta}")
    kappa = objective.kappa
    w0 = np.asarray(w0, dtype=np.float64)

    minimizer = getattr(objective, "minimizer", None)
    w_star = minimizer() if callable(minimizer) else None
    probe_point = w0 if w_star is None else w_star
    samples = objective.draw(rng, ISARAH_PROBE_SIZE)
    counter.add_batch(ISARAH_PROBE_SIZE)
    grads = objective.grad_samples(probe_point, samples)
    scale_sq = float(np.mean(np.sum(grads**2, axis=1)))

    if w_star is None:
        g0 = float(np.sum(grads.mean(axis=0) ** 2))
    else:
        samples = objective.draw(rng, ISARAH_PROBE_SIZE)
        counter.add_batch(ISARAH_PROBE_SIZE)
        g0 = float(np.sum(objective.grad_samples(w0, samples).mean(axis=0) ** 2))

    raw_b = max(20 * kappa - 10, 20 * scale_sq / zeta)
    b = min(ISARAH_MAX_BATCH, ceil_int(raw_b))
    if raw_b > ISARAH_MAX_BATCH:
        logger.warning(f"iSARAH batch {raw_b:.3g} capped at {ISARAH_MAX_BATCH}")
    T = _epochs(4.0 / 3.0 * g0 / zeta, base=math.e)
    cfg = InitConfig(gamma=2.0 / (5.0 * objective.ell), m_prime=ceil_int(20 * kappa - 1), T=T, b=b)
    logger.debug(f"iSARAH config: {cfg}")
    return cfg


def sarah_config(
    objective: ConvexObjective,
    w0: Vec,
    zeta: float,
    counter: EvalCounter,
) -> InitConfig:
    """SARAH parameters: gamma = 1/(2 ell), m' = ceil(4.5 kappa),
    T = ceil(log(|grad h(w0)|^2 / zeta) / log(9/7)).
    """
    if not zeta > 0:
        raise ParameterError(f"zeta must be positive, got {zeta}")
    g0 = float(np.sum(objective.full_grad(np.asarray(w0, dtype=np.float64), counter) ** 2))
    cfg = InitConfig(
        gamma=1.0 / (2.0 * objective.ell),
        m_prime=ceil_int(4.5 * objective.kappa),
        T=sarah_epoch_count(g0, zeta),
    )
    logger.debug(f"SARAH config: {cfg}")
    return cfg


def sarah_epoch_count(g0: float, zeta: float) -> int:
    """Epochs for SARAH to shrink |grad|^2 from g0 to zeta at rate 7/9."""
    return _epochs(g0 / zeta, base=9.0 / 7.0)


def _epochs(ratio: float, base: float) -> int:
    if ratio <= 1.0:
        return 1
    return ceil_int(math.log(ratio) / math.log(base))
