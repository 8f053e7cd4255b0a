"""Runnable property checks behind ``sreda check``.

Each check builds its own small problem from a fixed seed, so the suite is
deterministic. The bound checks share one cached set of SREDA runs per scale. Monte Carlo checks compare against their bound with an
explicit sigma slack. ``quick`` shrinks the sample sizes.
"""

import functools
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np
from loguru import logger

from sreda.core import EvalCounter, Iterate, RunStreams, StreamPurpose, norm, spawn_stream
from sreda.estimator import EstimatorState, init_restart, recursive_update
from sreda.inner_solvers import (
    NegatedSlice,
    concave_maximizer,
    isarah,
    isarah_config,
    sarah,
    sarah_config,
)
from sreda.metrics import (
    ComplexityCurve,
    delta_recursion_excess,
    evals_to_tolerance,
    fit_slope,
    seed_average,
    slope_ordering_holds,
    tracking_error_limits,
    u_contraction_factor,
)
from sreda.problems import (
    QuadraticSaddle,
    delta_f_for,
    initial_point,
    make_finite_sum_saddle,
    make_quadratic_saddle,
    make_strongly_convex_quadratic,
)
from sreda.solvers import SOLVER_REGISTRY, SolverRequest
from sreda.solvers.params import (
    BOUND_CONSTANT,
    SredaParams,
    apply_overrides,
    derive_params,
    derive_params_finite,
    step_size,
)
from sreda.solvers.sreda import sreda_finite_run, sreda_run
from sreda.solvers.trace import RunTrace

CHECK_SEED = 20_190_501


@dataclass(frozen=True)
class CheckScale:
    """Monte Carlo sizes for one suite run."""

    points: int
    pairs: int
    trajectories: int
    repetitions: int
    seeds: int
    iterations: int
    equivalence_iterations: int
    bound_seeds: int
    desk_scale: bool

    @classmethod
    def for_mode(cls, quick: bool) -> "CheckScale":
        if quick:
            return cls(
                points=20,
                pairs=1_000,
                trajectories=100,
                repetitions=2_000,
                seeds=5,
                iterations=3,
                equivalence_iterations=20,
                bound_seeds=10,
                desk_scale=False,
            )
        return cls(
            points=100,
            pairs=10_000,
            trajectories=500,
            repetitions=10_000,
            seeds=20,
            iterations=10,
            equivalence_iterations=200,
            bound_seeds=10,
            desk_scale=True,
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    duration_s: float = 0.0


CheckFunc = Callable[[CheckScale], tuple[bool, str]]


class CheckRegistry:
    """Named property checks, run in registration order."""

    def __init__(self):
        self._checks: Dict[str, CheckFunc] = {}

    def register(self, name: str):
        """Decorator to register a check returning ``(passed, detail)``.

        Raises:
            ValueError: If the name is already registered
        """

        def decorator(func: CheckFunc) -> CheckFunc:
            if name in self._checks:
                raise ValueError(f"Check '{name}' is already registered")
            self._checks[name] = func
            return func

        return decorator

    def list_checks(self) -> list[str]:
        return list(self._checks.keys())

    def run(self, name: str, scale: CheckScale) -> CheckResult:
        """Run one check; an exception counts as a failure."""
        start = time.time()
        try:
            passed, detail = self._checks[name](scale)
        except Exception as e:
            logger.opt(exception=True).error(f"Check '{name}' raised: {e}")
            passed, detail = False, f"raised {type(e).__name__}: {e}"
        result = CheckResult(name, bool(passed), detail, time.time() - start)
        log = logger.info if result.passed else logger.warning
        log(f"check {name}: {'PASS' if result.passed else 'FAIL'} ({detail})")
        return result

    def run_all(self, quick: bool = False) -> List[CheckResult]:
        scale = CheckScale.for_mode(quick)
        return [self.run(name, scale) for name in self._checks]


CHECK_REGISTRY = CheckRegistry()


def _noisy_saddle() -> QuadraticSaddle:
    return make_quadratic_saddle(4, 3, kappa_target=5.0, seed=CHECK_SEED, sigma=0.5)


def _finite_saddle(n: int = 30, kappa: float = 4.0) -> QuadraticSaddle:
    return make_finite_sum_saddle(4, 3, n, kappa_target=kappa, seed=CHECK_SEED)


def _problems() -> list[QuadraticSaddle]:
    return [_noisy_saddle(), _finite_saddle()]


def _random_point(problem: QuadraticSaddle, rng: np.random.Generator) -> Iterate:
    return Iterate(rng.standard_normal(problem.d1), rng.standard_normal(problem.d2))


def _nearby(
    problem: QuadraticSaddle, point: Iterate, radius: float, rng: np.random.Generator
) -> Iterate:
    return Iterate(
        point.x + radius * rng.standard_normal(problem.d1),
        point.y + radius * rng.standard_normal(problem.d2),
    )


@CHECK_REGISTRY.register("gradient-fd")
def check_gradient_fd(scale: CheckScale) -> tuple[bool, str]:
    """Central differences of F(.; xi) against component_grad at step 1e-5."""
    h = 1e-5
    rng = spawn_stream(CHECK_SEED, StreamPurpose.BASELINE)
    worst = 0.0
    for problem in _problems():
        dim = problem.d1 + problem.d2
        for _ in range(scale.points):
            point = _random_point(problem, rng)
            sample = problem.draw_samples(rng, 1)
            grad = problem.component_grad(point, sample)
            z = np.concatenate([point.x, point.y])
            fd = np.empty(dim)
            for j in range(dim):
                step = np.zeros(dim)
                step[j] = h
                plus, minus = z + step, z - step
                fd[j] = (
                    problem.component_value(Iterate(plus[: problem.d1], plus[problem.d1 :]), sample)
                    - problem.component_value(
                        Iterate(minus[: problem.d1], minus[problem.d1 :]), sample
                    )
                ) / (2 * h)
            exact = np.concatenate([grad.gx, grad.gy])
            worst = max(worst, float(np.linalg.norm(fd - exact) / max(1.0, np.linalg.norm(exact))))
    return worst <= 1e-6, f"max relative error {worst:.2e}"


@CHECK_REGISTRY.register("strong-concavity")
def check_strong_concavity(scale: CheckScale) -> tuple[bool, str]:
    """f(x,y) <= f(x,y') + <grad_y f(x,y'), y - y'> - mu/2 |y - y'|^2."""
    rng = spawn_stream(CHECK_SEED + 1, StreamPurpose.BASELINE)
    worst = -math.inf
    for problem in _problems():
        for _ in range(scale.points):
            x = rng.standard_normal(problem.d1)
            y, y2 = rng.standard_normal(problem.d2), rng.standard_normal(problem.d2)
            lhs = problem.value(Iterate(x, y))
            gy = problem.exact_grad(Iterate(x, y2)).gy
            rhs = (
                problem.value(Iterate(x, y2))
                + float(gy @ (y - y2))
                - 0.5 * problem.mu * float((y - y2) @ (y - y2))
            )
            worst = max(worst, (lhs - rhs) / (1.0 + abs(lhs)))
    return worst <= 1e-9, f"max normalized violation {worst:.2e}"


@CHECK_REGISTRY.register("pl-inequality")
def check_pl_inequality(scale: CheckScale) -> tuple[bool, str]:
    """2 mu (g(w) - g(w*)) <= |grad g(w)|^2 for g = -f(x, .)."""
    rng = spawn_stream(CHECK_SEED + 2, StreamPurpose.BASELINE)
    worst = -math.inf
    for problem in _problems():
        for _ in range(scale.points):
            point = _random_point(problem, rng)
            gap = problem.phi_value(point.x) - problem.value(point)
            grad_sq = float(np.sum(problem.exact_grad(point).gy ** 2))
            worst = max(worst, (2 * problem.mu * gap - grad_sq) / (1.0 + grad_sq))
    return worst <= 1e-9, f"max normalized violation {worst:.2e}"


@CHECK_REGISTRY.register("phi-lipschitz")
def check_phi_lipschitz(scale: CheckScale) -> tuple[bool, str]:
    """|grad Phi(x) - grad Phi(x')| <= (ell + kappa ell) |x - x'|."""
    rng = spawn_stream(CHECK_SEED + 3, StreamPurpose.BASELINE)
    worst = 0.0
    for problem in _problems():
        profile = problem.profile
        limit = profile.ell + profile.kappa * profile.ell
        for _ in range(scale.pairs):
            x, x2 = rng.standard_normal(problem.d1), rng.standard_normal(problem.d1)
            ratio = norm(problem.phi_grad(x) - problem.phi_grad(x2)) / norm(x - x2)
            worst = max(worst, ratio / limit)
    return worst <= 1 + 1e-6, f"max ratio to ell + kappa ell {worst:.4f}"


@CHECK_REGISTRY.register("variance-bound")
def check_variance_bound(scale: CheckScale) -> tuple[bool, str]:
    """Monte Carlo E|G(p; xi) - grad f(p)|^2 <= sigma^2 with 3-sigma slack."""
    rng = spawn_stream(CHECK_SEED + 4, StreamPurpose.BASELINE)
    details = []
    passed = True
    for problem in _problems():
        for _ in range(3):
            point = _random_point(problem, rng)
            exact = problem.exact_grad(point)
            samples = problem.draw_samples(rng, scale.repetitions)
            gx, gy = problem.eval_samples(point, samples)
            sq = np.sum((gx - exact.gx) ** 2, axis=1) + np.sum((gy - exact.gy) ** 2, axis=1)
            slack = 3 * sq.std(ddof=1) / math.sqrt(sq.size)
            passed &= bool(sq.mean() <= problem.profile.sigma**2 + slack)
        details.append(f"{problem.kind}: sigma^2={problem.profile.sigma**2:.4g}")
    return passed, ", ".join(details)


def _inner_setup(problem: QuadraticSaddle, rng: np.random.Generator):
    x_prev = rng.standard_normal(problem.d1)
    x_new = x_prev + 0.1 * rng.standard_normal(problem.d1)
    y = rng.standard_normal(problem.d2)
    exact = problem.exact_grad(Iterate(x_prev, y))
    return x_prev, x_new, y, exact


@CHECK_REGISTRY.register("u-decay")
def check_u_decay(scale: CheckScale) -> tuple[bool, str]:
    """E|u_t|^2 <= (1 - 2 mu ell lam / (mu + ell)) E|u_{t-1}|^2 for t <= 5."""
    problem = _finite_saddle()
    lam = 2.0 / (7.0 * problem.profile.ell)
    factor = u_contraction_factor(problem.profile, lam)
    setup_rng = spawn_stream(CHECK_SEED + 5, StreamPurpose.INIT)
    x_prev, x_new, y, exact = _inner_setup(problem, setup_rng)
    batch_rng = spawn_stream(CHECK_SEED + 5, StreamPurpose.INNER_BATCH)
    index_rng = spawn_stream(CHECK_SEED + 5, StreamPurpose.INDEX_SK)
    squares = []
    for _ in range(scale.trajectories):
        result = concave_maximizer(
            problem,
            x_prev,
            x_new,
            y,
            exact.gx,
            exact.gy,
            lam,
            m=5,
            S2=2,
            rng=batch_rng,
            index_rng=index_rng,
            counter=EvalCounter(),
        )
        squares.append(np.square(result.u_norms))
    means = np.mean(squares, axis=0)
    ratios = means[1:6] / means[:5]
    worst = float(ratios.max())
    return worst <= factor * (1 + 1e-9), f"max ratio {worst:.6f}, factor {factor:.6f}"


@CHECK_REGISTRY.register("martingale-premise")
def check_martingale_premise(scale: CheckScale) -> tuple[bool, str]:
    """Mean correction equals the exact gradient difference within 4 sigma."""
    problem = _finite_saddle()
    rng = spawn_stream(CHECK_SEED + 6, StreamPurpose.INNER_BATCH)
    old = _random_point(problem, rng)
    new = _nearby(problem, old, 0.2, rng)
    state = EstimatorState(np.zeros(problem.d1), np.zeros(problem.d2), old, EvalCounter())
    steps = np.array(
        [recursive_update(state, problem, new, 1, rng).v for _ in range(scale.repetitions)]
    )
    target = problem.exact_grad(new).gx - problem.exact_grad(old).gx
    se = steps.std(axis=0, ddof=1) / math.sqrt(steps.shape[0])
    excess = np.abs(steps.mean(axis=0) - target) - 4 * se
    return bool(np.all(excess <= 1e-12)), f"max excess over 4 sigma {excess.max():.2e}"


@CHECK_REGISTRY.register("martingale-growth")
def check_martingale_growth(scale: CheckScale) -> tuple[bool, str]:
    """One update grows the mean squared error by at most ell^2/S2 |p_t - p_{t-1}|^2."""
    problem = _finite_saddle()
    S1, S2 = 4, 2
    rng = spawn_stream(CHECK_SEED + 7, StreamPurpose.RESTART_BATCH)
    p0 = _random_point(problem, rng)
    p1 = _nearby(problem, p0, 0.3, rng)
    exact0, exact1 = problem.exact_grad(p0), problem.exact_grad(p1)
    growth = np.empty(scale.repetitions)
    for i in range(scale.repetitions):
        state = init_restart(problem, p0, S1, rng, EvalCounter())
        before = state.error_sq(exact0)
        after = recursive_update(state, problem, p1, S2, rng).error_sq(exact1)
        growth[i] = after - before
    displacement = float(np.sum((p1.x - p0.x) ** 2) + np.sum((p1.y - p0.y) ** 2))
    bound = problem.profile.ell**2 / S2 * displacement
    slack = 3 * growth.std(ddof=1) / math.sqrt(growth.size)
    mean = float(growth.mean())
    return mean <= bound + slack, f"mean growth {mean:.4g}, bound {bound:.4g} (+{slack:.2g})"


@CHECK_REGISTRY.register("finite-sum-delta-zero")
def check_finite_sum_delta_zero(scale: CheckScale) -> tuple[bool, str]:
    """With q = 1 every finite-sum estimate is the exact gradient."""
    problem = _finite_saddle(n=10, kappa=4.0)
    params = derive_params_finite(0.2, problem.profile, 1.0, problem.n)
    if params.q != 1:
        return False, f"expected q = 1 for n < kappa^2, got q = {params.q}"
    trace = sreda_finite_run(
        problem,
        np.ones(problem.d1),
        params,
        RunStreams.from_seed(CHECK_SEED),
        iteration_cap=scale.iterations,
    )
    deltas = [value for value in trace.column("Delta_k") if value is not None]
    return all(value == 0.0 for value in deltas), f"{len(deltas)} rows, max {max(deltas):.3g}"


def reference_sreda_noiseless(
    problem: QuadraticSaddle, x0: np.ndarray, y0: np.ndarray, params, seed: int, K: int
) -> list[np.ndarray]:
    """Straight-line deterministic SREDA with q = 1 using exact gradients.

    Draws the output indices from the run's index stream in the same order as
    the solver, and returns x_0..x_K.
    """
    index_rng = spawn_stream(seed, StreamPurpose.INDEX_SK)
    x, y = np.array(x0, dtype=float), np.array(y0, dtype=float)
    path = [x]
    for _ in range(K):
        v = problem.A @ x + problem.B @ y
        x_new = x - step_size(params, float(np.linalg.norm(v))) * v
        s_k = int(index_rng.integers(0, params.m + 1))
        y_t = y
        for _t in range(s_k + 1):
            y_t = y_t + params.lam * (problem.B.T @ x_new - problem.mu * y_t + problem.c)
        x, y = x_new, y_t
        path.append(x)
    return path


@CHECK_REGISTRY.register("noiseless-equivalence")
def check_noiseless_equivalence(scale: CheckScale) -> tuple[bool, str]:
    """sigma = 0, q = 1, S2 = 1 matches a straight-line reimplementation."""
    problem = make_quadratic_saddle(3, 3, kappa_target=2.0, seed=CHECK_SEED, sigma=0.0)
    K = scale.equivalence_iterations
    params = apply_overrides(derive_params(0.5, problem.profile, 1.0), {"q": 1, "S2": 1, "K": K})
    x0 = np.linspace(-1.0, 1.0, problem.d1)
    trace: RunTrace = sreda_run(
        problem, x0, params, RunStreams.from_seed(CHECK_SEED), iteration_cap=K
    )
    reference = reference_sreda_noiseless(problem, x0, trace.y0, params, CHECK_SEED, K)
    if len(trace.x_path) != K + 1:
        return False, f"trace has {len(trace.x_path) - 1} iterations, expected {K}"
    worst = max(
        float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(b))))
        for a, b in zip(trace.x_path, reference)
    )
    return worst <= 1e-12, f"max deviation {worst:.2e} over {K} iterations"


@CHECK_REGISTRY.register("step-bound")
def check_step_bound(scale: CheckScale) -> tuple[bool, str]:
    """Every SREDA step satisfies |x_{k+1} - x_k| <= eps / (5 kappa ell)."""
    problem = _noisy_saddle()
    params = apply_overrides(derive_params(0.5, problem.profile, 1.0), {"S1": 64, "S2": 8})
    trace = sreda_run(
        problem, np.ones(problem.d1), params, RunStreams.from_seed(CHECK_SEED), iteration_cap=10
    )
    steps = [norm(b - a) for a, b in zip(trace.x_path, trace.x_path[1:])]
    worst = max(steps)
    return worst <= params.step_bound + 1e-12, f"max step {worst:.4g}, bound {params.step_bound:.4g}"


SCALING_EPSILONS = (0.4, 0.2, 0.1)


@dataclass(frozen=True)
class BoundRuns:
    """Uncapped SREDA runs with exact diagnostics, one trace per seed."""

    problem: QuadraticSaddle
    params: SredaParams
    traces: tuple[RunTrace, ...]


def bound_instance(desk_scale: bool, sigma: float = 0.5) -> QuadraticSaddle:
    """d1 = d2 = 5 with kappa = 5 at desk scale, d1 = d2 = 3 with kappa = 2 otherwise."""
    if desk_scale:
        return make_quadratic_saddle(5, 5, kappa_target=5.0, seed=CHECK_SEED, sigma=sigma)
    return make_quadratic_saddle(3, 3, kappa_target=2.0, seed=CHECK_SEED, sigma=sigma)


def run_bound_seeds(problem: QuadraticSaddle, epsilon: float, seeds: int) -> BoundRuns:
    """Run SREDA with derived parameters and the exact Delta_f once per seed."""
    x0 = initial_point(CHECK_SEED, problem.d1)
    params = derive_params(epsilon, problem.profile, delta_f_for(problem, x0, epsilon))
    logger.info(
        f"bound runs: kappa={problem.profile.kappa:.3g} epsilon={epsilon} K={params.K} "
        f"S1={params.S1} S2={params.S2} m={params.m} seeds={seeds}"
    )
    traces = tuple(
        sreda_run(problem, x0, params, RunStreams.from_seed(seed)) for seed in range(seeds)
    )
    return BoundRuns(problem, params, traces)


@functools.cache
def _bound_runs(scale: CheckScale) -> BoundRuns:
    epsilon = 0.2 if scale.desk_scale else 0.5
    return run_bound_seeds(bound_instance(scale.desk_scale), epsilon, scale.bound_seeds)


def evaluate_stationarity_bound(runs: BoundRuns) -> tuple[bool, str]:
    """Seed mean of the exact |grad Phi(x_hat)| against (1073/108) eps."""
    values = [norm(runs.problem.phi_grad(trace.x_hat)) for trace in runs.traces]
    mean = float(np.mean(values))
    bound = BOUND_CONSTANT * runs.params.epsilon
    return mean <= bound, f"mean |grad Phi(x_hat)| {mean:.4g}, bound {bound:.4g}"


def evaluate_tracking_error(runs: BoundRuns, slack: float = 2.0) -> tuple[bool, str]:
    """Seed-averaged delta_k and Delta_k stay within ``slack`` times their limits at every k."""
    averages = seed_average(runs.traces, ("delta_k", "Delta_k"))
    Delta_limit, delta_limit = tracking_error_limits(runs.params)
    worst_delta = float(np.nanmax(averages["delta_k"]))
    worst_Delta = float(np.nanmax(averages["Delta_k"]))
    passed = worst_delta <= slack * delta_limit and worst_Delta <= slack * Delta_limit
    return passed, (
        f"max delta_k {worst_delta:.3g} (limit {slack * delta_limit:.3g}), "
        f"max Delta_k {worst_Delta:.3g} (limit {slack * Delta_limit:.3g})"
    )


def evaluate_delta_recursion(runs: BoundRuns, slack: float = 2.0) -> tuple[bool, str]:
    """Seed-averaged delta_{k+1} against ``slack`` times the one-step recursion bound."""
    averages = seed_average(runs.traces, ("delta_k", "Delta_k"))
    ratios = delta_recursion_excess(runs.params, runs.problem.profile, averages, slack)
    if ratios.size == 0:
        return False, "no consecutive diagnostic rows"
    worst = float(ratios.max())
    return worst <= 1.0, f"max ratio to bound {worst:.3g} over {ratios.size} steps"


def evaluate_sandwich(runs: BoundRuns, slack: float = 2.0) -> tuple[bool, str]:
    """Trace mean of |grad Phi(x_k)| <= trace mean of |v_k| + slack (4/3) eps, over seeds."""
    phi_means, v_means = [], []
    for trace in runs.traces:
        pairs = [
            (phi, v)
            for phi, v in zip(trace.column("phi_grad_norm"), trace.column("v_norm"))
            if phi is not None and v is not None
        ]
        if not pairs:
            return False, "trace has no rows with both |grad Phi| and |v|"
        phi_means.append(np.mean([phi for phi, _ in pairs]))
        v_means.append(np.mean([v for _, v in pairs]))
    lhs = float(np.mean(phi_means))
    rhs = float(np.mean(v_means)) + slack * 4.0 / 3.0 * runs.params.epsilon
    return lhs <= rhs, f"mean |grad Phi| {lhs:.4g}, mean |v| + slack {rhs:.4g}"


def complexity_slope(
    problem: QuadraticSaddle, algorithm: str, epsilons: tuple[float, ...], seeds: int
) -> float:
    """Fitted slope of mean evals to reach |grad Phi(x_k)| <= eps against 1/eps."""
    x0 = initial_point(CHECK_SEED, problem.d1)
    curve = ComplexityCurve(algorithm)
    for epsilon in epsilons:
        delta_f = delta_f_for(problem, x0, epsilon)
        reached = []
        for seed in range(seeds):
            request = SolverRequest(
                oracle=problem,
                x0=x0,
                epsilon=epsilon,
                delta_f=delta_f,
                streams=RunStreams.from_seed(seed),
            )
            evals = evals_to_tolerance(SOLVER_REGISTRY.run(algorithm, request), epsilon)
            if evals is not None:
                reached.append(evals)
        curve.add(epsilon, float(np.mean(reached)) if reached else None)
    return fit_slope(curve)


@CHECK_REGISTRY.register("stationarity-bound")
def check_stationarity_bound(scale: CheckScale) -> tuple[bool, str]:
    """Mean exact |grad Phi(x_hat)| over seeds is at most (1073/108) eps."""
    return evaluate_stationarity_bound(_bound_runs(scale))


@CHECK_REGISTRY.register("tracking-error")
def check_tracking_error(scale: CheckScale) -> tuple[bool, str]:
    """Seed-averaged delta_k <= 2 zeta and Delta_k <= zeta / 6 for every k."""
    return evaluate_tracking_error(_bound_runs(scale))


@CHECK_REGISTRY.register("delta-recursion")
def check_delta_recursion(scale: CheckScale) -> tuple[bool, str]:
    """Seed-averaged delta_{k+1} follows the one-step recursion within a factor 2."""
    return evaluate_delta_recursion(_bound_runs(scale))


@CHECK_REGISTRY.register("stationarity-sandwich")
def check_stationarity_sandwich(scale: CheckScale) -> tuple[bool, str]:
    """Average |grad Phi(x_k)| is bounded by average |v_k| plus 2 (4/3) eps."""
    return evaluate_sandwich(_bound_runs(scale))


@CHECK_REGISTRY.register("epsilon-scaling")
def check_epsilon_scaling(scale: CheckScale) -> tuple[bool, str]:
    """SREDA's eval slope lies in [2, 4] and at least 0.5 below SGDA's."""
    problem = bound_instance(scale.desk_scale)
    seeds = scale.bound_seeds if scale.desk_scale else 3
    sreda_slope = complexity_slope(problem, "sreda", SCALING_EPSILONS, seeds)
    sgda_slope = complexity_slope(problem, "sgda", SCALING_EPSILONS, seeds)
    return (
        slope_ordering_holds(sreda_slope, sgda_slope),
        f"slope sreda {sreda_slope:.3f}, sgda {sgda_slope:.3f}",
    )


@CHECK_REGISTRY.register("isarah-contract")
def check_isarah_contract(scale: CheckScale) -> tuple[bool, str]:
    """Mean |grad h(w_T)|^2 over seeds stays within 1.5 zeta."""
    zeta = 1e-2
    objective = make_strongly_convex_quadratic(5, kappa_target=4.0, seed=CHECK_SEED, sigma=0.5)
    w0 = np.zeros(objective.dim)
    finals = []
    for seed in range(scale.seeds):
        rng = spawn_stream(seed, StreamPurpose.INIT)
        counter = EvalCounter()
        cfg = isarah_config(objective, w0, zeta, rng, counter)
        w = isarah(objective, w0, cfg, rng, spawn_stream(seed, StreamPurpose.INIT_INDEX), counter)
        finals.append(float(np.sum(objective.exact_grad(w) ** 2)))
    mean = float(np.mean(finals))
    return mean <= 1.5 * zeta, f"mean |grad h|^2 {mean:.3g} vs zeta {zeta}"


@CHECK_REGISTRY.register("sarah-contract")
def check_sarah_contract(scale: CheckScale) -> tuple[bool, str]:
    """Finite-sum SARAH reaches mean |grad h|^2 <= 1.5 zeta."""
    zeta = 1e-3
    objective = make_strongly_convex_quadratic(5, kappa_target=4.0, seed=CHECK_SEED, n=50)
    w0 = np.zeros(objective.dim)
    finals = []
    for seed in range(scale.seeds):
        rng = spawn_stream(seed, StreamPurpose.INIT)
        counter = EvalCounter()
        cfg = sarah_config(objective, w0, zeta, counter)
        w = sarah(objective, w0, cfg, rng, spawn_stream(seed, StreamPurpose.INIT_INDEX), counter)
        finals.append(float(np.sum(objective.exact_grad(w) ** 2)))
    mean = float(np.mean(finals))
    return mean <= 1.5 * zeta, f"mean |grad h|^2 {mean:.3g} vs zeta {zeta}"


@CHECK_REGISTRY.register("negated-slice-contract")
def check_negated_slice(scale: CheckScale) -> tuple[bool, str]:
    """The iSARAH initializer on -f(x0, .) lands near y*(x0)."""
    problem = _noisy_saddle()
    x0 = np.ones(problem.d1)
    objective = NegatedSlice(problem, x0)
    zeta = 1e-2
    finals = []
    for seed in range(max(3, scale.seeds // 4)):
        rng = spawn_stream(seed, StreamPurpose.INIT)
        counter = EvalCounter()
        cfg = isarah_config(objective, np.zeros(problem.d2), zeta, rng, counter)
        w = isarah(
            objective, np.zeros(problem.d2), cfg, rng, spawn_stream(seed, StreamPurpose.INIT_INDEX), counter
        )
        finals.append(float(np.sum(objective.exact_grad(w) ** 2)))
    mean = float(np.mean(finals))
    return mean <= 1.5 * zeta, f"mean |grad_y f|^2 {mean:.3g} vs zeta {zeta}"
