"""Implementations of the ``sreda`` subcommands.

Every command returns a process exit code. Errors are raised as
``SredaError`` subclasses and mapped to exit codes by ``sreda.__main__``.
"""

import dataclasses
import math
from pathlib import Path
from typing import List, Optional, Tuple

from loguru import logger

from sreda.core import RunStreams, Vec
from sreda.errors import CapabilityError, InputError
from sreda.harness.artifacts import (
    CurvePoint,
    RunSummary,
    SeedSummary,
    SweepSummary,
    mean_and_std,
    write_seed_average_csv,
    write_summary,
    write_trace_csv,
)
from sreda.harness.checks import CHECK_REGISTRY
from sreda.harness.run_executor import SeedExecutor
from sreda.metrics import (
    ComplexityCurve,
    StationarityReport,
    estimated_stationarity,
    evals_to_tolerance,
    fit_slope,
    stationarity,
)
from sreda.problems import (
    QuadraticSaddle,
    SmoothnessProfile,
    delta_f_for,
    initial_point,
    load_problem,
    make_finite_sum_saddle,
    make_quadratic_saddle,
    save_problem,
)
from sreda.settings import AppSettings, ExperimentConfig, ProblemConfig
from sreda.solvers import (
    SOLVER_REGISTRY,
    SolverRequest,
    derive_baseline_params,
    derive_params,
    derive_params_finite,
    predicted_evals,
)
from sreda.solvers.params import BOUND_CONSTANT
from sreda.solvers.trace import RunTrace


def build_problem(config: ProblemConfig) -> Tuple[QuadraticSaddle, Vec]:
    """Generate (or load) the problem instance and its starting point x0."""
    if config.kind == "file":
        oracle = load_problem(config.path)
        logger.info(f"Loaded problem from {config.path}")
    elif config.kind == "finite-sum":
        oracle = make_finite_sum_saddle(
            config.d1, config.d2, config.n, config.kappa, config.seed, spread=config.spread
        )
    else:
        oracle = make_quadratic_saddle(
            config.d1, config.d2, config.kappa, config.seed, sigma=config.sigma
        )
    x0 = initial_point(config.seed, oracle.d1, config.x0_scale)
    logger.info(
        f"Problem {oracle.kind}: d1={oracle.d1} d2={oracle.d2} kappa={oracle.profile.kappa:.4g} "
        f"sigma={oracle.profile.sigma:.4g} n={oracle.n}"
    )
    return oracle, x0


def resolve_delta_f(config: ExperimentConfig, oracle: QuadraticSaddle, x0: Vec, epsilon: float) -> float:
    if config.delta_f is not None:
        return config.delta_f
    return delta_f_for(oracle, x0, epsilon)


def run_seeds(
    config: ExperimentConfig,
    oracle: QuadraticSaddle,
    x0: Vec,
    algorithm: str,
    epsilon: float,
    executor: SeedExecutor,
    suffix: str = "",
) -> List[RunTrace]:
    """Run ``algorithm`` once per configured seed and write each trace CSV."""
    SOLVER_REGISTRY.validate(algorithm, oracle)
    delta_f = resolve_delta_f(config, oracle, x0, epsilon)
    logger.info(f"{algorithm}: epsilon={epsilon} delta_f={delta_f:.6g} seeds={config.seeds}")

    def job(seed: int) -> RunTrace:
        request = SolverRequest(
            oracle=oracle,
            x0=x0,
            epsilon=epsilon,
            delta_f=delta_f,
            streams=RunStreams.from_seed(seed),
            overrides=config.overrides,
            diagnostics=config.diagnostics,
            iteration_cap=config.iteration_cap,
            inner_cap=config.inner_cap,
        )
        trace = SOLVER_REGISTRY.run(algorithm, request)
        write_trace_csv(trace, config.out, seed, suffix)
        return trace

    return executor.map(algorithm, config.seeds, job, attributes={"epsilon": epsilon})


def measure_output(oracle: QuadraticSaddle, trace: RunTrace, epsilon: float) -> StationarityReport:
    """|grad Phi(x_hat)| by the best route the problem supports."""
    if oracle.has_phi or oracle.has_exact_grad:
        return stationarity(oracle, trace.x_hat, tol=epsilon / 10.0)
    return estimated_stationarity(trace, epsilon)


def cmd_run(config: ExperimentConfig, settings: AppSettings) -> int:
    """Run one algorithm over every seed and write traces plus summary."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    oracle, x0 = build_problem(config.problem)
    save_problem(oracle, out / "problem.json")
    algorithm, epsilon = config.algorithm, config.epsilon

    traces = run_seeds(config, oracle, x0, algorithm, epsilon, SeedExecutor(settings.threads))
    per_seed = []
    for seed, trace in zip(config.seeds, traces):
        report = measure_output(oracle, trace, epsilon)
        per_seed.append(
            SeedSummary(
                seed=seed,
                x_hat=trace.x_hat.tolist(),
                x_hat_index=trace.x_hat_index,
                phi_grad_norm=report.phi_grad_norm,
                stationarity_method=report.method,
                evals_physical=trace.total_evals,
                evals_paper=trace.total_evals_paper,
                inner_evals=trace.inner_evals,
                bound_certified=trace.bound_certified,
                warnings=trace.warnings,
            )
        )

    mean_norm, std_norm = mean_and_std([s.phi_grad_norm for s in per_seed])
    summary = RunSummary(
        algorithm=algorithm,
        epsilon=epsilon,
        delta_f=resolve_delta_f(config, oracle, x0, epsilon),
        problem=config.problem.model_dump(mode="json"),
        params=traces[0].metadata.get("params", {}),
        predicted_bound=BOUND_CONSTANT * epsilon,
        seeds=config.seeds,
        mean_phi_grad_norm=mean_norm,
        std_phi_grad_norm=std_norm,
        mean_evals_physical=sum(s.evals_physical for s in per_seed) / len(per_seed),
        mean_evals_paper=sum(s.evals_paper for s in per_seed) / len(per_seed),
        bound_certified=all(s.bound_certified for s in per_seed),
        per_seed=per_seed,
    )
    write_summary(summary, out, "summary")
    if config.diagnostics:
        write_seed_average_csv(traces, out, algorithm)

    print(
        f"{algorithm}: mean |grad Phi(x_hat)| = {_fmt(mean_norm)} +/- {_fmt(std_norm)} "
        f"(bound {summary.predicted_bound:.4g}, certified: {summary.bound_certified}), "
        f"mean evals = {summary.mean_evals_physical:.6g}"
    )
    return 0


def cmd_sweep(config: ExperimentConfig, settings: AppSettings) -> int:
    """Sweep epsilon for every algorithm and fit complexity slopes."""
    if not config.diagnostics:
        raise CapabilityError("sweep measures evals to exact stationarity and needs diagnostics")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    oracle, x0 = build_problem(config.problem)
    save_problem(oracle, out / "problem.json")
    executor = SeedExecutor(settings.threads)

    curves: dict[str, list[CurvePoint]] = {}
    slopes: dict[str, Optional[float]] = {}
    for algorithm in config.algorithms:
        curve = ComplexityCurve(algorithm)
        points = []
        for epsilon in sorted(config.epsilons, reverse=True):
            traces = run_seeds(
                config, oracle, x0, algorithm, epsilon, executor, suffix=f"_eps{epsilon:g}"
            )
            reached = [
                evals
                for evals in (evals_to_tolerance(trace, epsilon) for trace in traces)
                if evals is not None
            ]
            mean = sum(reached) / len(reached) if reached else None
            curve.add(epsilon, mean)
            points.append(
                CurvePoint(epsilon=epsilon, evals_to_reach=mean, reached_seeds=len(reached))
            )
        if not curve.is_monotone():
            logger.warning(f"{algorithm}: evals to reach epsilon are not monotone")
        try:
            slopes[algorithm] = fit_slope(curve)
        except InputError as e:
            logger.warning(f"{algorithm}: no slope ({e})")
            slopes[algorithm] = None
        curves[algorithm] = points
        print(f"{algorithm}: slope = {_fmt(slopes[algorithm])}")

    summary = SweepSummary(
        problem=config.problem.model_dump(mode="json"),
        seeds=config.seeds,
        epsilons=config.epsilons,
        curves=curves,
        slopes=slopes,
    )
    write_summary(summary, out, "sweep")
    return 0


def cmd_check(quick: bool = False) -> int:
    """Run the property suite; exit 0 only if every check passes."""
    results = CHECK_REGISTRY.run_all(quick=quick)
    width = max(len(result.name) for result in results)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name:<{width}}  {result.detail}")
    failed = [result.name for result in results if not result.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_params(
    epsilon: float,
    kappa: float,
    ell: float,
    sigma: float,
    delta_f: float,
    n: Optional[int] = None,
) -> int:
    """Print derived parameters and the predicted oracle-call tally."""
    profile = SmoothnessProfile(ell=ell, mu=ell / kappa, sigma=sigma)
    if n is None:
        params = derive_params(epsilon, profile, delta_f)
    else:
        params = derive_params_finite(epsilon, profile, delta_f, n)
    predicted = predicted_evals(params)

    print("SREDA parameters" + ("" if n is None else f" (finite sum, n={n})"))
    for field in dataclasses.fields(params):
        print(f"  {field.name:<12} {_fmt(getattr(params, field.name))}")
    print(f"  {'bound':<12} {_fmt(params.predicted_bound)}")
    print("Predicted oracle calls")
    print(f"  {'restarts':<12} {predicted.restarts}")
    print(f"  {'paper':<12} {predicted.paper}")
    print(f"  {'physical':<12} {predicted.physical}")
    for algorithm in ("sgda", "sgdmax"):
        bp = derive_baseline_params(algorithm, epsilon, profile, delta_f)
        print(f"{algorithm} defaults")
        for field in dataclasses.fields(bp):
            value = getattr(bp, field.name)
            if value is not None:
                print(f"  {field.name:<12} {_fmt(value)}")
    return 0


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool) or isinstance(value, int):
        return str(value)
    if isinstance(value, float) and math.isfinite(value):
        return f"{value:.6g}"
    return str(value)
