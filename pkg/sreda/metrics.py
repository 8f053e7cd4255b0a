"""Stationarity measurement, analysis-bound diagnostics and complexity curves."""

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional, Sequence

import numpy as np
from loguru import logger
from scipy import stats

from sreda.core import Iterate, Vec, as_vec, norm
from sreda.errors import CapabilityError, InputError
from sreda.problems import ProblemOracle, SmoothnessProfile
from sreda.solvers.params import SredaParams
from sreda.solvers.trace import RunTrace

Method = Literal["exact", "inner-solve", "estimated"]


@dataclass(frozen=True)
class StationarityReport:
    """|grad Phi(x)| and how it was obtained.

    For the inner-solve route ``residual`` is |grad_y f(x, y_hat)| of the
    approximate maximizer and ``error_bound`` = kappa * residual bounds the
    distance to the exact value.
    """

    x: Vec
    phi_grad_norm: float
    method: Method
    residual: Optional[float] = None
    error_bound: Optional[float] = None
    converged: bool = True
    iterations: int = 0


def stationarity(
    oracle: ProblemOracle,
    x: Vec,
    tol: float,
    method: Literal["auto", "exact", "inner-solve"] = "auto",
    max_iter: int = 100_000,
) -> StationarityReport:
    """Measure |grad Phi(x)|.

    The exact route uses the closed-form primal gradient. The inner-solve route
    runs deterministic gradient ascent on y with step 1/ell until
    |grad_y f| <= tol * mu / 10 and reports |grad_x f(x, y_hat)|.

    Raises:
        InputError: If tol is not positive
        CapabilityError: If the problem supports neither route
    """
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    x = as_vec(x, oracle.d1, "x")
    if method in ("auto", "exact") and oracle.has_phi:
        return StationarityReport(x=x, phi_grad_norm=norm(oracle.phi_grad(x)), method="exact")
    if method == "exact":
        raise CapabilityError(f"{type(oracle).__name__} has no closed-form primal gradient")
    if not oracle.has_exact_grad:
        raise CapabilityError(
            "No exact or deterministic route; use estimated_stationarity on a trace"
        )

    profile = oracle.profile
    target = tol * profile.mu / 10.0
    y = np.zeros(oracle.d2)
    converged = False
    iterations = 0
    for iterations in range(max_iter + 1):
        gy = oracle.exact_grad(Iterate(x, y)).gy
        residual = norm(gy)
        if residual <= target:
            converged = True
            break
        if iterations < max_iter:
            y = y + gy / profile.ell
    if not converged:
        logger.warning(
            f"Inner solve stopped after {max_iter} iterations with residual {residual:.3e} "
            f"(target {target:.3e})"
        )
    gx = oracle.exact_grad(Iterate(x, y)).gx
    return StationarityReport(
        x=x,
        phi_grad_norm=norm(gx),
        method="inner-solve",
        residual=residual,
        error_bound=profile.kappa * residual,
        converged=converged,
        iterations=iterations,
    )


def estimated_stationarity(trace: RunTrace, epsilon: float) -> StationarityReport:
    """Upper estimate mean_k |v_k| + (4/3) epsilon for problems without diagnostics."""
    v_norms = [value for value in trace.column("v_norm") if value is not None]
    if not v_norms:
        raise InputError("Trace has no v_norm values")
    return StationarityReport(
        x=trace.x_hat,
        phi_grad_norm=float(np.mean(v_norms)) + 4.0 / 3.0 * epsilon,
        method="estimated",
    )


def evals_to_tolerance(
    trace: RunTrace,
    eps_target: float,
    convention: Literal["physical", "paper"] = "physical",
) -> Optional[int]:
    """First cumulative eval count at which |grad Phi(x_k)| <= eps_target.

    Raises:
        InputError: If the trace has no phi_grad_norm column
    """
    if not trace.has_diagnostics():
        raise InputError("Trace has no exact phi_grad_norm diagnostics")
    for row in trace.rows:
        if row.phi_grad_norm is not None and row.phi_grad_norm <= eps_target:
            return row.evals_physical if convention == "physical" else row.evals_paper
    return None


@dataclass
class ComplexityCurve:
    """Eval counts needed to reach each target epsilon for one algorithm."""

    algorithm: str
    points: list[tuple[float, Optional[float]]] = field(default_factory=list)

    def add(self, epsilon: float, evals: Optional[float]) -> None:
        self.points.append((epsilon, evals))

    def reached(self) -> list[tuple[float, float]]:
        return [(eps, evals) for eps, evals in self.points if evals is not None]

    def is_monotone(self) -> bool:
        """Eval counts never decrease as epsilon shrinks."""
        ordered = sorted(self.reached(), key=lambda point: -point[0])
        return all(a[1] <= b[1] for a, b in zip(ordered, ordered[1:]))


def fit_slope(curve: ComplexityCurve) -> float:
    """Least-squares slope of log(evals) against log(1/epsilon).

    Unreached points are dropped with a warning.

    Raises:
        InputError: If fewer than two distinct epsilons remain
    """
    for eps, evals in curve.points:
        if evals is None:
            logger.warning(f"{curve.algorithm}: epsilon={eps} never reached; excluded from fit")
    reached = curve.reached()
    if len({eps for eps, _ in reached}) < 2:
        raise InputError(
            f"{curve.algorithm}: need at least two distinct reached epsilons for a slope fit"
        )
    if len(reached) < 3:
        logger.warning(f"{curve.algorithm}: slope fitted from only {len(reached)} points")
    log_inv_eps = np.log([1.0 / eps for eps, _ in reached])
    log_evals = np.log([evals for _, evals in reached])
    return float(stats.linregress(log_inv_eps, log_evals).slope)


def slope_ordering_holds(
    sreda_slope: float,
    baseline_slope: float,
    margin: float = 0.5,
    band: tuple[float, float] = (2.0, 4.0),
) -> bool:
    """SREDA's slope sits in ``band`` and at least ``margin`` below the baseline's."""
    if not (math.isfinite(sreda_slope) and math.isfinite(baseline_slope)):
        return False
    return band[0] <= sreda_slope <= band[1] and sreda_slope <= baseline_slope - margin


def u_contraction_factor(profile: SmoothnessProfile, lam: float) -> float:
    """Per-step factor 1 - 2 mu ell lam / (mu + ell) on E|u_t|^2."""
    mu, ell = profile.mu, profile.ell
    return 1.0 - 2.0 * mu * ell * lam / (mu + ell)


def delta_recursion_bound(
    params: SredaParams,
    profile: SmoothnessProfile,
    delta_k: float,
    Delta_k: float,
) -> float:
    """Upper bound on delta_{k+1} after one outer step.

    With a = 2 / (mu lam (m + 1)), b = 3 ell lam / (2 - ell lam) and
    eps_x^2 = eps^2 / (25 kappa^2 ell^2):
    (a + b) delta_k + (1 + b) Delta_k + (1 + a + 2 b) ell^2 eps_x^2.
    """
    mu, ell, kappa = profile.mu, profile.ell, profile.kappa
    lam = params.lam
    if not 0 < ell * lam < 2:
        raise InputError(f"Bound needs 0 < ell * lam < 2, got {ell * lam}")
    a = 2.0 / (mu * lam * (params.m + 1))
    b = 3.0 * ell * lam / (2.0 - ell * lam)
    eps_x_sq = params.epsilon**2 / (25.0 * kappa**2 * ell**2)
    return (a + b) * delta_k + (1.0 + b) * Delta_k + (1.0 + a + 2.0 * b) * ell**2 * eps_x_sq


def tracking_error_limits(params: SredaParams) -> tuple[float, float]:
    """(limit on Delta_k, limit on delta_k) = (zeta / 12, zeta)."""
    return params.zeta / 12.0, params.zeta


def delta_recursion_excess(
    params: SredaParams,
    profile: SmoothnessProfile,
    averages: dict[str, np.ndarray],
    slack: float = 2.0,
) -> np.ndarray:
    """Per-k ratio of mean delta_{k+1} to ``slack`` times its recursion bound.

    ``averages`` is a ``seed_average`` result with delta_k and Delta_k; values
    above 1 are violations. Rows without a Delta_k (the final row) are skipped.
    """
    delta, Delta = averages["delta_k"], averages["Delta_k"]
    ratios = []
    for k in range(len(delta) - 1):
        if math.isnan(Delta[k]) or math.isnan(delta[k + 1]):
            continue
        bound = delta_recursion_bound(params, profile, float(delta[k]), float(Delta[k]))
        ratios.append(float(delta[k + 1]) / (slack * bound))
    return np.asarray(ratios)


def seed_average(
    traces: Sequence[RunTrace],
    columns: Iterable[str] = ("v_norm", "phi_grad_norm", "delta_k", "Delta_k"),
) -> dict[str, np.ndarray]:
    """Per-k mean of trace columns over seeds, truncated to the shortest trace.

    Columns that are empty in every trace are left out.
    """
    if not traces:
        raise InputError("seed_average needs at least one trace")
    length = min(len(trace.rows) for trace in traces)
    averages: dict[str, np.ndarray] = {}
    for name in columns:
        table = np.array(
            [
                [math.nan if value is None else value for value in trace.column(name)[:length]]
                for trace in traces
            ],
            dtype=np.float64,
        )
        present = ~np.isnan(table)
        if not present.any():
            continue
        counts = present.sum(axis=0)
        sums = np.where(present, table, 0.0).sum(axis=0)
        averages[name] = np.divide(
            sums, counts, out=np.full(length, math.nan), where=counts > 0
        )
    return averages
