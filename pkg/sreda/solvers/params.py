"""Parameter derivation for SREDA and the gradient descent ascent baselines.

All ceilings are applied to the whole expression, and any integer that would
come out below 1 is floored to 1.
"""

import dataclasses
import math
import typing
from dataclasses import dataclass
from typing import Any, Optional

from loguru import logger

from sreda.core import ceil_int
from sreda.errors import ContractViolation, ParameterError
from sreda.problems import SmoothnessProfile

MAX_INT = 2**63 - 1

# Constant of the certified stationarity bound E|grad Phi(x_hat)| <= C * epsilon
BOUND_CONSTANT = 1073.0 / 108.0
S2_CONSTANT = 7368.0 / 175.0


@dataclass(frozen=True)
class SredaParams:
    """Every constant a SREDA run needs."""

    epsilon: float
    zeta: float
    lam: float
    q: int
    S1: int
    S2: int
    K: int
    m: int
    eta_num: float
    eta_cap: float
    # Restarts use the full gradient; S1 then records n
    full_restart: bool = False

    def __post_init__(self):
        for name in ("epsilon", "zeta", "lam", "eta_num", "eta_cap"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("q", "S1", "S2"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.K < 0 or self.m < 0:
            raise ParameterError(f"K and m must be >= 0, got K={self.K}, m={self.m}")

    @property
    def predicted_bound(self) -> float:
        return BOUND_CONSTANT * self.epsilon

    @property
    def step_bound(self) -> float:
        """Largest possible |x_{k+1} - x_k|, since eta_k |v_k| <= eta_num."""
        return self.eta_num


@dataclass(frozen=True)
class BaselineParams:
    """Step sizes and budgets for SGDA and SGDmax."""

    eta: float
    lam: float
    S: int
    K: int
    zeta: Optional[float] = None
    inner_steps: Optional[int] = None

    def __post_init__(self):
        if self.eta < 0 or self.lam < 0:
            raise ParameterError(f"Steps must be non-negative, got eta={self.eta}, lam={self.lam}")
        if self.S < 1:
            raise ParameterError(f"S must be >= 1, got {self.S}")
        if self.K < 0:
            raise ParameterError(f"K must be >= 0, got {self.K}")
        if self.inner_steps is not None and self.inner_steps < 0:
            raise ParameterError(f"inner_steps must be >= 0, got {self.inner_steps}")


@dataclass(frozen=True)
class PredictedEvals:
    """Oracle calls a full (uncapped) SREDA run will spend."""

    paper: int
    physical: int
    restarts: int
    init: Optional[int] = None

    @property
    def total_physical(self) -> Optional[int]:
        return None if self.init is None else self.physical + self.init


def derive_params(epsilon: float, profile: SmoothnessProfile, delta_f: float) -> SredaParams:
    """SREDA parameters for target epsilon.

    zeta = eps^2/kappa^2, lam = 2/(7 ell), q = ceil(1/eps),
    S1 = ceil(24 sigma^2 kappa^2 / eps^2), S2 = ceil(7368/175 kappa q),
    m = ceil(28 kappa - 1), K = ceil(100 kappa ell Delta_f / (9 eps^2)),
    eta_k = min(eps / (5 kappa ell |v_k|), 1 / (10 kappa ell)).
    """
    _check_targets(epsilon, delta_f)
    kappa, ell, sigma = profile.kappa, profile.ell, profile.sigma
    q = _bounded("q", 1.0 / epsilon)
    params = SredaParams(
        epsilon=epsilon,
        zeta=(epsilon / kappa) ** 2,
        lam=2.0 / (7.0 * ell),
        q=q,
        S1=_bounded("S1", 24.0 * sigma**2 * kappa**2 / epsilon**2),
        S2=_bounded("S2", S2_CONSTANT * kappa * q),
        K=_bounded("K", 100.0 * kappa * ell * delta_f / (9.0 * epsilon**2)),
        m=_bounded("m", 28.0 * kappa - 1.0),
        eta_num=epsilon / (5.0 * kappa * ell),
        eta_cap=1.0 / (10.0 * kappa * ell),
    )
    logger.debug(f"Derived SREDA params: {params}")
    return params


def derive_params_finite(
    epsilon: float, profile: SmoothnessProfile, delta_f: float, n: int
) -> SredaParams:
    """Finite-sum SREDA parameters.

    For n >= kappa^2: q = ceil(sqrt(n)/kappa) and S2 = ceil(7368/175 kappa q).
    Otherwise q = 1 and S2 = 1. Restarts always use the full gradient, and the
    remaining fields match :func:`derive_params`.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    base = derive_params(epsilon, profile, delta_f)
    kappa = profile.kappa
    if n >= kappa**2 * (1 - 1e-9):
        q = _bounded("q", math.sqrt(n) / kappa)
        S2 = _bounded("S2", S2_CONSTANT * kappa * q)
    else:
        q, S2 = 1, 1
    return dataclasses.replace(base, q=q, S2=S2, S1=n, full_restart=True)


def step_size(params: SredaParams, v_norm: float) -> float:
    """Normalized step min(eta_num / |v|, eta_cap); eta_cap when v = 0."""
    if v_norm < 0:
        raise ContractViolation(f"v_norm must be >= 0, got {v_norm}")
    if v_norm == 0:
        return params.eta_cap
    return min(params.eta_num / v_norm, params.eta_cap)


def derive_baseline_params(
    algorithm: str,
    epsilon: float,
    profile: SmoothnessProfile,
    delta_f: float,
    inner_cap: Optional[int] = None,
) -> BaselineParams:
    """Default SGDA / SGDmax parameters with all order constants set to 1.

    SGDA: eta = 1/(kappa^2 ell), lam = 1/ell, S = ceil(kappa/eps^2),
    K = ceil(kappa^2 ell Delta_f / eps^2).
    SGDmax: eta = 1/(kappa ell), lam = 1/ell, S = ceil(kappa/eps^2),
    K = ceil(kappa ell Delta_f / eps^2), zeta = eps^2/kappa^2 and
    ceil(kappa^2 eps^-2 / S) inner batches, capped by ``inner_cap``.
    """
    _check_targets(epsilon, delta_f)
    kappa, ell = profile.kappa, profile.ell
    S = _bounded("S", kappa / epsilon**2)
    if algorithm == "sgda":
        return BaselineParams(
            eta=1.0 / (kappa**2 * ell),
            lam=1.0 / ell,
            S=S,
            K=_bounded("K", kappa**2 * ell * delta_f / epsilon**2),
        )
    if algorithm == "sgdmax":
        inner_steps = _bounded("inner_steps", kappa**2 / epsilon**2 / S)
        if inner_cap is not None and inner_steps > inner_cap:
            logger.info(f"SGDmax inner steps {inner_steps} capped at {inner_cap}")
            inner_steps = inner_cap
        return BaselineParams(
            eta=1.0 / (kappa * ell),
            lam=1.0 / ell,
            S=S,
            K=_bounded("K", kappa * ell * delta_f / epsilon**2),
            zeta=(epsilon / kappa) ** 2,
            inner_steps=inner_steps,
        )
    raise ParameterError(f"No baseline parameters for algorithm '{algorithm}'")


def apply_overrides(params, overrides: dict[str, Any]):
    """Replace fields of a parameter dataclass after checking names and types.

    Raises:
        ParameterError: Unknown field, wrong type, or an invalid result
    """
    if not overrides:
        return params
    hints = typing.get_type_hints(type(params))
    known = {f.name for f in dataclasses.fields(params)}
    checked: dict[str, Any] = {}
    for name, value in overrides.items():
        if name not in known:
            raise ParameterError(
                f"Unknown parameter '{name}' for {type(params).__name__}. "
                f"Available: {', '.join(sorted(known))}"
            )
        checked[name] = _coerce(name, value, hints[name])
    logger.info(f"Applying parameter overrides: {checked}")
    return dataclasses.replace(params, **checked)


def predicted_evals(params: SredaParams, init_evals: Optional[int] = None) -> PredictedEvals:
    """Oracle-call tally of an uncapped run.

    The paper convention charges ceil(K/q) S1 + K S2 (m + 2); the physical count
    evaluates every correction sample at two points.
    """
    restarts = -(-params.K // params.q)
    corrections = params.K * params.S2 * (params.m + 2)
    return PredictedEvals(
        paper=restarts * params.S1 + corrections,
        physical=restarts * params.S1 + 2 * corrections,
        restarts=restarts,
        init=init_evals,
    )


def _check_targets(epsilon: float, delta_f: float) -> None:
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if not delta_f > 0:
        raise ParameterError(f"delta_f must be positive, got {delta_f}")


def _bounded(name: str, value: float) -> int:
    if not math.isfinite(value) or value > MAX_INT:
        raise ParameterError(
            f"{name} = {value:.3g} overflows a 64-bit integer; try a larger epsilon"
        )
    result = ceil_int(value)
    if result > MAX_INT:
        raise ParameterError(f"{name} = {result} overflows a 64-bit integer; try a larger epsilon")
    return result


def _coerce(name: str, value: Any, hint: Any) -> Any:
    allowed = typing.get_args(hint) or (hint,)
    if value is None:
        if type(None) in allowed:
            return None
        raise ParameterError(f"Parameter '{name}' cannot be null")
    if bool in allowed:
        if isinstance(value, bool):
            return value
    elif int in allowed:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif float in allowed:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    raise ParameterError(
        f"Parameter '{name}' expects {' | '.join(a.__name__ for a in allowed)}, "
        f"got {type(value).__name__} {value!r}"
    )
