"""Solver registry for name-based lookup from experiment configs.

The solver registry provides:
- Decorator-based registration of solver entry points
- Capability checking (finite-sum requirement) before a run starts
- A traced ``run`` wrapper used by the harness
"""

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

from loguru import logger
from opentelemetry.trace import Status, StatusCode

from sreda.core import RunStreams, Vec
from sreda.errors import CapabilityError, InputError
from sreda.problems import ProblemOracle
from sreda.solvers.trace import RunTrace
from sreda.telemetry import traced_span


@dataclass
class SolverRequest:
    """Everything a registered solver needs for one seeded run."""

    oracle: ProblemOracle
    x0: Vec
    epsilon: float
    delta_f: float
    streams: RunStreams
    overrides: Dict[str, Any] = field(default_factory=dict)
    diagnostics: bool = True
    iteration_cap: Optional[int] = None
    inner_cap: Optional[int] = None
    y0: Optional[Vec] = None


@dataclass
class SolverMetadata:
    """Metadata about a registered solver."""

    name: str
    run: Callable[[SolverRequest], RunTrace]
    description: str
    requires_finite_sum: bool


class SolverRegistry:
    """Registry of solver entry points keyed by their config name."""

    def __init__(self):
        self._solvers: Dict[str, SolverMetadata] = {}

    def register(self, name: str = None, *, requires_finite_sum: bool = False):
        """Decorator to register a solver entry point.

        The description is taken from the function docstring.

        Example:
            @SOLVER_REGISTRY.register("sgda")
            def run_sgda(request: SolverRequest) -> RunTrace:
                '''Simultaneous stochastic gradient descent ascent'''
                ...

        Raises:
            ValueError: If the name is already registered
        """

        def decorator(func: Callable[[SolverRequest], RunTrace]):
            solver_name = name if isinstance(name, str) else func.__name__
            if solver_name in self._solvers:
                existing = self._solvers[solver_name].run
                raise ValueError(
                    f"Solver '{solver_name}' is already registered. "
                    f"Existing: {existing.__module__}.{existing.__name__}"
                )
            self._solvers[solver_name] = SolverMetadata(
                name=solver_name,
                run=func,
                description=(func.__doc__ or "").strip(),
                requires_finite_sum=requires_finite_sum,
            )
            logger.debug(
                f"Registered solver '{solver_name}' (finite-sum only: {requires_finite_sum})"
            )
            return func

        # Allow both @register and @register("name")
        if callable(name):
            return decorator(name)
        return decorator

    def get(self, name: str) -> SolverMetadata:
        """Get solver metadata by name.

        Raises:
            InputError: If the name is not registered
        """
        if name not in self._solvers:
            available = self.list_solvers()
            raise InputError(f"Unknown solver: '{name}'. Available solvers: {available}")
        return self._solvers[name]

    def list_solvers(self) -> list[str]:
        return list(self._solvers.keys())

    def validate(self, name: str, oracle: ProblemOracle) -> SolverMetadata:
        """Check that ``oracle`` offers what solver ``name`` needs."""
        meta = self.get(name)
        if meta.requires_finite_sum and not oracle.is_finite_sum:
            raise CapabilityError(f"Solver '{name}' needs a finite-sum problem")
        return meta

    def run(self, name: str, request: SolverRequest) -> RunTrace:
        """Run solver ``name`` inside a ``solver.<name>`` span."""
        meta = self.validate(name, request.oracle)
        attributes = {
            "solver.name": name,
            "solver.epsilon": request.epsilon,
            "solver.seed": request.streams.seed,
            "solver.diagnostics": request.diagnostics,
        }
        with traced_span(f"solver.{name}", **attributes) as span:
            start_time = time.time()
            try:
                trace = meta.run(request)
            except Exception as e:
                if span:
                    span.set_status(Status(StatusCode.ERROR, str(e)))
                    span.record_exception(e)
                raise
            if span:
                span.set_attribute("solver.duration_ms", (time.time() - start_time) * 1000)
                span.set_attribute("solver.evals_physical", trace.total_evals)
                span.set_attribute("solver.evals_paper", trace.total_evals_paper)
                span.set_attribute("solver.bound_certified", trace.bound_certified)
                span.set_status(Status(StatusCode.OK))
            return trace


# Global registry instance
SOLVER_REGISTRY = SolverRegistry()
