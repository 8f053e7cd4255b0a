"""Tests for the solver registry."""

import numpy as np
import pytest

from sreda.core import RunStreams
from sreda.errors import CapabilityError, InputError
from sreda.problems import initial_point
from sreda.solvers import SOLVER_REGISTRY, SolverRegistry, SolverRequest
from sreda.solvers.trace import RunTrace, TraceRow


def _request(oracle, **kwargs) -> SolverRequest:
    return SolverRequest(
        oracle=oracle,
        x0=initial_point(0, oracle.d1),
        epsilon=0.5,
        delta_f=1.0,
        streams=RunStreams.from_seed(0),
        **kwargs,
    )


class TestSolverRegistry:
    """Tests for SolverRegistry."""

    def test_builtin_solvers(self):
        """The four solvers are registered on import."""
        assert set(SOLVER_REGISTRY.list_solvers()) == {"sreda", "sreda-finite", "sgda", "sgdmax"}

    def test_descriptions_come_from_docstrings(self):
        """Metadata carries the entry point docstring."""
        assert "finite-sum" in SOLVER_REGISTRY.get("sreda-finite").description.lower()

    def test_unknown_name(self):
        """Unknown solvers are input errors listing the available ones."""
        with pytest.raises(InputError, match="Available solvers"):
            SOLVER_REGISTRY.get("adam")

    def test_finite_sum_requirement(self, noisy_saddle):
        """sreda-finite refuses Gaussian problems before running."""
        with pytest.raises(CapabilityError):
            SOLVER_REGISTRY.validate("sreda-finite", noisy_saddle)

    def test_decorator_forms(self):
        """Both @register and @register("name") work."""
        registry = SolverRegistry()

        @registry.register
        def plain(request):
            """Plain solver"""

        @registry.register("named", requires_finite_sum=True)
        def other(request):
            """Named solver"""

        assert registry.list_solvers() == ["plain", "named"]
        assert registry.get("named").requires_finite_sum
        assert registry.get("plain").description == "Plain solver"

    def test_duplicate_name(self):
        """Registering a name twice is a programming error."""
        registry = SolverRegistry()
        registry.register("a")(lambda request: None)
        with pytest.raises(ValueError, match="already registered"):
            registry.register("a")(lambda request: None)

    def test_run_passes_request(self, noisy_saddle):
        """run hands the request to the entry point and returns its trace."""
        registry = SolverRegistry()
        seen = []

        @registry.register("echo")
        def echo(request):
            seen.append(request)
            return RunTrace(
                algorithm="echo",
                rows=[TraceRow(k=0, evals_physical=0, evals_paper=0)],
                x_hat=request.x0,
                x_hat_index=0,
            )

        request = _request(noisy_saddle)
        trace = registry.run("echo", request)
        assert seen == [request]
        np.testing.assert_array_equal(trace.x_hat, request.x0)

    def test_sgda_through_registry(self, noisy_saddle):
        """Overrides reach the derived parameters."""
        trace = SOLVER_REGISTRY.run(
            "sgda", _request(noisy_saddle, overrides={"K": 2, "S": 3}, iteration_cap=None)
        )
        assert len(trace.rows) == 3
        assert trace.total_evals == 9
