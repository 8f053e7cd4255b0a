"""Tests for run traces and their CSV rendering."""

import numpy as np
import pytest

from sreda.solvers.trace import CSV_COLUMNS, RunTrace, TraceRow


def _trace() -> RunTrace:
    rows = [
        TraceRow(k=0, evals_physical=5, evals_paper=5, eta=0.01, v_norm=1.0, u_norm=0.5, phi_grad_norm=2.0),
        TraceRow(k=1, evals_physical=25, evals_paper=15),
    ]
    return RunTrace(algorithm="sreda", rows=rows, x_hat=np.zeros(2), x_hat_index=0)


class TestRunTrace:
    """Tests for RunTrace."""

    def test_header(self):
        """The CSV starts with the fixed column header."""
        assert _trace().to_csv().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_missing_values_are_empty_cells(self):
        """None renders as an empty cell, integers without a decimal point."""
        lines = _trace().to_csv().splitlines()
        assert lines[1] == "0,0.01,1.0,0.5,5,5,2.0,,"
        assert lines[2] == "1,,,,25,15,,,"

    def test_column_lookup(self):
        """Columns are addressed by their CSV names."""
        trace = _trace()
        assert trace.column("eta_k") == [0.01, None]
        assert trace.column("evals_paper") == [5, 15]

    def test_unknown_column(self):
        """Unknown names raise KeyError."""
        with pytest.raises(KeyError):
            _trace().column("eta")

    def test_has_diagnostics(self):
        """A trace has diagnostics once any row carries phi_grad_norm."""
        assert _trace().has_diagnostics()
        bare = RunTrace(
            algorithm="sgda",
            rows=[TraceRow(k=0, evals_physical=0, evals_paper=0)],
            x_hat=np.zeros(1),
            x_hat_index=0,
        )
        assert not bare.has_diagnostics()
