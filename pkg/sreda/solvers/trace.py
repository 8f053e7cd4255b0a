"""Per-iteration run records and their CSV form."""

import csv
import io
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from sreda.core import Iterate, Vec, norm
from sreda.problems import ProblemOracle

CSV_COLUMNS = (
    "k",
    "eta_k",
    "v_norm",
    "u_norm",
    "evals_physical",
    "evals_paper",
    "phi_grad_norm",
    "delta_k",
    "Delta_k",
)


@dataclass(frozen=True)
class TraceRow:
    """One outer iteration.

    Eval counts are cumulative and taken before the iteration's own work, so
    row 0 already includes the initializer. Diagnostic cells are None when the
    run has no exact gradients.
    """

    k: int
    evals_physical: int
    evals_paper: int
    eta: Optional[float] = None
    v_norm: Optional[float] = None
    u_norm: Optional[float] = None
    phi_grad_norm: Optional[float] = None
    delta: Optional[float] = None
    Delta: Optional[float] = None

    def as_cells(self) -> list[str]:
        values = (
            self.k,
            self.eta,
            self.v_norm,
            self.u_norm,
            self.evals_physical,
            self.evals_paper,
            self.phi_grad_norm,
            self.delta,
            self.Delta,
        )
        return [_cell(value) for value in values]


@dataclass
class RunTrace:
    """Full record of one solver run."""

    algorithm: str
    rows: list[TraceRow]
    x_hat: Vec
    x_hat_index: int
    y0: Optional[Vec] = None
    x_path: list[Vec] = field(default_factory=list)
    bound_certified: bool = True
    total_evals: int = 0
    total_evals_paper: int = 0
    inner_evals: int = 0
    metadata: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def column(self, name: str) -> list[Optional[float]]:
        """Values of one CSV column, None for empty cells."""
        attr = {"eta_k": "eta", "delta_k": "delta", "Delta_k": "Delta"}.get(name, name)
        if name not in CSV_COLUMNS:
            raise KeyError(f"Unknown trace column '{name}'")
        return [getattr(row, attr) for row in self.rows]

    def has_diagnostics(self) -> bool:
        return any(row.phi_grad_norm is not None for row in self.rows)

    def to_csv(self) -> str:
        """Render the trace; floats use repr so reruns are byte-identical."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.as_cells())
        return buffer.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def diagnostic_row(
    k: int,
    physical: int,
    paper: int,
    oracle: ProblemOracle,
    point: Iterate,
    diagnostics: bool,
    eta: Optional[float] = None,
    v: Optional[Vec] = None,
    u: Optional[Vec] = None,
) -> TraceRow:
    """Build a row, adding exact diagnostics at ``point`` when requested."""
    values = dict(k=k, evals_physical=physical, evals_paper=paper, eta=eta)
    if v is not None:
        values["v_norm"] = norm(v)
        values["u_norm"] = norm(u)
    if diagnostics:
        exact = oracle.exact_grad(point)
        values["delta"] = float(exact.gy @ exact.gy)
        if oracle.has_phi:
            values["phi_grad_norm"] = norm(oracle.phi_grad(point.x))
        if v is not None:
            values["Delta"] = float(np.sum((v - exact.gx) ** 2) + np.sum((u - exact.gy) ** 2))
    return TraceRow(**values)
