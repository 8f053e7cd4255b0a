"""CSV traces, JSON summaries and the summary schema.

Nothing written here carries a timestamp, so identical runs produce
byte-identical files.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from sreda.metrics import seed_average
from sreda.solvers.trace import RunTrace
from sreda.utils import atomic_write_text


class SeedSummary(BaseModel):
    """Outcome of one seed."""

    seed: int
    x_hat: List[float]
    x_hat_index: int
    phi_grad_norm: Optional[float] = Field(description="|grad Phi(x_hat)|, None if unmeasurable")
    stationarity_method: str
    evals_physical: int
    evals_paper: int
    inner_evals: int = 0
    bound_certified: bool
    warnings: List[str] = []


class RunSummary(BaseModel):
    """Summary of `sreda run` over all seeds."""

    algorithm: str
    epsilon: float
    delta_f: float
    problem: Dict[str, Any]
    params: Dict[str, Any] = Field(description="Parameters actually used, after overrides")
    predicted_bound: float = Field(description="1073/108 * epsilon")
    seeds: List[int]
    mean_phi_grad_norm: Optional[float]
    std_phi_grad_norm: Optional[float]
    mean_evals_physical: float
    mean_evals_paper: float
    bound_certified: bool
    per_seed: List[SeedSummary]


class CurvePoint(BaseModel):
    epsilon: float
    evals_to_reach: Optional[float] = Field(description="Mean over seeds that reached epsilon")
    reached_seeds: int


class SweepSummary(BaseModel):
    """Summary of `sreda sweep`."""

    problem: Dict[str, Any]
    seeds: List[int]
    epsilons: List[float]
    curves: Dict[str, List[CurvePoint]]
    slopes: Dict[str, Optional[float]] = Field(
        description="Fitted slope of log(evals) against log(1/epsilon)"
    )


def trace_path(out_dir: Path, algorithm: str, seed: int, suffix: str = "") -> Path:
    return Path(out_dir) / f"{algorithm}{suffix}_seed{seed}.csv"


def write_trace_csv(trace: RunTrace, out_dir: Path, seed: int, suffix: str = "") -> Path:
    """Write ``<out>/<algo>_seed<k>.csv``."""
    path = trace_path(out_dir, trace.algorithm, seed, suffix)
    atomic_write_text(path, trace.to_csv())
    return path


def write_seed_average_csv(traces: Sequence[RunTrace], out_dir: Path, algorithm: str) -> Path:
    """Per-k seed means of the diagnostic columns, ``<out>/<algo>_seed_mean.csv``."""
    averages = seed_average(traces)
    columns = list(averages)
    length = len(next(iter(averages.values()))) if averages else 0
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", *columns])
    for k in range(length):
        cells = [str(k)]
        for name in columns:
            value = averages[name][k]
            cells.append("" if math.isnan(value) else repr(float(value)))
        writer.writerow(cells)
    path = Path(out_dir) / f"{algorithm}_seed_mean.csv"
    atomic_write_text(path, buffer.getvalue())
    return path


def write_summary(summary: BaseModel, out_dir: Path, name: str) -> Path:
    """Write ``<name>.json`` and its JSON schema ``<name>.schema.json``."""
    out_dir = Path(out_dir)
    path = out_dir / f"{name}.json"
    atomic_write_text(path, json.dumps(summary.model_dump(mode="json"), indent=2) + "\n")
    schema = type(summary).model_json_schema()
    atomic_write_text(out_dir / f"{name}.schema.json", json.dumps(schema, indent=2) + "\n")
    logger.info(f"Wrote {path}")
    return path


def mean_and_std(values: Sequence[Optional[float]]) -> tuple[Optional[float], Optional[float]]:
    """Mean and sample std of the non-missing values."""
    present = np.array([v for v in values if v is not None], dtype=np.float64)
    if present.size == 0:
        return None, None
    std = float(np.std(present, ddof=1)) if present.size > 1 else 0.0
    return float(np.mean(present)), std
