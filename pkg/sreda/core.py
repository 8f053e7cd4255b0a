"""Shared numeric types, seeded random streams and oracle-call accounting.

Every other module builds on the pieces defined here:
- Vector helpers (dot, norm, axpy) with dimension contracts
- Iterate and GradPair value types
- Named random streams that are reproducible per (seed, purpose)
- EvalCounter, the single source of truth for oracle-call counts
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from sreda.errors import ContractViolation

Vec = npt.NDArray[np.float64]

_MAX_SEED = 2**64 - 1


def as_vec(values, dim: int | None = None, what: str = "vector") -> Vec:
    """Convert ``values`` to a finite 1-D float64 array.

    Args:
        values: Anything numpy can turn into a 1-D array
        dim: Expected length, if known
        what: Name used in error messages

    Returns:
        A fresh float64 array

    Raises:
        ContractViolation: If the shape is wrong or an entry is not finite
    """
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ContractViolation(f"{what} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ContractViolation(f"{what} must have dimension {dim}, got {arr.shape[0]}")
    ensure_finite(arr, what)
    return arr


def ensure_finite(arr: np.ndarray, what: str = "vector") -> None:
    """Raise if ``arr`` holds NaN or Inf."""
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{what} contains non-finite entries")


def _check_same_shape(a: Vec, b: Vec) -> None:
    if np.shape(a) != np.shape(b):
        raise ContractViolation(
            f"Dimension mismatch: {np.shape(a)} vs {np.shape(b)}"
        )


def dot(a: Vec, b: Vec) -> float:
    """Euclidean inner product of two vectors of equal dimension."""
    _check_same_shape(a, b)
    return float(np.dot(a, b))


def norm(a: Vec) -> float:
    """Euclidean 2-norm."""
    return float(np.linalg.norm(a))


def axpy(alpha: float, a: Vec, b: Vec) -> Vec:
    """Return ``alpha * a + b`` as a new array."""
    _check_same_shape(a, b)
    return alpha * np.asarray(a, dtype=np.float64) + np.asarray(b, dtype=np.float64)


@dataclass(frozen=True)
class Iterate:
    """A point (x, y) of the minimax problem."""

    x: Vec
    y: Vec


@dataclass(frozen=True)
class GradPair:
    """Partial gradients (G_x, G_y) returned by one oracle evaluation."""

    gx: Vec
    gy: Vec

    def __add__(self, other: "GradPair") -> "GradPair":
        _check_same_shape(self.gx, other.gx)
        _check_same_shape(self.gy, other.gy)
        return GradPair(self.gx + other.gx, self.gy + other.gy)

    def __sub__(self, other: "GradPair") -> "GradPair":
        _check_same_shape(self.gx, other.gx)
        _check_same_shape(self.gy, other.gy)
        return GradPair(self.gx - other.gx, self.gy - other.gy)

    def sq_norm(self) -> float:
        """Squared norm of the stacked pair."""
        return float(np.dot(self.gx, self.gx) + np.dot(self.gy, self.gy))


class StreamPurpose(Enum):
    """Fixed enumeration of random-stream purposes.

    The integer value is mixed into the seed sequence, so values must never be
    renumbered once results have been published.
    """

    INIT = 1
    RESTART_BATCH = 2
    INNER_BATCH = 3
    INDEX_SK = 4
    BASELINE = 5
    PROBLEM = 6
    INIT_INDEX = 7


def spawn_stream(seed: int, purpose: StreamPurpose) -> np.random.Generator:
    """Create the random stream for ``(seed, purpose)``.

    Uses the counter-based Philox bit generator keyed by a SeedSequence built
    from the seed and the purpose id, so the same pair always reproduces the
    same draws and different purposes give independent streams.

    Args:
        seed: Non-negative 64-bit run seed
        purpose: Which consumer the stream belongs to

    Returns:
        A numpy Generator owned by the caller
    """
    if not 0 <= int(seed) <= _MAX_SEED:
        raise ContractViolation(f"Seed must fit in an unsigned 64-bit integer, got {seed}")
    sequence = np.random.SeedSequence([int(seed), purpose.value])
    return np.random.Generator(np.random.Philox(sequence))


@dataclass
class RunStreams:
    """All streams a single solver run draws from."""

    seed: int
    init: np.random.Generator
    restart_batch: np.random.Generator
    inner_batch: np.random.Generator
    index_sk: np.random.Generator
    baseline: np.random.Generator
    init_index: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RunStreams":
        return cls(
            seed=seed,
            init=spawn_stream(seed, StreamPurpose.INIT),
            restart_batch=spawn_stream(seed, StreamPurpose.RESTART_BATCH),
            inner_batch=spawn_stream(seed, StreamPurpose.INNER_BATCH),
            index_sk=spawn_stream(seed, StreamPurpose.INDEX_SK),
            baseline=spawn_stream(seed, StreamPurpose.BASELINE),
            init_index=spawn_stream(seed, StreamPurpose.INIT_INDEX),
        )


@dataclass
class EvalCounter:
    """Cumulative stochastic-gradient oracle calls.

    ``count`` is the physical number of gradient-pair evaluations, one per
    component per point. ``paper_count`` charges a common-random-numbers
    correction term once per sample instead of twice.
    """

    count: int = 0
    paper_count: int = 0

    def add_batch(self, size: int) -> None:
        """Charge ``size`` single-point evaluations."""
        self._check(size)
        self.count += size
        self.paper_count += size

    def add_paired(self, size: int) -> None:
        """Charge ``size`` samples evaluated at two points each."""
        self._check(size)
        self.count += 2 * size
        self.paper_count += size

    def snapshot(self) -> tuple[int, int]:
        return self.count, self.paper_count

    @staticmethod
    def _check(size: int) -> None:
        if size < 0:
            raise ContractViolation(f"Evaluation count increments must be >= 0, got {size}")


def ceil_int(value: float, floor: int = 1) -> int:
    """Outermost ceiling of ``value``, never below ``floor``.

    A relative tolerance of 1e-9 absorbs round-off, so 20 * 0.7 or
    100 / 9 * 9 land on the integer they represent instead of the next one.
    """
    if not np.isfinite(value):
        raise ContractViolation(f"Cannot take the ceiling of {value}")
    slack = 1e-9 * max(1.0, abs(value))
    return max(floor, int(np.ceil(value - slack)))
