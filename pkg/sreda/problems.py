"""Problem oracles for stochastic nonconvex-strongly-concave minimax problems.

A problem exposes its gradient pairs through :class:`ProblemOracle`:
- ``stoch_grad``: batch average of sampled gradient pairs
- ``paired_difference``: common-random-numbers correction term
- ``component_grad``: one sampled component, optionally at two points
- ``full_grad``: exact gradient (charged n evaluations for finite sums)
- ``y_star`` / ``phi_grad`` / ``phi_value``: closed forms, when available

:class:`QuadraticSaddle` is the verification family

    f(x, y) = 1/2 x^T A x + x^T B y - mu/2 |y|^2 + c^T y

with either additive Gaussian noise or a finite list of components.
:class:`StronglyConvexQuadratic` is a standalone strongly convex objective used
to exercise the initializers on non-trivial Hessians.
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field
from scipy import linalg, optimize

from sreda.core import (
    EvalCounter,
    GradPair,
    Iterate,
    StreamPurpose,
    Vec,
    as_vec,
    spawn_stream,
)
from sreda.errors import CapabilityError, ContractViolation, InputError, ParameterError
from sreda.utils import atomic_write_text

# Points used to estimate the finite-sum variance bound at construction
SIGMA_PROBE_POINTS = 1000


@dataclass(frozen=True)
class SmoothnessProfile:
    """Declared constants (ell, mu, sigma) of a problem."""

    ell: float
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ParameterError(f"mu must be positive, got {self.mu}")
        if self.ell < self.mu * (1 - 1e-12):
            raise ParameterError(f"ell ({self.ell}) must be >= mu ({self.mu})")
        if self.sigma < 0:
            raise ParameterError(f"sigma must be non-negative, got {self.sigma}")

    @property
    def kappa(self) -> float:
        return self.ell / self.mu


class ProblemOracle(ABC):
    """Sampled minimax objective with optional closed-form capabilities.

    Subclasses implement ``draw_samples`` and ``eval_samples``; the batch,
    paired and component operations are built on top of those two. A sample
    set is opaque to callers: it is whatever ``draw_samples`` returns.

    Capability flags must describe truthfully which optional operations work.
    """

    has_exact_grad: bool = False
    has_y_star: bool = False
    has_phi: bool = False

    def __init__(self, d1: int, d2: int, profile: SmoothnessProfile, n: Optional[int] = None):
        self.d1 = d1
        self.d2 = d2
        self.profile = profile
        self.n = n

    @property
    def is_finite_sum(self) -> bool:
        return self.n is not None

    @abstractmethod
    def draw_samples(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` i.i.d. random instances (with replacement)."""

    @abstractmethod
    def eval_samples(self, point: Iterate, samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate G at ``point`` for every sample.

        Returns:
            Arrays of shape (S, d1) and (S, d2)
        """

    @abstractmethod
    def value(self, point: Iterate) -> float:
        """Exact f(x, y)."""

    @abstractmethod
    def component_value(self, point: Iterate, sample: np.ndarray) -> float:
        """F(x, y; xi) for a single sample, used by finite-difference checks."""

    def check_point(self, point: Iterate) -> None:
        """Reject iterates whose dimensions do not match this problem."""
        if np.shape(point.x) != (self.d1,) or np.shape(point.y) != (self.d2,):
            raise ContractViolation(
                f"Iterate shapes {np.shape(point.x)}, {np.shape(point.y)} do not match "
                f"problem dims ({self.d1}, {self.d2})"
            )

    def stoch_grad(
        self,
        point: Iterate,
        batch_size: int,
        rng: np.random.Generator,
        counter: Optional[EvalCounter] = None,
    ) -> GradPair:
        """Average of ``batch_size`` sampled gradient pairs at ``point``."""
        if batch_size < 1:
            raise ContractViolation(f"batch_size must be >= 1, got {batch_size}")
        self.check_point(point)
        samples = self.draw_samples(rng, batch_size)
        gx, gy = self.eval_samples(point, samples)
        if counter is not None:
            counter.add_batch(batch_size)
        return GradPair(gx.mean(axis=0), gy.mean(axis=0))

    def paired_difference(
        self,
        new_point: Iterate,
        old_point: Iterate,
        batch_size: int,
        rng: np.random.Generator,
        counter: Optional[EvalCounter] = None,
    ) -> GradPair:
        """Mean of G(new; xi_i) - G(old; xi_i) over one shared sample set."""
        if batch_size < 1:
            raise ContractViolation(f"batch_size must be >= 1, got {batch_size}")
        self.check_point(new_point)
        self.check_point(old_point)
        samples = self.draw_samples(rng, batch_size)
        gx_new, gy_new = self.eval_samples(new_point, samples)
        gx_old, gy_old = self.eval_samples(old_point, samples)
        if counter is not None:
            counter.add_paired(batch_size)
        return GradPair((gx_new - gx_old).mean(axis=0), (gy_new - gy_old).mean(axis=0))

    def component_grad(
        self,
        point: Iterate,
        sample,
        paired_point: Optional[Iterate] = None,
        counter: Optional[EvalCounter] = None,
    ) -> GradPair | tuple[GradPair, GradPair]:
        """Gradient pair of one component, optionally also at ``paired_point``.

        Args:
            point: Evaluation point
            sample: A component index (finite-sum, 0-based) or a single sample
                returned by ``draw_samples(rng, 1)``
            paired_point: When given, evaluate the same component there too
            counter: Charged 1, or 2 when paired

        Returns:
            One GradPair, or a (at point, at paired_point) tuple when paired
        """
        samples = self._single_sample(sample)
        gx, gy = self.eval_samples(point, samples)
        first = GradPair(gx[0], gy[0])
        if paired_point is None:
            if counter is not None:
                counter.add_batch(1)
            return first
        gx2, gy2 = self.eval_samples(paired_point, samples)
        if counter is not None:
            counter.add_paired(1)
        return first, GradPair(gx2[0], gy2[0])

    def full_grad(self, point: Iterate, counter: Optional[EvalCounter] = None) -> GradPair:
        """Exact gradient pair; finite sums are charged ``n`` evaluations."""
        if not (self.is_finite_sum or self.has_exact_grad):
            raise CapabilityError(f"{type(self).__name__} has no full gradient")
        grad = self.exact_grad(point)
        if self.is_finite_sum and counter is not None:
            counter.add_batch(self.n)
        return grad

    def exact_grad(self, point: Iterate) -> GradPair:
        """Exact gradient pair for diagnostics; never charged."""
        raise CapabilityError(f"{type(self).__name__} has no exact gradient")

    def y_star(self, x: Vec) -> Vec:
        raise CapabilityError(f"{type(self).__name__} has no closed-form maximizer")

    def phi_grad(self, x: Vec) -> Vec:
        raise CapabilityError(f"{type(self).__name__} has no closed-form primal gradient")

    def phi_value(self, x: Vec) -> float:
        raise CapabilityError(f"{type(self).__name__} has no closed-form primal value")

    @property
    def phi_star(self) -> Optional[float]:
        """Infimum of the primal function when known."""
        return None

    def _single_sample(self, sample) -> np.ndarray:
        if self.is_finite_sum:
            index = int(np.asarray(sample).reshape(-1)[0])
            if not 0 <= index < self.n:
                raise InputError(f"Component index {index} outside [0, {self.n})")
            return np.array([index])
        samples = np.asarray(sample)
        if samples.ndim == 1:
            samples = samples[None, :]
        if samples.shape[0] != 1:
            raise InputError(f"Expected a single sample, got {samples.shape[0]}")
        return samples


class QuadraticSaddle(ProblemOracle):
    """Quadratic minimax instance with closed-form y*(x), Phi and grad Phi.

    Noise is either additive isotropic Gaussian with per-coordinate standard
    deviation ``noise_std`` (samples are standard normal vectors of length
    d1 + d2), or a finite list of components (A_i, B_i, c_i) whose uniform
    average is (A, B, c) (samples are component indices).
    """

    has_exact_grad = True
    has_y_star = True
    has_phi = True

    def __init__(
        self,
        A,
        B,
        c,
        mu: float,
        *,
        noise_std: float = 0.0,
        components: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None,
        ell: Optional[float] = None,
        sigma: Optional[float] = None,
        seed: Optional[int] = None,
        kind: str = "custom",
    ):
        A = np.array(A, dtype=np.float64, ndmin=2)
        B = np.array(B, dtype=np.float64, ndmin=2)
        c = as_vec(c, what="c")
        d1, d2 = B.shape
        if A.shape != (d1, d1) or c.shape != (d2,):
            raise ContractViolation(
                f"Inconsistent shapes: A {A.shape}, B {B.shape}, c {c.shape}"
            )
        if not np.allclose(A, A.T, atol=1e-12):
            raise ContractViolation("A must be symmetric")
        if not mu > 0:
            raise ParameterError(f"mu must be positive, got {mu}")
        if noise_std < 0:
            raise ParameterError(f"noise_std must be non-negative, got {noise_std}")

        n = None
        if components is not None:
            As, Bs, cs = (np.asarray(part, dtype=np.float64) for part in components)
            n = As.shape[0]
            if As.shape != (n, d1, d1) or Bs.shape != (n, d1, d2) or cs.shape != (n, d2):
                raise ContractViolation("Component arrays do not match (A, B, c)")
            self.As, self.Bs, self.cs = As, Bs, cs
            # The averaged matrices define f; keep them consistent with the components
            A, B, c = As.mean(axis=0), Bs.mean(axis=0), cs.mean(axis=0)
            A = 0.5 * (A + A.T)
        self.A, self.B, self.c, self.mu = A, B, c, float(mu)
        self.noise_std = float(noise_std)
        self.seed = seed
        self.kind = kind
        # Needed by the declared-constant helpers before the base class runs
        self.d1, self.d2, self.n = d1, d2, n

        if ell is None:
            ell = self._declared_ell()
        if sigma is None:
            sigma = self._declared_sigma(seed)
        super().__init__(d1, d2, SmoothnessProfile(ell=float(ell), mu=self.mu, sigma=float(sigma)), n=n)
        self._phi_star = self._compute_phi_star()

    @classmethod
    def from_components(cls, As, Bs, cs, mu: float, **kwargs) -> "QuadraticSaddle":
        As = np.asarray(As, dtype=np.float64)
        Bs = np.asarray(Bs, dtype=np.float64)
        cs = np.asarray(cs, dtype=np.float64)
        return cls(As.mean(axis=0), Bs.mean(axis=0), cs.mean(axis=0), mu, components=(As, Bs, cs), **kwargs)

    # -- sampling -------------------------------------------------------------

    def draw_samples(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.is_finite_sum:
            return rng.integers(0, self.n, size=size)
        return rng.standard_normal((size, self.d1 + self.d2))

    def eval_samples(self, point: Iterate, samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x, y = point.x, point.y
        if self.is_finite_sum:
            As, Bs, cs = self.As[samples], self.Bs[samples], self.cs[samples]
            gx = np.einsum("sij,j->si", As, x) + np.einsum("sij,j->si", Bs, y)
            gy = np.einsum("sij,i->sj", Bs, x) - self.mu * y + cs
            return gx, gy
        exact = self._analytic_grad(point)
        gx = exact.gx[None, :] + self.noise_std * samples[:, : self.d1]
        gy = exact.gy[None, :] + self.noise_std * samples[:, self.d1 :]
        return gx, gy

    # -- values and gradients -------------------------------------------------

    def value(self, point: Iterate) -> float:
        return self._quadratic_value(self.A, self.B, self.c, point)

    def component_value(self, point: Iterate, sample) -> float:
        samples = self._single_sample(sample)
        if self.is_finite_sum:
            i = int(samples[0])
            return self._quadratic_value(self.As[i], self.Bs[i], self.cs[i], point)
        noise = self.noise_std * samples[0]
        return (
            self.value(point)
            + float(noise[: self.d1] @ point.x)
            + float(noise[self.d1 :] @ point.y)
        )

    def exact_grad(self, point: Iterate) -> GradPair:
        self.check_point(point)
        if self.is_finite_sum:
            # Same summation as a full pass over the components, so the
            # full-gradient estimator and this diagnostic agree bit-for-bit
            return self._component_mean(point)
        return self._analytic_grad(point)

    def y_star(self, x: Vec) -> Vec:
        return (self.B.T @ x + self.c) / self.mu

    def phi_grad(self, x: Vec) -> Vec:
        return self.A @ x + self.B @ self.y_star(x)

    def phi_value(self, x: Vec) -> float:
        return self.value(Iterate(x, self.y_star(x)))

    @property
    def phi_star(self) -> Optional[float]:
        return self._phi_star

    def primal_hessian(self) -> np.ndarray:
        """Hessian of Phi: A + B B^T / mu."""
        return self.A + self.B @ self.B.T / self.mu

    def phi_stationary_point(self) -> Vec:
        """Solve grad Phi(x) = 0, which is linear for this family."""
        rhs = -self.B @ self.c / self.mu
        return linalg.solve(self.primal_hessian(), rhs, assume_a="sym")

    def block_hessian(self) -> np.ndarray:
        """The matrix [[A, B], [B^T, -mu I]]."""
        return _block_hessian(self.A, self.B, self.mu)

    # -- serialization --------------------------------------------------------

    def to_document(self) -> "ProblemDocument":
        components = None
        if self.is_finite_sum:
            components = ComponentDocument(
                A=self.As.tolist(), B=self.Bs.tolist(), c=self.cs.tolist()
            )
        return ProblemDocument(
            kind=self.kind,
            noise="finite-sum" if self.is_finite_sum else "gaussian",
            d1=self.d1,
            d2=self.d2,
            seed=self.seed,
            mu=self.mu,
            ell=self.profile.ell,
            sigma=self.profile.sigma,
            noise_std=self.noise_std,
            A=self.A.tolist(),
            B=self.B.tolist(),
            c=self.c.tolist(),
            components=components,
        )

    @classmethod
    def from_document(cls, doc: "ProblemDocument") -> "QuadraticSaddle":
        common = dict(ell=doc.ell, sigma=doc.sigma, seed=doc.seed, kind=doc.kind)
        if doc.components is not None:
            return cls.from_components(
                doc.components.A, doc.components.B, doc.components.c, doc.mu, **common
            )
        return cls(doc.A, doc.B, doc.c, doc.mu, noise_std=doc.noise_std, **common)

    # -- internals ------------------------------------------------------------

    def _analytic_grad(self, point: Iterate) -> GradPair:
        x, y = point.x, point.y
        return GradPair(self.A @ x + self.B @ y, self.B.T @ x - self.mu * y + self.c)

    def _component_mean(self, point: Iterate) -> GradPair:
        gx, gy = self.eval_samples(point, np.arange(self.n))
        return GradPair(gx.mean(axis=0), gy.mean(axis=0))

    def _quadratic_value(self, A, B, c, point: Iterate) -> float:
        x, y = point.x, point.y
        return float(0.5 * x @ A @ x + x @ B @ y - 0.5 * self.mu * y @ y + c @ y)

    def _declared_ell(self) -> float:
        if self.is_finite_sum:
            return _finite_sum_ell(self.As, self.Bs, self.mu)
        return _spectral_norm(self.block_hessian())

    def _declared_sigma(self, seed: Optional[int]) -> float:
        if not self.is_finite_sum:
            return self.noise_std * np.sqrt(self.d1 + self.d2)
        rng = spawn_stream(seed if seed is not None else 0, StreamPurpose.PROBLEM)
        linear = np.zeros((self.n, self.d1 + self.d2, self.d1 + self.d2))
        linear[:, : self.d1, : self.d1] = self.As - self.A
        linear[:, : self.d1, self.d1 :] = self.Bs - self.B
        linear[:, self.d1 :, : self.d1] = np.transpose(self.Bs - self.B, (0, 2, 1))
        offset = np.zeros((self.n, self.d1 + self.d2))
        offset[:, self.d1 :] = self.cs - self.c
        return _max_component_deviation(linear, offset, rng)

    def _compute_phi_star(self) -> Optional[float]:
        hessian = self.primal_hessian()
        linear = self.B @ self.c / self.mu
        constant = float(self.c @ self.c) / (2 * self.mu)
        try:
            factor = linalg.cho_factor(hessian)
        except linalg.LinAlgError:
            if np.allclose(hessian, 0.0, atol=1e-12) and np.allclose(linear, 0.0, atol=1e-12):
                return constant
            logger.debug("Primal Hessian is not positive definite; Phi* unknown")
            return None
        return constant - 0.5 * float(linear @ linalg.cho_solve(factor, linear))


class StronglyConvexQuadratic:
    """Strongly convex quadratic h(w) = 1/2 w^T H w - g^T w.

    Components (finite-sum mode) are H_i = a_i H and g_i = g + e_i with
    mean(a_i) = 1 and mean(e_i) = 0; Gaussian mode adds isotropic noise to the
    gradient. Implements the same interface the initializers consume.
    """

    def __init__(
        self,
        H,
        g,
        *,
        noise_std: float = 0.0,
        scales: Optional[np.ndarray] = None,
        offsets: Optional[np.ndarray] = None,
        seed: Optional[int] = None,
    ):
        self.H = np.array(H, dtype=np.float64, ndmin=2)
        self.g = as_vec(g, dim=self.H.shape[0], what="g")
        self.dim = self.g.shape[0]
        self.noise_std = float(noise_std)
        self.scales = None if scales is None else np.asarray(scales, dtype=np.float64)
        self.offsets = None if offsets is None else np.asarray(offsets, dtype=np.float64)
        self.n = None if self.scales is None else self.scales.shape[0]

        eigenvalues = linalg.eigvalsh(self.H)
        self.mu = float(eigenvalues[0])
        if not self.mu > 0:
            raise ParameterError("H must be positive definite")
        top = float(eigenvalues[-1])
        if self.n is None:
            self.ell = top
            self.sigma = self.noise_std * np.sqrt(self.dim)
        else:
            self.ell = top * float(np.sqrt(np.mean(self.scales**2)))
            rng = spawn_stream(seed if seed is not None else 0, StreamPurpose.PROBLEM)
            linear = (self.scales - 1.0)[:, None, None] * self.H[None, :, :]
            self.sigma = _max_component_deviation(linear, -self.offsets, rng)

    @property
    def kappa(self) -> float:
        return self.ell / self.mu

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.n is not None:
            return rng.integers(0, self.n, size=size)
        return rng.standard_normal((size, self.dim))

    def grad_samples(self, w: Vec, samples: np.ndarray) -> np.ndarray:
        hw = self.H @ w
        if self.n is not None:
            return self.scales[samples, None] * hw[None, :] - self.g - self.offsets[samples]
        return (hw - self.g)[None, :] + self.noise_std * samples

    def full_grad(self, w: Vec, counter: Optional[EvalCounter] = None) -> Vec:
        if self.n is None:
            raise CapabilityError("Full gradients need a finite-sum objective")
        if counter is not None:
            counter.add_batch(self.n)
        return self.exact_grad(w)

    def exact_grad(self, w: Vec) -> Vec:
        if self.n is not None:
            return self.grad_samples(w, np.arange(self.n)).mean(axis=0)
        return self.H @ w - self.g

    def minimizer(self) -> Vec:
        return linalg.solve(self.H, self.g, assume_a="pos")


class ComponentDocument(BaseModel):
    """Finite-sum component arrays, row-major."""

    A: list[list[list[float]]]
    B: list[list[list[float]]]
    c: list[list[float]]


class ProblemDocument(BaseModel):
    """Serialized QuadraticSaddle instance."""

    format: Literal["sreda.quadratic-saddle/1"] = "sreda.quadratic-saddle/1"
    kind: str = Field(description="Generator that produced the instance")
    noise: Literal["gaussian", "finite-sum"]
    d1: int
    d2: int
    seed: Optional[int] = None
    mu: float
    ell: float
    sigma: float
    noise_std: float = 0.0
    A: list[list[float]]
    B: list[list[float]]
    c: list[float]
    components: Optional[ComponentDocument] = None


def save_problem(problem: QuadraticSaddle, path: Path) -> Path:
    """Write ``problem`` as JSON so the experiment can be replayed."""
    path = Path(path)
    atomic_write_text(path, problem.to_document().model_dump_json(indent=2))
    logger.debug(f"Saved problem instance to {path}")
    return path


def load_problem(path: Path) -> QuadraticSaddle:
    """Rebuild a QuadraticSaddle written by :func:`save_problem`."""
    with open(path, "r", encoding="utf-8") as f:
        data: dict[str, Any] = json.load(f)
    return QuadraticSaddle.from_document(ProblemDocument.model_validate(data))


# -- generators -----------------------------------------------------------------


def make_quadratic_saddle(
    d1: int,
    d2: int,
    kappa_target: float,
    seed: int,
    sigma: float = 0.0,
    c_scale: float = 1.0,
) -> QuadraticSaddle:
    """Random QuadraticSaddle with condition number ``kappa_target`` and ell = 1.

    The base instance (mu = 1) is A(s) = s P0 - s^2 B0 B0^T, B(s) = s B0, whose
    primal Hessian s P0 stays positive definite, so Phi* is finite while A is
    indefinite once s is large enough. The scale s is found by root-finding on
    the block-Hessian norm, then everything is divided by that norm.

    Args:
        d1: Dimension of x
        d2: Dimension of y
        kappa_target: Desired ell / mu, at least 1
        seed: Problem seed
        sigma: Declared total gradient-noise standard deviation
        c_scale: Scale of the linear term in y

    Returns:
        A Gaussian-noise QuadraticSaddle
    """
    rng = spawn_stream(seed, StreamPurpose.PROBLEM)
    P0, B0, c0 = _base_blocks(rng, d1, d2, c_scale)

    def ell_of(s: float) -> float:
        A, B = _scaled_blocks(P0, B0, s)
        return _spectral_norm(_block_hessian(A, B, 1.0))

    s = _solve_scale(ell_of, kappa_target)
    A, B = _scaled_blocks(P0, B0, s)
    ell = ell_of(s)
    problem = QuadraticSaddle(
        A / ell,
        B / ell,
        c0 / ell,
        1.0 / ell,
        noise_std=sigma / np.sqrt(d1 + d2),
        seed=seed,
        kind="quadratic",
    )
    logger.debug(
        f"Generated quadratic saddle d1={d1} d2={d2} kappa={problem.profile.kappa:.6g} "
        f"(target {kappa_target}) sigma={problem.profile.sigma:.4g}"
    )
    return problem


def make_finite_sum_saddle(
    d1: int,
    d2: int,
    n: int,
    kappa_target: float,
    seed: int,
    spread: float = 0.5,
    c_scale: float = 1.0,
) -> QuadraticSaddle:
    """Finite-sum QuadraticSaddle with ``n`` components around a random base.

    Component perturbations are centered, so their average is exactly the base
    instance. The declared ell is sqrt(mean_i |M_i|^2) over the component block
    Hessians, which bounds both the average-Lipschitz constant and |mean M_i|.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = spawn_stream(seed, StreamPurpose.PROBLEM)
    P0, B0, c0 = _base_blocks(rng, d1, d2, c_scale)
    G = rng.standard_normal((n, d1, d1))
    EA = _centered((G + np.transpose(G, (0, 2, 1))) / (2.0 * np.sqrt(d1)))
    EB = _centered(rng.standard_normal((n, d1, d2)) / np.sqrt(d2))
    Ec = _centered(rng.standard_normal((n, d2)) / np.sqrt(d2))

    def components(s: float):
        A, B = _scaled_blocks(P0, B0, s)
        As = A[None] + s * spread * EA
        Bs = B[None] + s * spread * EB
        cs = c0[None] + c_scale * spread * Ec
        return As, Bs, cs

    def ell_of(s: float) -> float:
        As, Bs, _ = components(s)
        return _finite_sum_ell(As, Bs, 1.0)

    s = _solve_scale(ell_of, kappa_target)
    As, Bs, cs = components(s)
    ell = ell_of(s)
    problem = QuadraticSaddle.from_components(
        As / ell, Bs / ell, cs / ell, 1.0 / ell, seed=seed, kind="finite-sum"
    )
    logger.debug(
        f"Generated finite-sum saddle n={n} d1={d1} d2={d2} "
        f"kappa={problem.profile.kappa:.6g} sigma={problem.profile.sigma:.4g}"
    )
    return problem


def make_strongly_convex_quadratic(
    d: int,
    kappa_target: float,
    seed: int,
    sigma: float = 0.0,
    n: Optional[int] = None,
    spread: float = 0.3,
) -> StronglyConvexQuadratic:
    """Random strongly convex quadratic with ell / mu close to ``kappa_target``.

    For finite sums the declared ell includes the component spread, and the
    Hessian spectrum is compressed so that the declared ratio still hits the
    target whenever the target exceeds that spread.
    """
    if kappa_target < 1:
        raise ParameterError(f"kappa_target must be >= 1, got {kappa_target}")
    rng = spawn_stream(seed, StreamPurpose.PROBLEM)
    Q = _random_orthogonal(rng, d)
    g = rng.standard_normal(d) / np.sqrt(d)

    scales = offsets = None
    spread_factor = 1.0
    if n is not None:
        r = rng.uniform(-1.0, 1.0, size=n)
        scales = 1.0 + spread * (r - r.mean())
        offsets = _centered(rng.standard_normal((n, d)) / np.sqrt(d))
        spread_factor = float(np.sqrt(np.mean(scales**2)))

    spectrum_ratio = max(1.0, kappa_target / spread_factor)
    if spectrum_ratio == 1.0 and kappa_target < spread_factor:
        logger.warning(
            f"kappa_target {kappa_target} is below the component spread {spread_factor:.4f}; "
            "declared kappa will be larger"
        )
    eigenvalues = np.linspace(1.0 / spectrum_ratio, 1.0, d) if d > 1 else np.array([1.0 / spectrum_ratio])
    H = (Q * eigenvalues) @ Q.T
    H = 0.5 * (H + H.T)
    return StronglyConvexQuadratic(
        H,
        g,
        noise_std=sigma / np.sqrt(d),
        scales=scales,
        offsets=offsets,
        seed=seed,
    )


def delta_f_for(oracle: ProblemOracle, x0: Vec, epsilon: float) -> float:
    """Initial optimality gap used by the outer iteration count.

    Uses Phi(x0) in place of f(x0, y0); since f(x0, y0) <= Phi(x0) this only
    makes the gap larger.
    """
    phi_star = oracle.phi_star
    if not oracle.has_phi or phi_star is None:
        raise CapabilityError(
            "Delta_f needs Phi(x0) and a finite Phi*; supply delta_f in the config"
        )
    kappa = oracle.profile.kappa
    gap = oracle.phi_value(x0) + (epsilon / kappa) ** 2 / (2 * oracle.profile.mu) - phi_star
    return max(float(gap), np.finfo(float).tiny)


def initial_point(seed: int, dim: int, scale: float = 1.0) -> Vec:
    """Starting x0 shared by every algorithm run on the same problem seed."""
    rng = spawn_stream(seed, StreamPurpose.PROBLEM)
    # Skip past draws used by the generators so x0 is not correlated with them
    rng.bit_generator.advance(2**40)
    return scale * rng.standard_normal(dim)


# -- helpers --------------------------------------------------------------------


def _random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _base_blocks(rng: np.random.Generator, d1: int, d2: int, c_scale: float):
    Q = _random_orthogonal(rng, d1)
    P0 = (Q * rng.uniform(0.1, 1.0, size=d1)) @ Q.T
    P0 = 0.5 * (P0 + P0.T)
    U = _random_orthogonal(rng, d1)
    V = _random_orthogonal(rng, d2)
    rank = min(d1, d2)
    singular = rng.uniform(0.5, 1.5, size=rank)
    if 2 <= d1 <= d2:
        # Leave a direction where A stays positive so it is genuinely indefinite
        singular[np.argmin(singular)] = 0.0
    B0 = (U[:, :rank] * singular) @ V[:, :rank].T
    c0 = c_scale * rng.standard_normal(d2) / np.sqrt(d2)
    return P0, B0, c0


def _scaled_blocks(P0: np.ndarray, B0: np.ndarray, s: float):
    A = s * P0 - s**2 * (B0 @ B0.T)
    return 0.5 * (A + A.T), s * B0


def _block_hessian(A: np.ndarray, B: np.ndarray, mu: float) -> np.ndarray:
    d2 = B.shape[1]
    return np.block([[A, B], [B.T, -mu * np.eye(d2)]])


def _spectral_norm(M: np.ndarray) -> float:
    return float(linalg.norm(M, 2))


def _finite_sum_ell(As: np.ndarray, Bs: np.ndarray, mu: float) -> float:
    norms = [_spectral_norm(_block_hessian(A, B, mu)) for A, B in zip(As, Bs)]
    return float(np.sqrt(np.mean(np.square(norms))))


def _solve_scale(ell_of, kappa_target: float) -> float:
    """Find s >= 0 with ell_of(s) = kappa_target (ell_of(0) = 1 at mu = 1)."""
    if kappa_target < 1:
        raise ParameterError(f"kappa_target must be >= 1, got {kappa_target}")
    if kappa_target - 1.0 <= 1e-12:
        return 0.0
    high = 1.0
    for _ in range(64):
        if ell_of(high) >= kappa_target:
            break
        high *= 2.0
    else:
        raise ParameterError(f"Could not bracket kappa_target={kappa_target}")
    return optimize.brentq(lambda s: ell_of(s) - kappa_target, 0.0, high, xtol=1e-14)


def _centered(arr: np.ndarray) -> np.ndarray:
    return arr - arr.mean(axis=0, keepdims=True)


def _max_component_deviation(
    linear: np.ndarray,
    offset: np.ndarray,
    rng: np.random.Generator,
    points: int = SIGMA_PROBE_POINTS,
) -> float:
    """sqrt of max over random points z of mean_i |L_i z + o_i|^2."""
    n, dim, _ = linear.shape
    chunk = max(1, 2_000_000 // max(1, n * dim))
    worst = 0.0
    remaining = points
    while remaining > 0:
        size = min(chunk, remaining)
        Z = rng.standard_normal((size, dim))
        deviations = np.einsum("nab,pb->pna", linear, Z) + offset[None, :, :]
        variances = np.mean(np.sum(deviations**2, axis=2), axis=1)
        worst = max(worst, float(variances.max()))
        remaining -= size
    return float(np.sqrt(worst))
