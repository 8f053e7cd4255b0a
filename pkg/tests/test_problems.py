"""Tests for problem oracles, generators and persistence."""

import numpy as np
import pytest

from sreda.core import EvalCounter, Iterate, StreamPurpose, spawn_stream
from sreda.errors import CapabilityError, ContractViolation, InputError, ParameterError
from sreda.problems import (
    QuadraticSaddle,
    SmoothnessProfile,
    StronglyConvexQuadratic,
    delta_f_for,
    initial_point,
    load_problem,
    make_finite_sum_saddle,
    make_quadratic_saddle,
    make_strongly_convex_quadratic,
    save_problem,
)


def _power_iteration(M: np.ndarray, iterations: int = 500) -> float:
    v = np.ones(M.shape[0]) / np.sqrt(M.shape[0])
    for _ in range(iterations):
        w = M.T @ (M @ v)
        v = w / np.linalg.norm(w)
    return float(np.sqrt(np.linalg.norm(M.T @ (M @ v))))


class TestSmoothnessProfile:
    """Tests for SmoothnessProfile validation."""

    def test_kappa(self):
        """kappa = ell / mu."""
        assert SmoothnessProfile(ell=2.0, mu=0.5, sigma=0.0).kappa == 4.0

    def test_rejects_mu_above_ell(self):
        """mu > ell is not a valid profile."""
        with pytest.raises(ParameterError):
            SmoothnessProfile(ell=1.0, mu=2.0, sigma=0.0)

    def test_rejects_negative_sigma(self):
        """sigma must be non-negative."""
        with pytest.raises(ParameterError):
            SmoothnessProfile(ell=1.0, mu=1.0, sigma=-0.1)


class TestConstruction:
    """Tests that constructors derive ell and sigma from the instance itself."""

    def test_gaussian_constants_from_matrices(self):
        """Without declared constants, ell is the block norm and sigma the total std."""
        problem = QuadraticSaddle(np.diag([0.5, -0.5]), np.zeros((2, 2)), np.zeros(2), 1.0, noise_std=0.5)
        assert (problem.d1, problem.d2, problem.n) == (2, 2, None)
        assert problem.profile.ell == pytest.approx(1.0)
        assert problem.profile.sigma == pytest.approx(1.0)

    def test_components_constants_from_arrays(self):
        """A component list sets n, the mean instance and a positive sigma."""
        problem = QuadraticSaddle.from_components(
            [[[1.0]], [[-1.0]]], [[[0.0]], [[0.0]]], [[1.0], [-1.0]], 1.0
        )
        assert problem.is_finite_sum
        assert problem.n == 2
        assert problem.A[0, 0] == pytest.approx(0.0)
        assert problem.profile.ell == pytest.approx(1.0)
        assert problem.profile.sigma > 0

    def test_small_generators_build(self):
        """Both saddle generators build tiny instances from scratch."""
        gaussian = make_quadratic_saddle(2, 2, 1.0, seed=0)
        finite = make_finite_sum_saddle(2, 2, 5, 2.0, seed=0)
        assert gaussian.profile.kappa == pytest.approx(1.0)
        assert finite.n == 5
        assert finite.profile.kappa == pytest.approx(2.0, rel=1e-2)

    def test_load_rebuilds_generated_instance(self, tmp_path):
        """A saved finite-sum instance loads back with the same constants."""
        problem = make_finite_sum_saddle(2, 2, 5, 2.0, seed=0)
        loaded = load_problem(save_problem(problem, tmp_path / "problem.json"))
        assert loaded.n == 5
        assert loaded.profile.ell == pytest.approx(problem.profile.ell)


class TestQuadraticSaddleGradients:
    """Tests for the gradient-pair oracle."""

    def test_exact_gradient_formula(self, exact_saddle):
        """gx = Ax + By, gy = B^T x - mu y + c."""
        rng = np.random.default_rng(0)
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        grad = exact_saddle.exact_grad(Iterate(x, y))
        p = exact_saddle
        np.testing.assert_allclose(grad.gx, p.A @ x + p.B @ y)
        np.testing.assert_allclose(grad.gy, p.B.T @ x - p.mu * y + p.c)

    def test_zero_noise_batch_is_exact(self, exact_saddle):
        """With sigma = 0 every batch returns the exact gradient."""
        point = Iterate(np.ones(3), np.zeros(3))
        rng = spawn_stream(1, StreamPurpose.BASELINE)
        batch = exact_saddle.stoch_grad(point, 5, rng)
        exact = exact_saddle.exact_grad(point)
        np.testing.assert_allclose(batch.gx, exact.gx, atol=1e-14)
        np.testing.assert_allclose(batch.gy, exact.gy, atol=1e-14)

    def test_stationary_inner_point(self, scalar_saddle):
        """A = B = c = 0 at y = 0 gives gy = 0."""
        rng = spawn_stream(1, StreamPurpose.BASELINE)
        grad = scalar_saddle.stoch_grad(Iterate(np.array([2.0]), np.zeros(1)), 3, rng)
        assert grad.gy[0] == 0.0

    def test_stoch_grad_counts_batch(self, noisy_saddle):
        """stoch_grad charges batch_size evaluations."""
        counter = EvalCounter()
        noisy_saddle.stoch_grad(Iterate(np.zeros(3), np.zeros(3)), 11, np.random.default_rng(0), counter)
        assert counter.snapshot() == (11, 11)

    def test_stoch_grad_rejects_empty_batch(self, noisy_saddle):
        """batch_size must be at least 1."""
        with pytest.raises(ContractViolation):
            noisy_saddle.stoch_grad(Iterate(np.zeros(3), np.zeros(3)), 0, np.random.default_rng(0))

    def test_dimension_mismatch(self, noisy_saddle):
        """Points of the wrong shape are rejected."""
        with pytest.raises(ContractViolation):
            noisy_saddle.exact_grad(Iterate(np.zeros(2), np.zeros(3)))

    def test_monte_carlo_mean_is_unbiased(self, noisy_saddle):
        """Mean of 10^4 batch-1 draws lies within 4 sigma / sqrt(10^4) of the exact gradient."""
        point = Iterate(np.ones(3), -np.ones(3))
        rng = spawn_stream(2, StreamPurpose.BASELINE)
        samples = noisy_saddle.draw_samples(rng, 10_000)
        gx, gy = noisy_saddle.eval_samples(point, samples)
        exact = noisy_saddle.exact_grad(point)
        tol = 4 * noisy_saddle.profile.sigma / np.sqrt(10_000)
        assert np.all(np.abs(gx.mean(axis=0) - exact.gx) <= tol)
        assert np.all(np.abs(gy.mean(axis=0) - exact.gy) <= tol)

    def test_paired_component_shares_sample(self, noisy_saddle):
        """Paired evaluation at the same point gives identical pairs and costs 2."""
        rng = np.random.default_rng(4)
        point = Iterate(rng.standard_normal(3), rng.standard_normal(3))
        counter = EvalCounter()
        first, second = noisy_saddle.component_grad(
            point, noisy_saddle.draw_samples(rng, 1), paired_point=point, counter=counter
        )
        np.testing.assert_array_equal(first.gx, second.gx)
        np.testing.assert_array_equal(first.gy, second.gy)
        assert counter.count == 2

    def test_paired_difference_cancels_gaussian_noise(self, noisy_saddle):
        """With common random numbers the additive noise drops out of the difference."""
        rng = np.random.default_rng(5)
        old = Iterate(rng.standard_normal(3), rng.standard_normal(3))
        new = Iterate(rng.standard_normal(3), rng.standard_normal(3))
        diff = noisy_saddle.paired_difference(new, old, 4, rng)
        expected = noisy_saddle.exact_grad(new) - noisy_saddle.exact_grad(old)
        np.testing.assert_allclose(diff.gx, expected.gx, atol=1e-12)
        np.testing.assert_allclose(diff.gy, expected.gy, atol=1e-12)


class TestFiniteSum:
    """Tests for finite-sum problems."""

    def test_component_mean_equals_full_grad(self, finite_saddle):
        """The average of all component gradients is the full gradient."""
        rng = np.random.default_rng(1)
        point = Iterate(rng.standard_normal(3), rng.standard_normal(2))
        grads = [finite_saddle.component_grad(point, i) for i in range(finite_saddle.n)]
        full = finite_saddle.full_grad(point)
        np.testing.assert_allclose(np.mean([g.gx for g in grads], axis=0), full.gx, atol=1e-12)
        np.testing.assert_allclose(np.mean([g.gy for g in grads], axis=0), full.gy, atol=1e-12)

    def test_full_grad_charges_n(self, finite_saddle):
        """A full pass costs n evaluations."""
        counter = EvalCounter()
        finite_saddle.full_grad(Iterate(np.zeros(3), np.zeros(2)), counter)
        assert counter.count == finite_saddle.n

    def test_index_out_of_range(self, finite_saddle):
        """Component indices are 0-based and bounded by n."""
        point = Iterate(np.zeros(3), np.zeros(2))
        with pytest.raises(InputError):
            finite_saddle.component_grad(point, finite_saddle.n)
        with pytest.raises(InputError):
            finite_saddle.component_grad(point, -1)

    def test_single_component_equals_full(self):
        """With n = 1 the lone component is the full gradient."""
        problem = make_finite_sum_saddle(2, 2, 1, kappa_target=2.0, seed=3)
        point = Iterate(np.array([1.0, -1.0]), np.array([0.5, 0.5]))
        component = problem.component_grad(point, 0)
        full = problem.full_grad(point)
        np.testing.assert_allclose(component.gx, full.gx, atol=1e-15)
        np.testing.assert_allclose(component.gy, full.gy, atol=1e-15)

    def test_components_average_to_base(self, finite_saddle):
        """Component matrices average to (A, B, c)."""
        np.testing.assert_allclose(finite_saddle.As.mean(axis=0), finite_saddle.A, atol=1e-12)
        np.testing.assert_allclose(finite_saddle.Bs.mean(axis=0), finite_saddle.B, atol=1e-12)
        np.testing.assert_allclose(finite_saddle.cs.mean(axis=0), finite_saddle.c, atol=1e-12)

    def test_declared_ell_dominates_mean_hessian(self, finite_saddle):
        """sqrt(mean |M_i|^2) bounds the norm of the averaged block Hessian."""
        assert np.linalg.norm(finite_saddle.block_hessian(), 2) <= finite_saddle.profile.ell * (1 + 1e-12)


class TestClosedForms:
    """Tests for y*, Phi and grad Phi."""

    def test_decoupled_maximizer_is_zero(self):
        """B = 0 and c = 0 give y*(x) = 0."""
        problem = QuadraticSaddle(np.eye(2), np.zeros((2, 2)), np.zeros(2), 1.0)
        np.testing.assert_array_equal(problem.y_star(np.array([3.0, -1.0])), np.zeros(2))

    def test_documented_phi_gradient(self):
        """A = diag(1, -1), B = I, c = 0, mu = 1, x = (1, 1) gives grad Phi = (2, 0)."""
        problem = QuadraticSaddle(np.diag([1.0, -1.0]), np.eye(2), np.zeros(2), 1.0)
        np.testing.assert_allclose(problem.phi_grad(np.array([1.0, 1.0])), [2.0, 0.0])

    def test_phi_gradient_matches_finite_differences(self, noisy_saddle):
        """Central differences of Phi agree with phi_grad."""
        x = np.array([0.3, -0.7, 1.1])
        h = 1e-5
        fd = np.array(
            [
                (noisy_saddle.phi_value(x + h * e) - noisy_saddle.phi_value(x - h * e)) / (2 * h)
                for e in np.eye(3)
            ]
        )
        np.testing.assert_allclose(fd, noisy_saddle.phi_grad(x), rtol=1e-6, atol=1e-8)

    def test_y_star_zeroes_gy(self, noisy_saddle):
        """grad_y f(x, y*(x)) = 0 for random x."""
        rng = np.random.default_rng(8)
        for _ in range(100):
            x = rng.standard_normal(3)
            gy = noisy_saddle.exact_grad(Iterate(x, noisy_saddle.y_star(x))).gy
            assert np.max(np.abs(gy)) <= 1e-10

    def test_phi_star_at_stationary_point(self, noisy_saddle):
        """Phi* is the value at the solution of grad Phi = 0."""
        x_star = noisy_saddle.phi_stationary_point()
        assert np.linalg.norm(noisy_saddle.phi_grad(x_star)) <= 1e-8
        assert noisy_saddle.phi_value(x_star) == pytest.approx(noisy_saddle.phi_star, abs=1e-10)


class TestGenerators:
    """Tests for the random instance generators."""

    def test_kappa_target_is_hit(self):
        """The declared kappa is within 1% of the target."""
        problem = make_quadratic_saddle(5, 5, kappa_target=5.0, seed=0)
        assert problem.profile.kappa == pytest.approx(5.0, rel=1e-2)
        assert problem.profile.ell == pytest.approx(1.0)

    def test_kappa_one_means_mu_equals_ell(self):
        """kappa_target = 1 gives mu = ell."""
        problem = make_quadratic_saddle(3, 3, kappa_target=1.0, seed=0)
        assert problem.mu == pytest.approx(problem.profile.ell)

    def test_declared_ell_bounds_power_iteration(self):
        """A power-iteration estimate of |block Hessian| never exceeds the declared ell."""
        problem = make_quadratic_saddle(4, 6, kappa_target=8.0, seed=2)
        estimate = _power_iteration(problem.block_hessian())
        assert estimate <= problem.profile.ell * (1 + 1e-8)

    def test_same_seed_same_instance(self):
        """Generation is deterministic in the seed."""
        a = make_quadratic_saddle(3, 4, kappa_target=3.0, seed=9, sigma=0.2)
        b = make_quadratic_saddle(3, 4, kappa_target=3.0, seed=9, sigma=0.2)
        np.testing.assert_array_equal(a.A, b.A)
        np.testing.assert_array_equal(a.B, b.B)
        np.testing.assert_array_equal(a.c, b.c)

    def test_a_is_indefinite_for_large_kappa(self):
        """The x-block is genuinely nonconvex while Phi stays convex."""
        problem = make_quadratic_saddle(4, 4, kappa_target=50.0, seed=1)
        assert np.linalg.eigvalsh(problem.A).min() < 0
        assert np.linalg.eigvalsh(problem.primal_hessian()).min() > 0

    def test_gaussian_sigma_is_total_std(self):
        """Declared sigma equals per-coordinate std times sqrt(d1 + d2)."""
        problem = make_quadratic_saddle(2, 3, kappa_target=2.0, seed=0, sigma=0.7)
        assert problem.noise_std * np.sqrt(5) == pytest.approx(0.7)
        assert problem.profile.sigma == pytest.approx(0.7)

    def test_kappa_below_one_rejected(self):
        """kappa_target < 1 is invalid."""
        with pytest.raises(ParameterError):
            make_quadratic_saddle(2, 2, kappa_target=0.5, seed=0)

    def test_strongly_convex_quadratic(self):
        """The convex test objective has the requested conditioning and minimizer."""
        objective = make_strongly_convex_quadratic(5, kappa_target=4.0, seed=0)
        assert isinstance(objective, StronglyConvexQuadratic)
        assert objective.kappa == pytest.approx(4.0, rel=1e-9)
        assert np.linalg.norm(objective.exact_grad(objective.minimizer())) <= 1e-10

    def test_strongly_convex_gaussian_has_no_full_grad(self):
        """Full gradients need a finite sum."""
        objective = make_strongly_convex_quadratic(3, kappa_target=2.0, seed=0, sigma=0.1)
        with pytest.raises(CapabilityError):
            objective.full_grad(np.zeros(3))


class TestDeltaF:
    """Tests for the initial-gap helper."""

    def test_delta_f_is_positive_gap(self, noisy_saddle):
        """Delta_f = Phi(x0) + (eps/kappa)^2 / (2 mu) - Phi*."""
        x0 = initial_point(7, 3)
        eps = 0.2
        kappa = noisy_saddle.profile.kappa
        expected = (
            noisy_saddle.phi_value(x0) + (eps / kappa) ** 2 / (2 * noisy_saddle.mu) - noisy_saddle.phi_star
        )
        assert delta_f_for(noisy_saddle, x0, eps) == pytest.approx(expected)
        assert expected > 0

    def test_initial_point_is_deterministic(self):
        """x0 depends only on the problem seed."""
        np.testing.assert_array_equal(initial_point(4, 3), initial_point(4, 3))
        assert not np.array_equal(initial_point(4, 3), initial_point(5, 3))


class TestPersistence:
    """Tests for problem.json round trips."""

    def test_gaussian_round_trip(self, noisy_saddle, tmp_path):
        """A saved instance reloads with the same matrices and profile."""
        path = save_problem(noisy_saddle, tmp_path / "problem.json")
        loaded = load_problem(path)
        np.testing.assert_array_equal(loaded.A, noisy_saddle.A)
        assert loaded.profile == noisy_saddle.profile
        assert loaded.noise_std == noisy_saddle.noise_std
        assert not loaded.is_finite_sum

    def test_finite_sum_round_trip(self, finite_saddle, tmp_path):
        """Components survive serialization."""
        loaded = load_problem(save_problem(finite_saddle, tmp_path / "problem.json"))
        assert loaded.n == finite_saddle.n
        np.testing.assert_array_equal(loaded.Bs, finite_saddle.Bs)
        assert loaded.profile.sigma == finite_saddle.profile.sigma
