"""Tests for the recursive gradient estimator."""

import numpy as np
import pytest

from sreda.core import EvalCounter, GradPair, Iterate
from sreda.errors import ContractViolation
from sreda.estimator import EstimatorState, init_full, init_restart, recursive_update


def _point(rng: np.random.Generator, d1: int, d2: int) -> Iterate:
    return Iterate(rng.standard_normal(d1), rng.standard_normal(d2))


class TestInitialization:
    """Tests for restart and full-gradient anchoring."""

    def test_restart_charges_s1(self, noisy_saddle):
        """A restart costs S1 in both conventions."""
        counter = EvalCounter()
        init_restart(noisy_saddle, Iterate(np.zeros(3), np.zeros(3)), 40, np.random.default_rng(0), counter)
        assert counter.snapshot() == (40, 40)

    def test_restart_rejects_empty_batch(self, noisy_saddle):
        """S1 must be at least 1."""
        with pytest.raises(ContractViolation):
            init_restart(noisy_saddle, Iterate(np.zeros(3), np.zeros(3)), 0, np.random.default_rng(0), EvalCounter())

    def test_full_anchor_is_exact(self, finite_saddle):
        """init_full reproduces the full gradient and charges n."""
        rng = np.random.default_rng(3)
        point = _point(rng, 3, 2)
        counter = EvalCounter()
        state = init_full(finite_saddle, point, counter)
        assert state.error_sq(finite_saddle.exact_grad(point)) == 0.0
        assert counter.count == finite_saddle.n

    def test_non_finite_state_rejected(self):
        """Estimates with NaN entries are a contract violation."""
        with pytest.raises(ContractViolation):
            EstimatorState(np.array([np.nan]), np.zeros(1), Iterate(np.zeros(1), np.zeros(1)), EvalCounter())


class TestRecursiveUpdate:
    """Tests for the common-random-numbers correction."""

    def test_noiseless_estimate_stays_exact(self, exact_saddle):
        """With sigma = 0 the estimate equals the exact gradient after every update."""
        rng = np.random.default_rng(1)
        counter = EvalCounter()
        point = _point(rng, 3, 3)
        state = init_restart(exact_saddle, point, 3, rng, counter)
        for _ in range(20):
            point = _point(rng, 3, 3)
            state = recursive_update(state, exact_saddle, point, 2, rng)
            assert state.error_sq(exact_saddle.exact_grad(point)) <= 1e-20

    def test_zero_displacement_is_a_no_op(self, noisy_saddle):
        """Moving to the anchor itself leaves (v, u) unchanged but still costs 2 S2."""
        rng = np.random.default_rng(2)
        point = _point(rng, 3, 3)
        counter = EvalCounter()
        state = EstimatorState(np.ones(3), -np.ones(3), point, counter)
        updated = recursive_update(state, noisy_saddle, point, 5, rng)
        np.testing.assert_array_equal(updated.v, state.v)
        np.testing.assert_array_equal(updated.u, state.u)
        assert counter.snapshot() == (10, 5)

    def test_finite_sum_zero_displacement(self, finite_saddle):
        """Component differences at one point vanish exactly."""
        rng = np.random.default_rng(6)
        point = _point(rng, 3, 2)
        state = EstimatorState(np.zeros(3), np.zeros(2), point, EvalCounter())
        updated = recursive_update(state, finite_saddle, point, 4, rng)
        assert not np.any(updated.v)
        assert not np.any(updated.u)

    def test_update_moves_anchor(self, noisy_saddle):
        """The new anchor is the point the estimate now refers to."""
        rng = np.random.default_rng(3)
        old, new = _point(rng, 3, 3), _point(rng, 3, 3)
        state = EstimatorState(np.zeros(3), np.zeros(3), old, EvalCounter())
        assert recursive_update(state, noisy_saddle, new, 1, rng).anchor is new

    def test_rejects_empty_batch(self, noisy_saddle):
        """S2 must be at least 1."""
        point = Iterate(np.zeros(3), np.zeros(3))
        state = EstimatorState(np.zeros(3), np.zeros(3), point, EvalCounter())
        with pytest.raises(ContractViolation):
            recursive_update(state, noisy_saddle, point, 0, np.random.default_rng(0))


class TestErrorSq:
    """Tests for EstimatorState.error_sq."""

    def test_error_against_known_pair(self):
        """error_sq sums both block errors."""
        state = EstimatorState(
            np.array([1.0, 0.0]), np.array([2.0]), Iterate(np.zeros(2), np.zeros(1)), EvalCounter()
        )
        exact = GradPair(np.array([0.0, 0.0]), np.array([0.0]))
        assert state.error_sq(exact) == 5.0
