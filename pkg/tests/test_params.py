"""Tests for SREDA and baseline parameter derivation."""

import pytest

from sreda.errors import ContractViolation, ParameterError
from sreda.problems import SmoothnessProfile
from sreda.solvers.params import (
    BOUND_CONSTANT,
    apply_overrides,
    derive_baseline_params,
    derive_params,
    derive_params_finite,
    predicted_evals,
    step_size,
)

REFERENCE = SmoothnessProfile(ell=1.0, mu=0.1, sigma=1.0)


class TestDeriveParams:
    """Tests for the stochastic SREDA parameter rules."""

    def test_reference_values(self):
        """eps = 0.1, kappa = 10, sigma = ell = Delta_f = 1."""
        p = derive_params(0.1, REFERENCE, 1.0)
        assert p.q == 10
        assert p.S1 == 240_000
        assert p.S2 == 4211
        assert p.m == 279
        assert p.K == 11_112
        assert p.eta_num == pytest.approx(0.002)
        assert p.eta_cap == pytest.approx(0.01)
        assert p.zeta == pytest.approx(1e-4)
        assert p.lam == pytest.approx(2.0 / 7.0)
        assert not p.full_restart

    def test_kappa_one(self):
        """kappa = 1 gives m = 27."""
        p = derive_params(0.1, SmoothnessProfile(ell=1.0, mu=1.0, sigma=1.0), 1.0)
        assert p.m == 27

    def test_noiseless_batch_floor(self):
        """sigma = 0 still draws one sample per restart."""
        p = derive_params(0.1, SmoothnessProfile(ell=1.0, mu=0.1, sigma=0.0), 1.0)
        assert p.S1 == 1

    def test_overflow_is_rejected(self):
        """Tiny epsilon overflows a 64-bit K."""
        with pytest.raises(ParameterError, match="overflows"):
            derive_params(1e-12, REFERENCE, 1.0)

    @pytest.mark.parametrize("epsilon, delta_f", [(0.0, 1.0), (-0.1, 1.0), (0.1, 0.0)])
    def test_non_positive_targets(self, epsilon, delta_f):
        """epsilon and Delta_f must be positive."""
        with pytest.raises(ParameterError):
            derive_params(epsilon, REFERENCE, delta_f)

    def test_bound(self):
        """The certified bound is 1073/108 epsilon."""
        p = derive_params(0.1, REFERENCE, 1.0)
        assert p.predicted_bound == pytest.approx(BOUND_CONSTANT * 0.1)
        assert BOUND_CONSTANT == pytest.approx(9.935, abs=1e-3)


class TestDeriveParamsFinite:
    """Tests for the finite-sum branches."""

    def test_large_n_branch(self):
        """n = 10^4 and kappa = 10 give q = 10, S2 = 4211."""
        p = derive_params_finite(0.1, REFERENCE, 1.0, 10_000)
        assert p.q == 10
        assert p.S2 == 4211
        assert p.S1 == 10_000
        assert p.full_restart

    def test_small_n_branch(self):
        """n < kappa^2 gives q = S2 = 1."""
        p = derive_params_finite(0.1, REFERENCE, 1.0, 50)
        assert (p.q, p.S2) == (1, 1)

    def test_tie_takes_large_branch(self):
        """n = kappa^2 takes the sqrt(n)/kappa branch."""
        p = derive_params_finite(0.1, REFERENCE, 1.0, 100)
        assert p.q == 1
        assert p.S2 == 422

    def test_shared_fields_match_stochastic(self):
        """K, m and the step constants do not depend on n."""
        base = derive_params(0.1, REFERENCE, 1.0)
        p = derive_params_finite(0.1, REFERENCE, 1.0, 50)
        assert (p.K, p.m, p.eta_num, p.lam) == (base.K, base.m, base.eta_num, base.lam)

    def test_n_must_be_positive(self):
        """n = 0 is invalid."""
        with pytest.raises(ParameterError):
            derive_params_finite(0.1, REFERENCE, 1.0, 0)


class TestStepSize:
    """Tests for the normalized step."""

    @pytest.mark.parametrize("v_norm, expected", [(0.0, 0.01), (0.1, 0.01), (1.0, 0.002), (4.0, 0.0005)])
    def test_reference_steps(self, v_norm, expected):
        """eta = min(eta_num/|v|, eta_cap) at the reference parameters."""
        p = derive_params(0.1, REFERENCE, 1.0)
        assert step_size(p, v_norm) == pytest.approx(expected)

    def test_negative_norm(self):
        """A negative norm is a contract violation."""
        with pytest.raises(ContractViolation):
            step_size(derive_params(0.1, REFERENCE, 1.0), -1.0)

    def test_step_bound(self):
        """eta |v| never exceeds step_bound."""
        p = derive_params(0.1, REFERENCE, 1.0)
        for v_norm in (1e-6, 0.05, 0.2, 1.0, 100.0):
            assert step_size(p, v_norm) * v_norm <= p.step_bound * (1 + 1e-12)


class TestOverrides:
    """Tests for apply_overrides."""

    def test_known_field(self):
        """Overrides replace fields and keep the rest."""
        p = apply_overrides(derive_params(0.1, REFERENCE, 1.0), {"q": 1, "S2": 3})
        assert (p.q, p.S2, p.S1) == (1, 3, 240_000)

    def test_integral_float_is_accepted(self):
        """2.0 is a valid integer override."""
        assert apply_overrides(derive_params(0.1, REFERENCE, 1.0), {"m": 2.0}).m == 2

    def test_int_is_accepted_for_float(self):
        """Integers widen to float fields."""
        assert apply_overrides(derive_params(0.1, REFERENCE, 1.0), {"lam": 1}).lam == 1.0

    @pytest.mark.parametrize(
        "overrides",
        [{"bogus": 1}, {"q": 1.5}, {"q": "10"}, {"q": True}, {"S1": 0}, {"lam": -1.0}],
    )
    def test_invalid_overrides(self, overrides):
        """Unknown names, wrong types and invalid values raise ParameterError."""
        with pytest.raises(ParameterError):
            apply_overrides(derive_params(0.1, REFERENCE, 1.0), overrides)

    def test_empty_overrides_return_same(self):
        """No overrides is the identity."""
        p = derive_params(0.1, REFERENCE, 1.0)
        assert apply_overrides(p, {}) is p


class TestPredictedEvals:
    """Tests for the predicted oracle-call tally."""

    def test_reference_tally(self):
        """Restarts are ceil(K/q) and corrections K S2 (m + 2)."""
        p = derive_params(0.1, REFERENCE, 1.0)
        predicted = predicted_evals(p, init_evals=500)
        corrections = 11_112 * 4211 * 281
        assert predicted.restarts == 1112
        assert predicted.paper == 1112 * 240_000 + corrections
        assert predicted.physical == 1112 * 240_000 + 2 * corrections
        assert predicted.total_physical == predicted.physical + 500

    def test_no_init_means_no_total(self):
        """Without the initializer cost the total is unknown."""
        assert predicted_evals(derive_params(0.1, REFERENCE, 1.0)).total_physical is None


class TestBaselineParams:
    """Tests for the SGDA / SGDmax defaults."""

    def test_sgda(self):
        """SGDA uses eta = 1/(kappa^2 ell) and S = ceil(kappa/eps^2)."""
        bp = derive_baseline_params("sgda", 0.1, REFERENCE, 1.0)
        assert bp.eta == pytest.approx(0.01)
        assert bp.lam == pytest.approx(1.0)
        assert bp.S == 1000
        assert bp.K == 10_000

    def test_sgdmax_inner_cap(self, captured_logs):
        """inner_cap bounds the number of inner batches."""
        bp = derive_baseline_params("sgdmax", 0.1, REFERENCE, 1.0, inner_cap=3)
        assert bp.inner_steps == 3
        assert bp.zeta == pytest.approx(1e-4)
        assert "capped" in captured_logs.getvalue()

    def test_sgdmax_uncapped(self):
        """Inner batches are ceil(kappa^2 eps^-2 / S)."""
        bp = derive_baseline_params("sgdmax", 0.1, REFERENCE, 1.0)
        assert bp.inner_steps == 10
        assert bp.K == 1000

    def test_unknown_algorithm(self):
        """Only sgda and sgdmax have baseline parameters."""
        with pytest.raises(ParameterError):
            derive_baseline_params("adam", 0.1, REFERENCE, 1.0)
