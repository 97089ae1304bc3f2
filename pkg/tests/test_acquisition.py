"""Margin probability, constraint, loss, and straddle scoring."""
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.special import ndtr

from expansion_sampling import (
    AcquisitionParams,
    Prediction,
    aes_constraint_satisfied,
    epsilon_margin_probability,
    margin_probability_many,
    misclassification_loss,
    straddle_score,
    straddle_score_many,
)

finite_means = st.floats(-10.0, 10.0)
variances = st.floats(1e-6, 1.0)


class TestParams:
    def test_tau_definition(self):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        assert params.tau == pytest.approx(float(ndtr(-0.39)), abs=1e-15)

    def test_eta_one_tau_is_prior_ceiling(self):
        params = AcquisitionParams(epsilon=0.3, eta=1.0)
        assert params.tau == pytest.approx(float(ndtr(-0.3)), abs=1e-15)

    @pytest.mark.parametrize(
        "epsilon,eta", [(0.0, 1.3), (-0.1, 1.3), (0.3, 0.99), (math.nan, 1.3), (0.3, math.inf)]
    )
    def test_rejects_bad_parameters(self, epsilon, eta):
        with pytest.raises(ValueError):
            AcquisitionParams(epsilon=epsilon, eta=eta)


class TestMarginProbability:
    def test_prior_point(self):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        value = epsilon_margin_probability(Prediction(0.0, 1.0), params)
        assert value == pytest.approx(float(ndtr(-0.3)), abs=1e-15)
        assert value == pytest.approx(0.38209, abs=1e-5)

    def test_boundary_variance_hits_threshold(self):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        value = epsilon_margin_probability(Prediction(0.0, 1.0 / params.eta**2), params)
        assert value == pytest.approx(params.tau, abs=1e-15)

    def test_sign_of_mean_irrelevant(self):
        params = AcquisitionParams(epsilon=0.2, eta=1.2)
        plus = epsilon_margin_probability(Prediction(0.7, 0.5), params)
        minus = epsilon_margin_probability(Prediction(-0.7, 0.5), params)
        assert plus == minus

    @given(finite_means, variances)
    def test_never_exceeds_prior_ceiling(self, mean, variance):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        value = epsilon_margin_probability(Prediction(mean, variance), params)
        assert value <= float(ndtr(-0.3)) + 1e-15

    @given(finite_means, finite_means, variances)
    def test_decreasing_in_mean_magnitude(self, mean_a, mean_b, variance):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        low, high = sorted([abs(mean_a), abs(mean_b)])
        first = epsilon_margin_probability(Prediction(low, variance), params)
        second = epsilon_margin_probability(Prediction(high, variance), params)
        assert second <= first + 1e-15

    @given(finite_means, variances, variances)
    def test_increasing_in_variance(self, mean, var_a, var_b):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        low, high = sorted([var_a, var_b])
        assert epsilon_margin_probability(
            Prediction(mean, low), params
        ) <= epsilon_margin_probability(Prediction(mean, high), params) + 1e-15

    def test_vectorized_matches_scalar(self):
        params = AcquisitionParams(epsilon=0.25, eta=1.4)
        means = np.array([-1.0, 0.0, 0.5, 3.0])
        variances_arr = np.array([0.3, 1.0, 0.6, 0.9])
        batch = margin_probability_many(means, variances_arr, params)
        for i in range(means.size):
            single = epsilon_margin_probability(Prediction(means[i], variances_arr[i]), params)
            assert batch[i] == pytest.approx(single, abs=1e-15)


class TestConstraint:
    @given(finite_means, variances)
    def test_equivalent_to_threshold_on_probability(self, mean, variance):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        margin = params.eta * params.epsilon * math.sqrt(variance) - abs(mean)
        assume(abs(margin - params.epsilon) > 1e-12)
        by_margin = aes_constraint_satisfied(Prediction(mean, variance), params)
        by_probability = (
            epsilon_margin_probability(Prediction(mean, variance), params) >= params.tau
        )
        assert by_margin == by_probability

    def test_boundary_case_accepted(self):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        assert aes_constraint_satisfied(Prediction(0.0, 1.0 / params.eta**2), params)

    def test_confident_point_rejected(self):
        params = AcquisitionParams(epsilon=0.3, eta=1.3)
        assert not aes_constraint_satisfied(Prediction(2.0, 0.1), params)


class TestLoss:
    def test_correct_prediction_no_loss(self):
        assert misclassification_loss(0.8, 1) == 0.0
        assert misclassification_loss(-0.8, -1) == 0.0

    def test_wrong_prediction_scales_with_confidence(self):
        assert misclassification_loss(0.8, -1) == pytest.approx(0.8)
        assert misclassification_loss(-1.3, 1) == pytest.approx(1.3)

    def test_zero_mean_no_loss(self):
        assert misclassification_loss(0.0, 1) == 0.0

    @given(finite_means, st.sampled_from([-1, 1]))
    def test_nonnegative(self, mean, label):
        assert misclassification_loss(mean, label) >= 0.0


class TestStraddle:
    def test_example(self):
        assert straddle_score(Prediction(0.5, 0.25)) == pytest.approx(0.48)

    def test_maximal_on_uncertain_boundary(self):
        assert straddle_score(Prediction(0.0, 1.0)) == pytest.approx(1.96)

    def test_vectorized_matches_scalar(self):
        means = np.array([0.5, -0.2, 0.0])
        variances_arr = np.array([0.25, 0.5, 1.0])
        batch = straddle_score_many(means, variances_arr)
        for i in range(means.size):
            assert batch[i] == pytest.approx(
                straddle_score(Prediction(means[i], variances_arr[i])), abs=1e-15
            )

    @given(finite_means, variances)
    def test_matches_constraint_margin_at_special_eta(self, mean, variance):
        # With eta * epsilon = 1.96 the constraint margin and the straddle
        # acquisition agree by construction.
        params = AcquisitionParams(epsilon=1.0, eta=1.96)
        margin = params.eta * params.epsilon * math.sqrt(variance) - abs(mean)
        assert straddle_score(Prediction(mean, variance)) == pytest.approx(margin, abs=1e-12)
