"""Query scoring rules shared by the expansion sampler and the bounded baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .gpc import Prediction


@dataclass(frozen=True)
class AcquisitionParams:
    """Margin width and confidence factor of the feasibility constraint.

    ``epsilon`` is the accuracy margin on the latent function, ``eta`` the
    confidence multiplier (at least one). The acceptance threshold ``tau``
    on the margin probability is derived on demand and never stored, so the
    pair stays the single source of truth.
    """

    epsilon: float
    eta: float

    def __post_init__(self):
        epsilon = float(self.epsilon)
        eta = float(self.eta)
        if not math.isfinite(epsilon) or epsilon <= 0.0:
            raise ValueError(f"epsilon must be a positive finite real, got {self.epsilon!r}")
        if not math.isfinite(eta) or eta < 1.0:
            raise ValueError(f"eta must be finite and at least 1.0, got {self.eta!r}")
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "eta", eta)

    @property
    def tau(self) -> float:
        return float(ndtr(-self.eta * self.epsilon))


def epsilon_margin_probability(prediction: Prediction, params: AcquisitionParams) -> float:
    """Chance that the latent value sits at least ``epsilon`` beyond zero on
    the side opposite the posterior mean.

    Equal to Phi(-(|mean| + epsilon) / sqrt(variance)); never exceeds
    Phi(-epsilon) because the variance is capped at one.
    """
    return float(
        ndtr(-(abs(prediction.mean) + params.epsilon) / math.sqrt(prediction.variance))
    )


def margin_probability_many(
    means: np.ndarray, variances: np.ndarray, params: AcquisitionParams
) -> np.ndarray:
    """Vectorized sibling of :func:`epsilon_margin_probability`."""
    return ndtr(-(np.abs(means) + params.epsilon) / np.sqrt(variances))


def misclassification_loss(latent_mean: float, label) -> float:
    """Hinge penalty for calling sign(latent) against the given label."""
    return float(max(0.0, -float(label) * float(latent_mean)))


def aes_constraint_satisfied(prediction: Prediction, params: AcquisitionParams) -> bool:
    """Margin feasibility test eta * epsilon * sqrt(V) - |mean| >= epsilon.

    Algebraically the same acceptance region as ``epsilon_margin_probability
    >= tau``; this arithmetic form avoids evaluating the normal CDF in the
    inner sampling loop.
    """
    lhs = params.eta * params.epsilon * math.sqrt(prediction.variance) - abs(prediction.mean)
    return bool(lhs >= params.epsilon)


def constraint_mask_many(
    means: np.ndarray, variances: np.ndarray, params: AcquisitionParams
) -> np.ndarray:
    """Vectorized sibling of :func:`aes_constraint_satisfied`."""
    lhs = params.eta * params.epsilon * np.sqrt(variances) - np.abs(means)
    return lhs >= params.epsilon


def straddle_score(prediction: Prediction) -> float:
    """Bounded-region active-learning score 1.96 sqrt(V) - |mean|."""
    return float(1.96 * math.sqrt(prediction.variance) - abs(prediction.mean))


def straddle_score_many(means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    """Vectorized sibling of :func:`straddle_score`."""
    return 1.96 * np.sqrt(variances) - np.abs(means)
