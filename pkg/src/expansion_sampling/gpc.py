"""Gaussian process binary classification via the Laplace approximation.

The latent function carries a zero-mean GP prior with an isotropic Gaussian
kernel and unit signal variance, and labels in {-1, +1} follow a probit
likelihood p(y | f) = Phi(y f). The posterior mode is located by Newton
iteration in the numerically stable parameterization that factorizes
B = I + W^{1/2} K W^{1/2}, after which predictive moments reduce to one
triangular solve per query point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.spatial.distance import cdist
from scipy.special import log_ndtr

_JITTER = 1e-10
_W_FLOOR = 1e-12
_MAX_NEWTON = 100
_OBJECTIVE_TOL = 1e-9
_STEP_TOL = 1e-8
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class FitConvergenceError(RuntimeError):
    """Newton mode search did not settle within the iteration cap."""

    def __init__(self, residual_norm: float, iterations: int):
        self.residual_norm = float(residual_norm)
        self.iterations = int(iterations)
        super().__init__(
            f"mode search did not converge in {iterations} iterations "
            f"(stationarity residual {self.residual_norm:.3e})"
        )


@dataclass(frozen=True)
class KernelConfig:
    """Isotropic Gaussian covariance k(a, b) = exp(-||a - b||^2 / (2 l^2)).

    Parameters
    ----------
    length_scale:
        Positive correlation length l. Signal variance is fixed at one,
        so k(x, x) = 1 for every input.
    """

    length_scale: float

    def __post_init__(self):
        value = float(self.length_scale)
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(
                f"length_scale must be a positive finite real, got {self.length_scale!r}"
            )
        object.__setattr__(self, "length_scale", value)


@dataclass(frozen=True)
class LabeledSet:
    """Labeled training samples.

    Points form a (t, d) array with labels in {-1, +1}. Sample locations
    must be pairwise distinct; a duplicate would make the kernel matrix
    singular up to jitter and signals a caller bug.
    """

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float, ndmin=2)
        raw_labels = np.asarray(self.labels).ravel()
        if points.ndim != 2 or points.shape[0] == 0 or points.shape[1] == 0:
            raise ValueError("points must be a nonempty (t, d) array")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        if raw_labels.shape[0] != points.shape[0]:
            raise ValueError(
                f"got {points.shape[0]} points but {raw_labels.shape[0]} labels"
            )
        labels = raw_labels.astype(int, copy=True)
        if not np.array_equal(labels, raw_labels) or not np.all(np.abs(labels) == 1):
            raise ValueError("labels must be -1 or +1")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise ValueError("duplicate sample locations are not allowed")
        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def append(self, point, label) -> "LabeledSet":
        """New set with one extra sample."""
        point = np.asarray(point, dtype=float).reshape(1, -1)
        return LabeledSet(
            np.vstack([self.points, point]), np.append(self.labels, int(label))
        )


@dataclass(frozen=True)
class Prediction:
    """Latent posterior moments at a single input."""

    mean: float
    variance: float


@dataclass(frozen=True)
class GpcFit:
    """Converged Laplace approximation for one training set.

    Holds the posterior mode together with the factorization needed for
    O(t^2) predictive moments: the likelihood curvature diagonal W, its
    square root, and the lower Cholesky factor of B = I + W^{1/2} K W^{1/2}.
    Also caches two fit-level scalars used by the sampling radii:

    - ``mu``: total likelihood-gradient mass, sign(y)^T grad log p(y | f),
      strictly positive at the mode.
    - ``nu``: ones^T (K + W^{-1})^{-1} ones, non-negative.
    """

    training: LabeledSet
    kernel: KernelConfig
    mode: np.ndarray
    likelihood_gradient: np.ndarray
    w_diag: np.ndarray
    sqrt_w: np.ndarray
    chol_b: np.ndarray
    mu: float
    nu: float

    def quad_form(self, v) -> float:
        """v^T (K + W^{-1})^{-1} v through the stored factorization."""
        u = solve_triangular(
            self.chol_b, self.sqrt_w * np.asarray(v, dtype=float),
            lower=True, check_finite=False,
        )
        return float(u @ u)

    def solve(self, v) -> np.ndarray:
        """(K + W^{-1})^{-1} v."""
        u = solve_triangular(
            self.chol_b, self.sqrt_w * np.asarray(v, dtype=float),
            lower=True, check_finite=False,
        )
        u = solve_triangular(self.chol_b, u, lower=True, trans=1, check_finite=False)
        return self.sqrt_w * u


def kernel_eval(a, b, kernel: KernelConfig) -> float:
    """Covariance between two points."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"expected two equal-length vectors, got {a.shape} and {b.shape}")
    diff = a - b
    sq = float(diff @ diff)
    return float(math.exp(-0.5 * sq / (kernel.length_scale ** 2)))


def _kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: KernelConfig) -> np.ndarray:
    sq = cdist(a, b, "sqeuclidean")
    return np.exp(sq * (-0.5 / kernel.length_scale ** 2))


def _probit_terms(f: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and curvature diagonal of log Phi(y f), elementwise.

    Computed through log-space ratios so large |f| against the label sign
    stays finite. The curvature is clamped below to keep W invertible.
    """
    z = y * f
    ratio = np.exp((-0.5 * f * f - _LOG_SQRT_2PI) - log_ndtr(z))
    grad = y * ratio
    w = ratio * ratio + z * ratio
    return grad, np.maximum(w, _W_FLOOR)


def fit(training: LabeledSet, kernel: KernelConfig, initial_mode=None) -> GpcFit:
    """Locate the Laplace approximation of the label posterior.

    Newton iteration runs on the standard stable parameterization and stops
    once the objective improves by less than 1e-9 or the mode moves by less
    than 1e-8 in the max norm. ``initial_mode`` optionally seeds the search
    (the posterior is log-concave, so the mode is unique and the starting
    point only affects iteration count); the default start is zero.

    Raises
    ------
    FitConvergenceError
        If the iteration cap is reached first. Carries the stationarity
        residual norm.
    """
    points = training.points
    y = training.labels.astype(float)
    t = training.size
    K = _kernel_matrix(points, points, kernel)
    K[np.diag_indices_from(K)] += _JITTER

    if initial_mode is None:
        f = np.zeros(t)
    else:
        f = np.array(initial_mode, dtype=float).ravel()
        if f.shape[0] != t:
            raise ValueError(f"initial_mode has length {f.shape[0]}, expected {t}")

    identity = np.eye(t)
    objective_prev = -math.inf
    converged = False
    for _ in range(_MAX_NEWTON):
        grad, w = _probit_terms(f, y)
        sw = np.sqrt(w)
        b_mat = identity + sw[:, None] * K * sw[None, :]
        chol = np.linalg.cholesky(b_mat)
        rhs = w * f + grad
        u = solve_triangular(chol, sw * (K @ rhs), lower=True, check_finite=False)
        u = solve_triangular(chol, u, lower=True, trans=1, check_finite=False)
        a = rhs - sw * u
        f_new = K @ a
        objective = -0.5 * float(a @ f_new) + float(np.sum(log_ndtr(y * f_new)))
        step = float(np.max(np.abs(f_new - f)))
        f = f_new
        if abs(objective - objective_prev) < _OBJECTIVE_TOL or step < _STEP_TOL:
            converged = True
            break
        objective_prev = objective

    grad, w = _probit_terms(f, y)
    if not converged:
        residual = float(np.max(np.abs(f - K @ grad)))
        raise FitConvergenceError(residual, _MAX_NEWTON)

    sw = np.sqrt(w)
    b_mat = identity + sw[:, None] * K * sw[None, :]
    chol = np.linalg.cholesky(b_mat)
    mu = float(training.labels @ grad)
    ones = solve_triangular(chol, sw, lower=True, check_finite=False)
    nu = float(ones @ ones)

    for arr in (f, grad, w, sw, chol):
        arr.setflags(write=False)
    return GpcFit(
        training=training,
        kernel=kernel,
        mode=f,
        likelihood_gradient=grad,
        w_diag=w,
        sqrt_w=sw,
        chol_b=chol,
        mu=mu,
        nu=nu,
    )


def predict_many(fit_result: GpcFit, points) -> tuple[np.ndarray, np.ndarray]:
    """Latent means and variances at each row of ``points``.

    The variance is 1 - k(x)^T (K + W^{-1})^{-1} k(x); with unit signal
    variance it always lies in (0, 1].
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != fit_result.training.dim:
        raise ValueError(
            f"query dimension {points.shape[1]} does not match "
            f"training dimension {fit_result.training.dim}"
        )
    k_star = _kernel_matrix(points, fit_result.training.points, fit_result.kernel)
    means = k_star @ fit_result.likelihood_gradient
    u = solve_triangular(
        fit_result.chol_b, fit_result.sqrt_w[:, None] * k_star.T,
        lower=True, check_finite=False,
    )
    variances = 1.0 - np.einsum("ij,ij->j", u, u)
    return means, variances


def predict(fit_result: GpcFit, x) -> Prediction:
    """Latent mean and variance at a single input."""
    means, variances = predict_many(fit_result, np.asarray(x, dtype=float)[None, :])
    return Prediction(mean=float(means[0]), variance=float(variances[0]))
