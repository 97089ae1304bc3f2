"""Test sets and F1-based progress metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acquisition import AcquisitionParams, margin_probability_many
from .gpc import GpcFit, KernelConfig, LabeledSet, fit, predict_many


@dataclass(frozen=True)
class TestSet:
    """Evaluation points with ground-truth labels.

    Truth must come from the noiseless oracle even when the sampler itself
    saw noisy labels; callers pass the clean oracle here.
    """

    points: np.ndarray
    truth: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float, ndmin=2)
        truth = np.asarray(self.truth, dtype=int).ravel()
        if points.shape[0] != truth.shape[0]:
            raise ValueError(
                f"got {points.shape[0]} points but {truth.shape[0]} truth labels"
            )
        if not np.all(np.abs(truth) == 1):
            raise ValueError("truth labels must be -1 or +1")
        points.setflags(write=False)
        truth.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "truth", truth)

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _label_all(oracle, points: np.ndarray) -> np.ndarray:
    # fast path for vectorized label functions behind an Oracle wrapper
    fn = getattr(oracle, "fn", None)
    if fn is not None:
        try:
            labels = np.asarray(fn(points))
            if labels.shape == (points.shape[0],):
                return labels.astype(int)
        except Exception:
            pass
    return np.fromiter(
        (int(oracle(p)) for p in points), dtype=int, count=points.shape[0]
    )


def grid_test_set(lower, upper, resolution: int, oracle) -> TestSet:
    """Inclusive lattice over a 2-D rectangle, labeled by ``oracle``.

    ``resolution`` points per axis, endpoints included; row-major with the
    first coordinate varying slowest.
    """
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    if lower.shape != (2,) or upper.shape != (2,):
        raise ValueError("grid test sets are 2-D only")
    if not np.all(lower < upper):
        raise ValueError("lower bounds must be strictly below upper bounds")
    if int(resolution) < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution!r}")
    resolution = int(resolution)
    axis0 = np.linspace(lower[0], upper[0], resolution)
    axis1 = np.linspace(lower[1], upper[1], resolution)
    g0, g1 = np.meshgrid(axis0, axis1, indexing="ij")
    points = np.column_stack([g0.ravel(), g1.ravel()])
    return TestSet(points, _label_all(oracle, points))


def random_test_set(lower, upper, count: int, oracle, seed: int) -> TestSet:
    """Uniform draws over a box, labeled by ``oracle``."""
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    if lower.shape != upper.shape or lower.ndim != 1:
        raise ValueError("lower and upper must be equal-length vectors")
    if not np.all(lower < upper):
        raise ValueError("lower bounds must be strictly below upper bounds")
    if int(count) < 1:
        raise ValueError(f"count must be positive, got {count!r}")
    rng = np.random.default_rng(seed)
    points = rng.uniform(lower, upper, size=(int(count), lower.shape[0]))
    return TestSet(points, _label_all(oracle, points))


def f1_score(predicted, truth) -> float:
    """Harmonic mean of precision and recall with +1 as the positive class.

    Defined as 0 when precision + recall is 0 (no true positives).
    """
    predicted = np.asarray(predicted, dtype=int).ravel()
    truth = np.asarray(truth, dtype=int).ravel()
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must have matching lengths")
    tp = int(np.sum((predicted == 1) & (truth == 1)))
    fp = int(np.sum((predicted == 1) & (truth == -1)))
    fn = int(np.sum((predicted == -1) & (truth == 1)))
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 0.0
    return 2.0 * tp / denominator


def predicted_labels(fit_result: GpcFit, points) -> np.ndarray:
    """Class calls from the latent mean sign; a mean of exactly zero goes to +1."""
    means, _ = predict_many(fit_result, points)
    return np.where(means >= 0.0, 1, -1)


def explored_region_f1(
    fit_result: GpcFit, params: AcquisitionParams, test: TestSet
) -> float | None:
    """F1 restricted to test points the fit claims to have resolved.

    Resolved means the margin probability is strictly below tau. Returns
    None when no test point qualifies.
    """
    means, variances = predict_many(fit_result, test.points)
    explored = margin_probability_many(means, variances, params) < params.tau
    if not explored.any():
        return None
    predicted = np.where(means[explored] >= 0.0, 1, -1)
    return f1_score(predicted, test.truth[explored])


@dataclass(frozen=True)
class F1Point:
    """F1 snapshot after a given number of queries."""

    iteration: int
    f1_global: float
    f1_explored: float | None


def f1_curve(
    records, test: TestSet, kernel: KernelConfig, params: AcquisitionParams, stride: int
) -> list[F1Point]:
    """Refit on record prefixes and score F1 every ``stride`` iterations.

    Each evaluated prefix is refit from scratch with the same routine the
    samplers use, so curve values reproduce what a fresh fit of that prefix
    would report. The final iteration is always included; with stride equal
    to the budget the curve is that single final entry.
    """
    if int(stride) < 1:
        raise ValueError(f"stride must be positive, got {stride!r}")
    stride = int(stride)
    if not records:
        return []
    final = records[-1].iteration
    if final < 1:
        return []
    iterations = list(range(stride, final + 1, stride))
    if not iterations or iterations[-1] != final:
        iterations.append(final)
    points = np.asarray([record.point for record in records], dtype=float)
    labels = np.asarray([record.label for record in records], dtype=int)
    out = []
    for iteration in iterations:
        prefix = LabeledSet(points[: iteration + 1], labels[: iteration + 1])
        gp = fit(prefix, kernel)
        means, variances = predict_many(gp, test.points)
        predicted = np.where(means >= 0.0, 1, -1)
        f1_global = f1_score(predicted, test.truth)
        explored = margin_probability_many(means, variances, params) < params.tau
        if explored.any():
            f1_explored = f1_score(predicted[explored], test.truth[explored])
        else:
            f1_explored = None
        out.append(F1Point(iteration, f1_global, f1_explored))
    return out
