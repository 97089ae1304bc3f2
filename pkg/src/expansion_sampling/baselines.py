"""Bounded-box active-learning baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .acquisition import straddle_score_many
from .engine import QueryRecord, Stage
from .gpc import KernelConfig, LabeledSet, Prediction, fit, predict_many


@dataclass(frozen=True)
class BoundedBox:
    """Axis-aligned search box with strictly ordered bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper must be equal-length nonempty vectors")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(int(count), self.dim))


def straddle_run(
    box: BoundedBox,
    oracle,
    kernel: KernelConfig,
    pool_size: int,
    budget: int,
    seed: int,
) -> list[QueryRecord]:
    """Query the straddle-score argmax over a fixed uniform pool in the box.

    The candidate pool is drawn once up front, so the run can only ever label
    those locations; this caps the achievable boundary resolution at the pool
    spacing, which is the behavior bounded pool-based samplers are compared
    against. The box center is labeled first as iteration zero; every
    subsequent iteration refits on all labels so far and takes the argmax
    over the candidates not yet queried (ties to the lowest pool index).
    Deterministic for a fixed seed, and every query stays inside the box.
    """
    if int(pool_size) < 1:
        raise ValueError(f"pool_size must be positive, got {pool_size!r}")
    if int(budget) < 0:
        raise ValueError(f"budget must be non-negative, got {budget!r}")
    if int(budget) > int(pool_size):
        raise ValueError(
            f"budget {budget!r} exceeds pool_size {pool_size!r}: the fixed "
            "candidate pool would run out of unqueried points"
        )
    oracle_dim = getattr(oracle, "dim", None)
    if oracle_dim is not None and oracle_dim != box.dim:
        raise ValueError(
            f"oracle dimension {oracle_dim} does not match box dimension {box.dim}"
        )
    rng = np.random.default_rng(seed)
    started = perf_counter()
    seed_point = box.center
    seed_label = int(oracle(seed_point))
    records = [
        QueryRecord(
            iteration=0,
            point=seed_point,
            label=seed_label,
            stage=Stage.INIT,
            beta=math.nan,
            gamma=math.nan,
            pred_at_query=None,
            wall_time=perf_counter() - started,
        )
    ]
    pool = box.sample(pool_size, rng)
    queried = np.zeros(pool.shape[0], dtype=bool)
    labeled = LabeledSet(seed_point[None, :], [seed_label])
    for iteration in range(1, int(budget) + 1):
        started = perf_counter()
        gp = fit(labeled, kernel)
        means, variances = predict_many(gp, pool)
        scores = straddle_score_many(means, variances)
        scores[queried] = -np.inf
        best = int(np.argmax(scores))
        queried[best] = True
        query = pool[best].copy()
        label = int(oracle(query))
        records.append(
            QueryRecord(
                iteration=iteration,
                point=query,
                label=label,
                stage=Stage.STRADDLE,
                beta=math.nan,
                gamma=math.nan,
                pred_at_query=Prediction(float(means[best]), float(variances[best])),
                wall_time=perf_counter() - started,
            )
        )
        labeled = labeled.append(query, label)
    return records
